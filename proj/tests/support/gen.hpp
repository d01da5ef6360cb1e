#pragma once

// Random DML programs for the property and acceptance suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dmltest {

struct GenClause {
  bool membership = true;
  std::string pattern;  // membership
  std::string source;   // membership
  std::string cond;     // condition
  std::string text() const;
};

struct GenConstruct {
  std::string kind;  // each, some, setof, ...
  std::string body;  // predicate or head
  std::vector<GenClause> clauses;

  bool quantifier() const { return kind == "each" || kind == "some"; }
  /// Source text with the clauses in the given order.
  std::string text(const std::vector<std::size_t>& order) const;
  std::string text() const;
};

struct GenOptions {
  int max_clauses = 3;
  int max_depth = 2;  // 1 = no nested constructs
  bool allow_sequences = true;
  std::vector<std::string> kinds;  // empty = all nine
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  /// Global definitions of the universes A, B (int sets), R (pairs) and
  /// M (int -> set of ints, keys 0..5). Sizes are at most 6.
  std::string universe();
  /// Same, with A empty.
  std::string universe_with_empty_a();

  GenConstruct construct(const GenOptions& opts);

  /// Boolean condition over the given variables (never raises).
  std::string condition(const std::vector<std::string>& vars);

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  GenConstruct construct_at(const GenOptions& opts, int depth, const std::vector<std::string>& outer);
  std::string int_set(int max_size, int max_value);
  std::string universe_impl(bool empty_a);

  std::mt19937_64 rng_;
};

/// All permutations of 0..n-1 (n <= 4 in practice).
std::vector<std::vector<std::size_t>> permutations(std::size_t n);

}  // namespace dmltest

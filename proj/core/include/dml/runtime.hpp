#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dml/ast.hpp"
#include "dml/diagnostics.hpp"
#include "dml/lowering.hpp"
#include "dml/resolver.hpp"
#include "dml/value.hpp"

namespace dml {

enum class RuntimeErrorKind {
  EmptyAggregate,
  TypeMismatch,
  KeyMissing,
  Unhashable,
  Overflow,
  DivisionByZero,
  ArityMismatch,
  RecursionLimit,
};

std::string_view to_string(RuntimeErrorKind kind);

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(RuntimeErrorKind kind, const std::string& message, SourceLoc loc)
      : std::runtime_error(message), kind_(kind), loc_(loc) {}

  RuntimeErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  RuntimeErrorKind kind_;
  SourceLoc loc_;
};

/// The direct evaluator and the lowered IR disagreed on a construct.
class DifferentialMismatch : public std::runtime_error {
 public:
  DifferentialMismatch(const std::string& message, SourceLoc loc)
      : std::runtime_error(message), loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

enum class ExecPath {
  /// Tree-walking evaluation of every construct (the reference oracle).
  Direct,
  /// Constructs run as their lowered loop IR.
  Lowered,
  /// Both, compared construct by construct.
  Differential,
};

struct ExecOptions {
  ExecPath path = ExecPath::Lowered;
  PlanStrategy plan = PlanStrategy::Greedy;
  int recursion_limit = 10000;
  std::ostream* out = nullptr;    // print(); defaults to std::cout
  std::ostream* trace = nullptr;  // per-statement trace when set
  /// Function bodies may name globals defined by later inputs (REPL).
  bool lenient_function_globals = false;
};

struct ExecStats {
  std::uint64_t loop_iterations = 0;
  std::uint64_t constructs_evaluated = 0;
  std::uint64_t differential_checks = 0;
};

/// A source unit after parsing, resolution and lowering.
struct CompiledUnit {
  std::shared_ptr<Program> program;
  ResolvedProgram resolved;
  LoweredProgram lowered;
};

/// Executes programs against one global environment. Not thread-safe;
/// separate interpreters share nothing.
class Interpreter {
 public:
  explicit Interpreter(ExecOptions options = {});
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Parses, resolves and lowers `source` against the current globals.
  /// Throws StaticError.
  std::shared_ptr<const CompiledUnit> compile(std::string_view source);

  /// Runs a compiled unit. Returns the value of a trailing expression
  /// statement when `want_last_value` is set. Throws RuntimeError.
  std::optional<Value> execute(const std::shared_ptr<const CompiledUnit>& unit,
                               bool want_last_value = false);

  /// compile + execute.
  void run(std::string_view source);

  /// Evaluates one expression in the global scope (bindings such as
  /// witnesses persist).
  Value eval(std::string_view expression);

  /// Calls a global function.
  Value call(std::string_view function, std::vector<Value> args);

  const Value* global(std::string_view name) const;
  void set_global(const std::string& name, Value value);
  std::vector<std::pair<std::string, Value>> globals() const;

  const ExecStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  const ExecOptions& options() const { return opts_; }
  void set_path(ExecPath path) { opts_.path = path; }

 private:
  friend class Evaluator;

  ExecOptions opts_;
  ExecStats stats_;
  std::unordered_map<std::string, Value> globals_;
  std::vector<std::string> global_order_;
  std::vector<std::shared_ptr<const CompiledUnit>> units_;
  std::vector<const LoopIr*> irs_;  // by construct id
  int next_construct_id_ = 0;
  int call_depth_ = 0;
};

/// Runs `fn` on a thread with a large stack so deep interpreted recursion
/// reaches the recursion limit instead of overflowing the native stack.
/// Exceptions propagate to the caller.
void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes = 1ULL << 30);

}  // namespace dml

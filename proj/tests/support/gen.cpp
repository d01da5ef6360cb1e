#include "gen.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace dmltest {

namespace {

const std::vector<std::vector<std::string>> kNames = {{"x", "y", "z"}, {"u", "v", "w"}, {"p", "q", "s"}};
const std::vector<std::string> kAllKinds = {"each",     "some",      "setof",   "listof", "sumof",
                                            "productof", "countof", "maxof", "minof"};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string GenClause::text() const { return membership ? pattern + " in " + source : cond; }

std::string GenConstruct::text(const std::vector<std::size_t>& order) const {
  std::vector<std::string> parts;
  if (!quantifier()) parts.push_back(body);
  for (std::size_t i : order) parts.push_back(clauses[i].text());
  if (quantifier()) parts.push_back("has= " + body);
  return kind + "(" + join(parts) + ")";
}

std::string GenConstruct::text() const {
  std::vector<std::size_t> order(clauses.size());
  std::iota(order.begin(), order.end(), 0);
  return text(order);
}

std::string Generator::int_set(int max_size, int max_value) {
  std::set<int> picked;
  const int n = pick(0, max_size);
  for (int i = 0; i < n; ++i) picked.insert(pick(0, max_value));
  std::vector<int> order(picked.begin(), picked.end());
  std::shuffle(order.begin(), order.end(), rng_);
  std::vector<std::string> parts;
  for (int v : order) parts.push_back(std::to_string(v));
  return "{" + join(parts) + "}";
}

std::string Generator::universe_impl(bool empty_a) {
  std::string out;
  out += "A = " + (empty_a ? std::string("{}") : int_set(6, 5)) + "\n";
  out += "B = " + int_set(6, 5) + "\n";
  std::set<std::pair<int, int>> pairs;
  const int n = pick(0, 6);
  for (int i = 0; i < n; ++i) pairs.emplace(pick(0, 4), pick(0, 4));
  std::vector<std::string> parts;
  for (auto [a, b] : pairs) parts.push_back("(" + std::to_string(a) + ", " + std::to_string(b) + ")");
  std::shuffle(parts.begin(), parts.end(), rng_);
  out += "R = {" + join(parts) + "}\n";
  parts.clear();
  for (int k = 0; k <= 5; ++k) parts.push_back(std::to_string(k) + ": " + int_set(3, 5));
  out += "M = {" + join(parts) + "}\n";
  return out;
}

std::string Generator::universe() { return universe_impl(false); }
std::string Generator::universe_with_empty_a() { return universe_impl(true); }

std::string Generator::condition(const std::vector<std::string>& vars) {
  if (vars.empty()) return coin() ? "True" : "False";
  auto var = [&] { return vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))]; };
  const std::string a = var();
  const std::string b = var();
  switch (pick(0, 7)) {
    case 0: return a + " < " + b;
    case 1: return a + " != " + b;
    case 2: return a + " % 2 == 0";
    case 3: return "(" + a + " + " + b + ") % 3 != 1";
    case 4: return "(" + a + " in B)";
    case 5: return a + " >= 2";
    case 6: return "not (" + a + " == " + b + ")";
    default: return "(" + a + ", " + b + ") in R";
  }
}

GenConstruct Generator::construct(const GenOptions& opts) { return construct_at(opts, 0, {}); }

GenConstruct Generator::construct_at(const GenOptions& opts, int depth,
                                     const std::vector<std::string>& outer) {
  GenConstruct g;
  const auto& kinds = opts.kinds.empty() ? kAllKinds : opts.kinds;
  g.kind = kinds[static_cast<std::size_t>(pick(0, static_cast<int>(kinds.size()) - 1))];

  const auto& pool = kNames[static_cast<std::size_t>(std::min(depth, 2))];
  std::vector<std::string> own;
  std::size_t next_fresh = 0;
  auto random_of = [&](const std::vector<std::string>& xs) {
    return xs[static_cast<std::size_t>(pick(0, static_cast<int>(xs.size()) - 1))];
  };
  auto fresh = [&] {
    own.push_back(pool[next_fresh++]);
    return own.back();
  };
  auto var_choice = [&]() -> std::string {
    if (own.empty()) return fresh();  // every construct gets at least one variable
    const int r = pick(0, 9);
    const bool can_fresh = next_fresh < pool.size();
    if (r < 6 && can_fresh) return fresh();
    if (r < 8 && !own.empty()) return random_of(own);
    if (r < 9 && !outer.empty()) return random_of(outer);
    if (can_fresh) return fresh();
    if (!own.empty()) return random_of(own);
    return "_";
  };
  auto slot = [&]() -> std::string { return !own.empty() && coin(0.15) ? "_" : var_choice(); };

  const int ncl = pick(1, opts.max_clauses);
  const int nmem = pick(1, ncl);
  for (int i = 0; i < nmem; ++i) {
    GenClause c;
    const int form = pick(0, opts.allow_sequences ? 3 : 2);
    std::vector<std::string> bound = own;
    bound.insert(bound.end(), outer.begin(), outer.end());
    if (form == 2 && !bound.empty()) {
      const std::string key = random_of(bound);
      c.pattern = var_choice();
      c.source = "M[" + key + "]";
    } else if (form == 1) {
      const std::string a = slot();
      const std::string b = slot();
      c.pattern = "(" + a + ", " + b + ")";
      c.source = "R";
    } else if (form == 3) {
      c.pattern = var_choice();
      c.source = coin() ? "[1, 2, 2, 4]" : "[0, 3, 3]";
    } else {
      c.pattern = var_choice();
      c.source = coin() ? "A" : "B";
    }
    g.clauses.push_back(c);
  }
  std::vector<std::string> visible = own;
  visible.insert(visible.end(), outer.begin(), outer.end());
  for (int i = nmem; i < ncl; ++i) {
    GenClause c;
    c.membership = false;
    c.cond = condition(visible);
    g.clauses.push_back(c);
  }
  std::shuffle(g.clauses.begin(), g.clauses.end(), rng_);

  const bool can_nest = depth + 1 < opts.max_depth;
  auto v = [&] { return own.empty() ? random_of(visible) : random_of(own); };
  if (g.quantifier()) {
    if (can_nest && coin(0.45)) {
      GenOptions inner = opts;
      inner.kinds = {"each", "some"};
      const std::string nested = construct_at(inner, depth + 1, visible).text();
      switch (pick(0, 2)) {
        case 0: g.body = nested; break;
        case 1: g.body = "not " + nested; break;
        default: g.body = "(" + condition(visible) + ") or " + nested; break;
      }
    } else {
      g.body = condition(visible);
    }
  } else if (g.kind == "productof") {
    g.body = coin() ? v() + " % 3 - 1" : "(" + v() + " + " + v() + ") % 3 - 1";
  } else if (g.kind == "countof") {
    g.body = coin() ? v() : "(" + v() + ", " + v() + ")";
  } else {
    const bool numeric = g.kind == "sumof";
    const int choice = pick(0, 4);
    if (choice == 4 && can_nest) {
      GenOptions inner = opts;
      inner.kinds = {"countof", "sumof"};
      g.body = construct_at(inner, depth + 1, visible).text();
    } else if (choice == 3 && !numeric) {
      g.body = "(" + v() + ", " + v() + ")";
    } else if (choice == 2) {
      g.body = v() + " + " + v();
    } else if (choice == 1) {
      g.body = "(" + v() + " * 2) % 5";
    } else {
      g.body = v();
    }
  }
  return g;
}

std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace dmltest

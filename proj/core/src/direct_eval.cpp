// Reference evaluator for constructs: enumerates the cross product of the
// membership clauses and checks every condition on each complete tuple.
// It shares no planning code with the lowering. A membership whose pattern
// is already fully bound is a containment test, so each satisfying binding
// is counted once even when a sequence source holds duplicates.

#include <stdexcept>

#include "evaluator.hpp"

namespace dml {

Value Evaluator::eval_construct_direct(const Construct& c, Activation& act) {
  FrameGuard guard(act, c.vars.size());
  const std::size_t nclauses = c.clauses.size();
  std::vector<char> bound(c.vars.size(), 0);
  std::vector<char> used(nclauses, 0);
  std::size_t remaining = 0;
  for (const Clause& cl : c.clauses)
    if (cl.kind == Clause::Kind::Membership) ++remaining;

  Accumulator acc(acc_kind_for(c.kind), c.loc);
  bool stop = false;
  bool verdict = c.kind == ConstructKind::Each;

  auto leaf = [&] {
    for (const Clause& cl : c.clauses)
      if (cl.kind == Clause::Kind::Condition && !eval_bool(*cl.expr, act)) return;
    switch (c.kind) {
      case ConstructKind::Some:
        if (eval_bool(*c.body, act)) {
          write_witnesses(c, act);
          verdict = true;
          stop = true;
        }
        return;
      case ConstructKind::Each:
        if (!eval_bool(*c.body, act)) {
          verdict = false;
          stop = true;
        }
        return;
      case ConstructKind::CountOf: acc.add(Value()); return;
      default: acc.add(eval(*c.body, act)); return;
    }
  };

  auto enumerate = [&](auto& self) -> void {
    if (remaining == 0) {
      leaf();
      return;
    }
    // The first clause, in source order, whose source is computable now.
    std::size_t pick = nclauses;
    for (std::size_t i = 0; i < nclauses && pick == nclauses; ++i) {
      if (used[i] || c.clauses[i].kind != Clause::Kind::Membership) continue;
      bool ready = true;
      for (int v : c.clause_deps[i]) ready = ready && bound[static_cast<std::size_t>(v)];
      if (ready) pick = i;
    }
    if (pick == nclauses) throw std::logic_error("construct has no schedulable membership clause");

    const Clause& cl = c.clauses[pick];
    const Value src = eval(*cl.expr, act);
    require_collection(src, cl.expr->loc);
    used[pick] = 1;
    --remaining;
    bool fully_bound = !c.clause_wild[pick];
    for (int v : c.clause_binds[pick]) fully_bound = fully_bound && bound[static_cast<std::size_t>(v)];
    if (fully_bound) {
      ++stats().loop_iterations;
      if (contains(src, pattern_value(cl.pattern, act))) self(self);
      ++remaining;
      used[pick] = 0;
      return;
    }
    const std::vector<char> before = bound;
    for (const Value& item : iteration_items(src)) {
      ++stats().loop_iterations;
      bound = before;
      if (match(cl.pattern, item, act, c.depth, bound)) self(self);
      if (stop) break;
    }
    bound = before;
    ++remaining;
    used[pick] = 0;
  };
  enumerate(enumerate);

  if (is_quantifier(c.kind)) return Value::boolean(verdict);
  return acc.result();
}

}  // namespace dml

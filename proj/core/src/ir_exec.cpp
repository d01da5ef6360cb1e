#include <optional>

#include "evaluator.hpp"

namespace dml {

namespace {

struct IrRun {
  Evaluator& ev;
  Activation& act;
  const Construct& c;
  Accumulator acc;
  std::vector<char> bound;
  std::optional<bool> exit;

  void exec(const IrNode& n) {
    switch (n.op) {
      case IrNode::Op::Seq:
        for (const IrNode& child : n.body) {
          exec(child);
          if (exit) return;
        }
        return;
      case IrNode::Op::AccInit:
      case IrNode::Op::Result: return;
      case IrNode::Op::LoopOver: {
        const Value src = ev.eval(*n.expr, act);
        require_collection(src, n.expr->loc);
        for (const Value& item : iteration_items(src)) {
          ++ev.stats().loop_iterations;
          for (int v : n.vars) bound[static_cast<std::size_t>(v)] = 0;
          if (ev.match(*n.pattern, item, act, c.depth, bound)) body(n);
          if (exit) break;
        }
        for (int v : n.vars) bound[static_cast<std::size_t>(v)] = 0;
        return;
      }
      case IrNode::Op::IfMember: {
        const Value src = ev.eval(*n.expr, act);
        require_collection(src, n.expr->loc);
        if (contains(src, ev.pattern_value(*n.pattern, act))) body(n);
        return;
      }
      case IrNode::Op::If:
        if (ev.eval_bool(*n.expr, act) != n.negate) body(n);
        return;
      case IrNode::Op::AccUpdate: acc.add(n.expr ? ev.eval(*n.expr, act) : Value()); return;
      case IrNode::Op::StoreWitness: ev.write_witnesses(c, act); return;
      case IrNode::Op::BreakOut: exit = n.exit_value; return;
    }
  }

  void body(const IrNode& n) {
    for (const IrNode& child : n.body) {
      exec(child);
      if (exit) return;
    }
  }
};

}  // namespace

Value Evaluator::exec_ir(const LoopIr& ir, Activation& act) {
  const Construct& c = *ir.construct;
  FrameGuard guard(act, c.vars.size());
  IrRun run{*this, act, c, Accumulator(ir.acc, c.loc), std::vector<char>(c.vars.size(), 0), {}};
  run.exec(ir.root);
  if (is_quantifier(c.kind)) return Value::boolean(run.exit.value_or(c.kind == ConstructKind::Each));
  return run.acc.result();
}

}  // namespace dml

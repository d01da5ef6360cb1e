#include "dml/lowering.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace dml {

namespace {

bool subset(const std::vector<int>& xs, const std::set<int>& bound) {
  return std::all_of(xs.begin(), xs.end(), [&](int x) { return bound.count(x) > 0; });
}

std::size_t literal_size(const Expr& e) {
  if (const auto* s = e.as<SetExpr>()) return s->elems.size();
  if (const auto* s = e.as<SeqExpr>()) return s->elems.size();
  if (const auto* m = e.as<MapExpr>()) return m->entries.size();
  return std::numeric_limits<std::size_t>::max();
}

std::string var_list(const Construct& c, const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += c.vars[static_cast<std::size_t>(ids[i])];
  }
  return out;
}

std::string acc_init_text(AccKind k) {
  switch (k) {
    case AccKind::Set: return "{}";
    case AccKind::List: return "[]";
    case AccKind::Sum: return "0";
    case AccKind::Product: return "1";
    case AccKind::Count: return "0";
    case AccKind::Max:
    case AccKind::Min: return "<empty>";
    case AccKind::All: return "True";
    case AccKind::Any: return "False";
  }
  return "?";
}

std::string acc_update_text(AccKind k, const Expr* e) {
  const std::string v = e ? to_source(*e) : "";
  switch (k) {
    case AccKind::Set: return "acc.add(" + v + ")";
    case AccKind::List: return "acc.append(" + v + ")";
    case AccKind::Sum: return "acc += " + v;
    case AccKind::Product: return "acc *= " + v;
    case AccKind::Count: return "acc += 1";
    case AccKind::Max: return "acc = max(acc, " + v + ")";
    case AccKind::Min: return "acc = min(acc, " + v + ")";
    default: return "acc <- " + v;
  }
}

void dump_node(std::ostringstream& os, const LoopIr& ir, const IrNode& n, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const Construct& c = *ir.construct;
  switch (n.op) {
    case IrNode::Op::Seq:
      for (const auto& child : n.body) dump_node(os, ir, child, depth);
      return;
    case IrNode::Op::AccInit:
      os << pad << "acc = " << acc_init_text(ir.acc) << "  (" << to_string(ir.acc) << ")\n";
      return;
    case IrNode::Op::LoopOver:
      os << pad << "for " << to_source(*n.pattern) << " in " << to_source(*n.expr) << ":";
      if (!n.vars.empty()) os << "  [binds " << var_list(c, n.vars) << "]";
      os << '\n';
      break;
    case IrNode::Op::IfMember:
      os << pad << "if " << to_source(*n.pattern) << " in " << to_source(*n.expr) << ":\n";
      break;
    case IrNode::Op::If:
      os << pad << "if " << (n.negate ? "not (" : "") << to_source(*n.expr) << (n.negate ? ")" : "")
         << ":\n";
      break;
    case IrNode::Op::AccUpdate:
      os << pad << acc_update_text(ir.acc, n.expr) << '\n';
      return;
    case IrNode::Op::StoreWitness:
      os << pad << "witness " << var_list(c, n.vars) << '\n';
      return;
    case IrNode::Op::BreakOut:
      os << pad << "exit " << (n.exit_value ? "True" : "False") << '\n';
      return;
    case IrNode::Op::Result:
      os << pad << "result acc\n";
      return;
  }
  for (const auto& child : n.body) dump_node(os, ir, child, depth + 1);
}

// Nests the plan's steps around `innermost`.
std::vector<IrNode> build_nest(const Construct& c, const Plan& plan, std::size_t step,
                               std::vector<IrNode> innermost) {
  if (step == plan.steps.size()) return innermost;
  const PlanStep& s = plan.steps[step];
  const Clause& cl = c.clauses[static_cast<std::size_t>(s.clause)];
  IrNode n;
  n.expr = cl.expr.get();
  switch (s.kind) {
    case PlanStep::Kind::Loop:
      n.op = IrNode::Op::LoopOver;
      n.pattern = &cl.pattern;
      n.vars = s.binds;
      break;
    case PlanStep::Kind::Test:
      n.op = IrNode::Op::IfMember;
      n.pattern = &cl.pattern;
      break;
    case PlanStep::Kind::Filter:
      n.op = IrNode::Op::If;
      break;
  }
  n.body = build_nest(c, plan, step + 1, std::move(innermost));
  std::vector<IrNode> out;
  out.push_back(std::move(n));
  return out;
}

LoopIr wrap(const Construct& c, const Plan& plan, std::vector<IrNode> innermost) {
  LoopIr ir;
  ir.construct = &c;
  ir.acc = acc_kind_for(c.kind);
  ir.plan = plan;
  ir.root.op = IrNode::Op::Seq;
  IrNode init;
  init.op = IrNode::Op::AccInit;
  ir.root.body.push_back(std::move(init));
  for (auto& n : build_nest(c, plan, 0, std::move(innermost))) ir.root.body.push_back(std::move(n));
  IrNode result;
  result.op = IrNode::Op::Result;
  ir.root.body.push_back(std::move(result));
  return ir;
}

}  // namespace

std::string_view to_string(AccKind kind) {
  switch (kind) {
    case AccKind::Set: return "set";
    case AccKind::List: return "list";
    case AccKind::Sum: return "sum";
    case AccKind::Product: return "prod";
    case AccKind::Count: return "count";
    case AccKind::Max: return "max";
    case AccKind::Min: return "min";
    case AccKind::All: return "bool-all";
    case AccKind::Any: return "bool-some";
  }
  return "?";
}

AccKind acc_kind_for(ConstructKind kind) {
  switch (kind) {
    case ConstructKind::Each: return AccKind::All;
    case ConstructKind::Some: return AccKind::Any;
    case ConstructKind::SetOf: return AccKind::Set;
    case ConstructKind::ListOf: return AccKind::List;
    case ConstructKind::SumOf: return AccKind::Sum;
    case ConstructKind::ProductOf: return AccKind::Product;
    case ConstructKind::CountOf: return AccKind::Count;
    case ConstructKind::MaxOf: return AccKind::Max;
    case ConstructKind::MinOf: return AccKind::Min;
  }
  return AccKind::Sum;
}

Plan plan_clauses(const Construct& c, PlanStrategy strategy) {
  Plan plan;
  std::set<int> bound;
  std::vector<std::size_t> memberships;
  std::vector<std::size_t> conditions;
  for (std::size_t i = 0; i < c.clauses.size(); ++i)
    (c.clauses[i].kind == Clause::Kind::Membership ? memberships : conditions).push_back(i);

  auto snapshot = [&] { return std::vector<int>(bound.begin(), bound.end()); };

  auto emit_ready_conditions = [&] {
    for (auto it = conditions.begin(); it != conditions.end();) {
      if (subset(c.clause_deps[*it], bound)) {
        PlanStep s{PlanStep::Kind::Filter, static_cast<int>(*it), {}, snapshot(), snapshot()};
        plan.steps.push_back(std::move(s));
        it = conditions.erase(it);
      } else {
        ++it;
      }
    }
  };

  auto is_test = [&](std::size_t i) { return !c.clause_wild[i] && subset(c.clause_binds[i], bound); };

  emit_ready_conditions();
  while (!memberships.empty()) {
    std::vector<std::size_t> ready;
    for (std::size_t i : memberships)
      if (subset(c.clause_deps[i], bound)) ready.push_back(i);
    if (ready.empty()) {
      const Clause& stuck = c.clauses[memberships.front()];
      throw PlanError("no clause order binds the variables of '" + to_source(*stuck.expr) +
                          "' before it is used",
                      stuck.loc);
    }
    std::size_t pick = ready.front();
    if (strategy == PlanStrategy::Sized) {
      auto cost = [&](std::size_t i) -> std::size_t {
        return is_test(i) ? 0 : literal_size(*c.clauses[i].expr);
      };
      pick = *std::min_element(ready.begin(), ready.end(),
                               [&](std::size_t a, std::size_t b) { return cost(a) < cost(b); });
    }
    memberships.erase(std::find(memberships.begin(), memberships.end(), pick));

    PlanStep s;
    s.clause = static_cast<int>(pick);
    s.bound_before = snapshot();
    s.kind = is_test(pick) ? PlanStep::Kind::Test : PlanStep::Kind::Loop;
    for (int v : c.clause_binds[pick])
      if (!bound.count(v)) s.binds.push_back(v);
    for (int v : c.clause_binds[pick]) bound.insert(v);
    s.bound_after = snapshot();
    plan.steps.push_back(std::move(s));
    emit_ready_conditions();
  }
  if (!conditions.empty()) {
    const Clause& stuck = c.clauses[conditions.front()];
    throw PlanError("condition '" + to_source(*stuck.expr) + "' uses unbound variables", stuck.loc);
  }
  return plan;
}

LoopIr lower_quant(const Construct& q, const Plan& plan) {
  std::vector<IrNode> innermost;
  IrNode check;
  check.op = IrNode::Op::If;
  check.expr = q.body.get();
  IrNode exit;
  exit.op = IrNode::Op::BreakOut;
  if (q.kind == ConstructKind::Some) {
    IrNode store;
    store.op = IrNode::Op::StoreWitness;
    store.vars = q.witnesses;
    check.body.push_back(std::move(store));
    exit.exit_value = true;
  } else {
    check.negate = true;
    exit.exit_value = false;
  }
  check.body.push_back(std::move(exit));
  innermost.push_back(std::move(check));
  return wrap(q, plan, std::move(innermost));
}

LoopIr lower_compr_aggr(const Construct& c, const Plan& plan) {
  std::vector<IrNode> innermost;
  IrNode update;
  update.op = IrNode::Op::AccUpdate;
  update.expr = c.kind == ConstructKind::CountOf ? nullptr : c.body.get();
  innermost.push_back(std::move(update));
  return wrap(c, plan, std::move(innermost));
}

LoopIr lower(const Construct& c, PlanStrategy strategy) {
  const Plan plan = plan_clauses(c, strategy);
  return is_quantifier(c.kind) ? lower_quant(c, plan) : lower_compr_aggr(c, plan);
}

std::string dump_ir(const LoopIr& ir) {
  std::ostringstream os;
  const Construct& c = *ir.construct;
  os << to_string(c.kind) << " @" << c.loc.line << ':' << c.loc.col << '\n';
  dump_node(os, ir, ir.root, 1);
  return os.str();
}

LoweredProgram lower_program(const ResolvedProgram& rp, PlanStrategy strategy) {
  LoweredProgram out;
  out.first_construct_id = rp.first_construct_id;
  out.irs.reserve(rp.constructs.size());
  for (const Construct* c : rp.constructs) out.irs.push_back(lower(*c, strategy));
  return out;
}

}  // namespace dml

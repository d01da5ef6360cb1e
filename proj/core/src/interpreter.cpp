#include <pthread.h>

#include <exception>
#include <iostream>
#include <sstream>

#include "dml/parser.hpp"
#include "evaluator.hpp"

namespace dml {

std::string_view to_string(RuntimeErrorKind kind) {
  switch (kind) {
    case RuntimeErrorKind::EmptyAggregate: return "EmptyAggregate";
    case RuntimeErrorKind::TypeMismatch: return "TypeMismatch";
    case RuntimeErrorKind::KeyMissing: return "KeyMissing";
    case RuntimeErrorKind::Unhashable: return "Unhashable";
    case RuntimeErrorKind::Overflow: return "Overflow";
    case RuntimeErrorKind::DivisionByZero: return "DivisionByZero";
    case RuntimeErrorKind::ArityMismatch: return "ArityMismatch";
    case RuntimeErrorKind::RecursionLimit: return "RecursionLimit";
  }
  return "RuntimeError";
}

RuntimeErrorKind to_runtime_kind(ValueErrorKind kind) {
  switch (kind) {
    case ValueErrorKind::TypeMismatch: return RuntimeErrorKind::TypeMismatch;
    case ValueErrorKind::Unhashable: return RuntimeErrorKind::Unhashable;
    case ValueErrorKind::Overflow: return RuntimeErrorKind::Overflow;
    case ValueErrorKind::DivisionByZero: return RuntimeErrorKind::DivisionByZero;
  }
  return RuntimeErrorKind::TypeMismatch;
}

namespace {

[[noreturn]] void fail(RuntimeErrorKind kind, const std::string& msg, SourceLoc loc) {
  throw RuntimeError(kind, msg, loc);
}

std::string kind_of(const Value& v) { return std::string(kind_name(v.kind())); }

Value set_union(const Value& a, const Value& b) {
  SetRep rep = a.as_set();
  for (const Value& v : b.as_set().items) rep.insert(v);
  return Value::set(rep);
}

Value set_intersection(const Value& a, const Value& b) {
  SetRep rep;
  for (const Value& v : a.as_set().items)
    if (b.as_set().contains(v)) rep.insert(v);
  return Value::set(rep);
}

Value set_difference(const Value& a, const Value& b) {
  SetRep rep;
  for (const Value& v : a.as_set().items)
    if (!b.as_set().contains(v)) rep.insert(v);
  return Value::set(rep);
}

Value concat(const std::vector<Value>& a, const std::vector<Value>& b, bool tuple) {
  std::vector<Value> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return tuple ? Value::tuple(std::move(out)) : Value::seq(std::move(out));
}

ArithOp arith_op(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return ArithOp::Add;
    case BinaryOp::Sub: return ArithOp::Sub;
    case BinaryOp::Mul: return ArithOp::Mul;
    case BinaryOp::FloorDiv: return ArithOp::FloorDiv;
    default: return ArithOp::Mod;
  }
}

struct DepthGuard {
  int& depth;
  explicit DepthGuard(int& d) : depth(d) { ++depth; }
  ~DepthGuard() { --depth; }
};

}  // namespace

void require_collection(const Value& v, SourceLoc loc) {
  if (!v.is(Value::Kind::Set) && !v.is(Value::Kind::Seq) && !v.is(Value::Kind::Map))
    fail(RuntimeErrorKind::TypeMismatch,
         "membership source must be a set, sequence or map, got " + kind_of(v), loc);
}

// ---------------------------------------------------------------------------
// Accumulator

void Accumulator::add(const Value& v) {
  try {
    switch (kind_) {
      case AccKind::Set:
        if (!v.hashable())
          fail(RuntimeErrorKind::Unhashable, kind_of(v) + " values cannot be set elements", loc_);
        set_.insert(v);
        return;
      case AccKind::List: list_.push_back(v); return;
      case AccKind::Sum:
        num_ = seeded_ ? arith(ArithOp::Add, num_, v.as_int()) : v.as_int();
        seeded_ = true;
        return;
      case AccKind::Product:
        num_ = seeded_ ? arith(ArithOp::Mul, num_, v.as_int()) : v.as_int();
        seeded_ = true;
        return;
      case AccKind::Count: num_ = arith(ArithOp::Add, num_, 1); return;
      case AccKind::Max:
      case AccKind::Min:
        if (!seeded_) {
          value_cmp(v, v);  // rejects unordered kinds even for a single element
          best_ = v;
          seeded_ = true;
        } else {
          const auto c = value_cmp(v, best_);
          if (kind_ == AccKind::Max ? c > 0 : c < 0) best_ = v;
        }
        return;
      case AccKind::All:
      case AccKind::Any: return;
    }
  } catch (const ValueError& e) {
    throw RuntimeError(to_runtime_kind(e.kind()), e.what(), loc_);
  }
}

Value Accumulator::result() const {
  switch (kind_) {
    case AccKind::Set: return Value::set(set_);
    case AccKind::List: return Value::seq(list_);
    case AccKind::Sum: return Value::integer(seeded_ ? num_ : 0);
    case AccKind::Product: return Value::integer(seeded_ ? num_ : 1);
    case AccKind::Count: return Value::integer(num_);
    case AccKind::Max:
    case AccKind::Min:
      if (!seeded_)
        fail(RuntimeErrorKind::EmptyAggregate,
             std::string(kind_ == AccKind::Max ? "maxof" : "minof") + " over no values", loc_);
      return best_;
    case AccKind::All: return Value::boolean(true);
    case AccKind::Any: return Value::boolean(false);
  }
  return Value();
}

// ---------------------------------------------------------------------------
// Names

Value Evaluator::lookup(const Binding& b, const std::string& name, Activation& act, SourceLoc loc) {
  switch (b.kind) {
    case Binding::Kind::Logic:
      return act.frames[static_cast<std::size_t>(b.depth)][static_cast<std::size_t>(b.slot)];
    case Binding::Kind::Local: {
      if (act.locals) {
        auto it = act.locals->find(name);
        if (it != act.locals->end()) return it->second;
      }
      fail(RuntimeErrorKind::KeyMissing, "local '" + name + "' used before it is assigned", loc);
    }
    case Binding::Kind::Global: {
      auto it = in_.globals_.find(name);
      if (it == in_.globals_.end())
        fail(RuntimeErrorKind::KeyMissing, "global '" + name + "' used before it is assigned", loc);
      return it->second;
    }
    case Binding::Kind::Builtin: return Value::func(name, nullptr, nullptr);
    case Binding::Kind::Unresolved: break;
  }
  fail(RuntimeErrorKind::KeyMissing, "unresolved name '" + name + "'", loc);
}

void Evaluator::store(const Binding& b, const std::string& name, Value v, Activation& act) {
  if (b.kind == Binding::Kind::Local && act.locals) {
    (*act.locals)[name] = std::move(v);
  } else {
    in_.set_global(name, std::move(v));
  }
}

void Evaluator::assign_target(const Pattern& p, const Value& v, Activation& act, SourceLoc loc) {
  switch (p.kind) {
    case Pattern::Kind::Wildcard: return;
    case Pattern::Kind::Name: store(p.binding, p.name, v, act); return;
    case Pattern::Kind::Tuple: {
      const std::vector<Value>* elems = nullptr;
      if (v.is(Value::Kind::Tuple)) elems = &v.tuple_elems();
      else if (v.is(Value::Kind::Seq)) elems = &v.seq_elems();
      if (!elems || elems->size() != p.elems.size())
        fail(RuntimeErrorKind::TypeMismatch,
             "cannot unpack " + render(v) + " into " + std::to_string(p.elems.size()) + " names",
             loc);
      for (std::size_t i = 0; i < p.elems.size(); ++i) assign_target(p.elems[i], (*elems)[i], act, loc);
      return;
    }
  }
}

void Evaluator::write_witnesses(const Construct& c, Activation& act) {
  const auto& frame = act.frames[static_cast<std::size_t>(c.depth)];
  for (int id : c.witnesses) {
    const std::string& name = c.vars[static_cast<std::size_t>(id)];
    Binding b;
    b.kind = act.locals ? Binding::Kind::Local : Binding::Kind::Global;
    store(b, name, frame[static_cast<std::size_t>(id)], act);
  }
}

std::vector<Value> Evaluator::read_witnesses(const Construct& c, Activation& act) {
  std::vector<Value> out;
  for (int id : c.witnesses) {
    const std::string& name = c.vars[static_cast<std::size_t>(id)];
    if (act.locals) {
      auto it = act.locals->find(name);
      out.push_back(it == act.locals->end() ? Value() : it->second);
    } else {
      const Value* g = in_.global(name);
      out.push_back(g ? *g : Value());
    }
  }
  return out;
}

bool Evaluator::match(const Pattern& p, const Value& v, Activation& act, int depth,
                      std::vector<char>& bound) {
  switch (p.kind) {
    case Pattern::Kind::Wildcard: return true;
    case Pattern::Kind::Name: {
      if (p.binding.is_logic_at(depth)) {
        auto& slot = act.frames[static_cast<std::size_t>(depth)][static_cast<std::size_t>(p.binding.slot)];
        auto& flag = bound[static_cast<std::size_t>(p.binding.slot)];
        if (flag) return value_eq(slot, v);
        slot = v;
        flag = 1;
        return true;
      }
      return value_eq(lookup(p.binding, p.name, act, p.loc), v);
    }
    case Pattern::Kind::Tuple: {
      if (!v.is(Value::Kind::Tuple)) return false;
      const auto& elems = v.tuple_elems();
      if (elems.size() != p.elems.size()) return false;
      for (std::size_t i = 0; i < elems.size(); ++i)
        if (!match(p.elems[i], elems[i], act, depth, bound)) return false;
      return true;
    }
  }
  return false;
}

Value Evaluator::pattern_value(const Pattern& p, Activation& act) {
  if (p.kind == Pattern::Kind::Name) return lookup(p.binding, p.name, act, p.loc);
  std::vector<Value> elems;
  elems.reserve(p.elems.size());
  for (const Pattern& e : p.elems) elems.push_back(pattern_value(e, act));
  return Value::tuple(std::move(elems));
}

// ---------------------------------------------------------------------------
// Expressions

Value Evaluator::eval(const Expr& e, Activation& act) {
  try {
    return eval_inner(e, act);
  } catch (const ValueError& err) {
    throw RuntimeError(to_runtime_kind(err.kind()), err.what(), e.loc);
  }
}

bool Evaluator::eval_bool(const Expr& e, Activation& act) {
  Value v = eval(e, act);
  if (!v.is(Value::Kind::Bool))
    fail(RuntimeErrorKind::TypeMismatch, "expected a bool condition, got " + kind_of(v), e.loc);
  return v.as_bool();
}

Value Evaluator::eval_inner(const Expr& e, Activation& act) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return Value::integer(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return Value::boolean(n.value);
        } else if constexpr (std::is_same_v<T, StrLit>) {
          return Value::string(n.value);
        } else if constexpr (std::is_same_v<T, NameRef>) {
          return lookup(n.binding, n.name, act, e.loc);
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (n.op == UnaryOp::Not) return Value::boolean(!eval_bool(*n.operand, act));
          return Value::integer(arith(ArithOp::Sub, 0, eval(*n.operand, act).as_int()));
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(n, e, act);
        } else if constexpr (std::is_same_v<T, Call>) {
          std::vector<Value> args;
          args.reserve(n.args.size());
          const auto* callee_name = n.callee->template as<NameRef>();
          if (callee_name && callee_name->binding.kind == Binding::Kind::Builtin) {
            for (const auto& a : n.args) args.push_back(eval(*a, act));
            return call_builtin(callee_name->name, args, e.loc);
          }
          Value callee = eval(*n.callee, act);
          for (const auto& a : n.args) args.push_back(eval(*a, act));
          return call_function(callee, std::move(args), e.loc);
        } else if constexpr (std::is_same_v<T, Index>) {
          Value obj = eval(*n.object, act);
          Value key = eval(*n.key, act);
          if (obj.is(Value::Kind::Map)) {
            if (!key.hashable())
              fail(RuntimeErrorKind::Unhashable, kind_of(key) + " values cannot be map keys", e.loc);
            const Value* v = obj.as_map().find(key);
            if (!v) fail(RuntimeErrorKind::KeyMissing, "key " + render(key, false) + " not in map", e.loc);
            return *v;
          }
          if (obj.is(Value::Kind::Seq) || obj.is(Value::Kind::Tuple) || obj.is(Value::Kind::Str)) {
            const std::int64_t size =
                obj.is(Value::Kind::Seq)   ? static_cast<std::int64_t>(obj.seq_elems().size())
                : obj.is(Value::Kind::Tuple) ? static_cast<std::int64_t>(obj.tuple_elems().size())
                                             : static_cast<std::int64_t>(obj.as_str().size());
            std::int64_t i = key.as_int();
            if (i < 0) i += size;
            if (i < 0 || i >= size)
              fail(RuntimeErrorKind::KeyMissing, "index " + render(key) + " out of range", e.loc);
            const auto idx = static_cast<std::size_t>(i);
            if (obj.is(Value::Kind::Seq)) return obj.seq_elems()[idx];
            if (obj.is(Value::Kind::Tuple)) return obj.tuple_elems()[idx];
            return Value::string(obj.as_str().substr(idx, 1));
          }
          fail(RuntimeErrorKind::TypeMismatch, "cannot index " + kind_of(obj), e.loc);
        } else if constexpr (std::is_same_v<T, TupleExpr>) {
          std::vector<Value> elems;
          for (const auto& x : n.elems) elems.push_back(eval(*x, act));
          return Value::tuple(std::move(elems));
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          SetRep rep;
          for (const auto& x : n.elems) {
            Value v = eval(*x, act);
            if (!v.hashable())
              fail(RuntimeErrorKind::Unhashable, kind_of(v) + " values cannot be set elements", x->loc);
            rep.insert(std::move(v));
          }
          return Value::set(rep);
        } else if constexpr (std::is_same_v<T, SeqExpr>) {
          std::vector<Value> elems;
          for (const auto& x : n.elems) elems.push_back(eval(*x, act));
          return Value::seq(std::move(elems));
        } else if constexpr (std::is_same_v<T, MapExpr>) {
          MapRep rep;
          for (const auto& [k, v] : n.entries) {
            Value key = eval(*k, act);
            if (!key.hashable())
              fail(RuntimeErrorKind::Unhashable, kind_of(key) + " values cannot be map keys", k->loc);
            rep.insert_or_assign(std::move(key), eval(*v, act));
          }
          return Value::map(rep);
        } else {
          static_assert(std::is_same_v<T, Construct>);
          return eval_construct(n, act);
        }
      },
      e.node);
}

Value Evaluator::eval_binary(const Binary& b, const Expr& e, Activation& act) {
  switch (b.op) {
    case BinaryOp::And: return Value::boolean(eval_bool(*b.lhs, act) && eval_bool(*b.rhs, act));
    case BinaryOp::Or: return Value::boolean(eval_bool(*b.lhs, act) || eval_bool(*b.rhs, act));
    case BinaryOp::Implies: return Value::boolean(!eval_bool(*b.lhs, act) || eval_bool(*b.rhs, act));
    default: break;
  }
  Value l = eval(*b.lhs, act);
  Value r = eval(*b.rhs, act);
  using K = Value::Kind;
  switch (b.op) {
    case BinaryOp::Eq: return Value::boolean(value_eq(l, r));
    case BinaryOp::Ne: return Value::boolean(!value_eq(l, r));
    case BinaryOp::Lt: return Value::boolean(value_cmp(l, r) < 0);
    case BinaryOp::Le: return Value::boolean(value_cmp(l, r) <= 0);
    case BinaryOp::Gt: return Value::boolean(value_cmp(l, r) > 0);
    case BinaryOp::Ge: return Value::boolean(value_cmp(l, r) >= 0);
    case BinaryOp::In: return Value::boolean(contains(r, l));
    case BinaryOp::NotIn: return Value::boolean(!contains(r, l));
    case BinaryOp::Union:
    case BinaryOp::Intersect:
      if (!l.is(K::Set) || !r.is(K::Set))
        fail(RuntimeErrorKind::TypeMismatch,
             std::string("'") + std::string(to_string(b.op)) + "' needs two sets, got " + kind_of(l) +
                 " and " + kind_of(r),
             e.loc);
      return b.op == BinaryOp::Union ? set_union(l, r) : set_intersection(l, r);
    case BinaryOp::Add:
      if (l.is(K::Set) && r.is(K::Set)) return set_union(l, r);
      if (l.is(K::Seq) && r.is(K::Seq)) return concat(l.seq_elems(), r.seq_elems(), false);
      if (l.is(K::Tuple) && r.is(K::Tuple)) return concat(l.tuple_elems(), r.tuple_elems(), true);
      if (l.is(K::Str) && r.is(K::Str)) return Value::string(l.as_str() + r.as_str());
      break;
    case BinaryOp::Sub:
      if (l.is(K::Set) && r.is(K::Set)) return set_difference(l, r);
      break;
    default: break;
  }
  if (!l.is(K::Int) || !r.is(K::Int))
    fail(RuntimeErrorKind::TypeMismatch,
         std::string("unsupported operands for '") + std::string(to_string(b.op)) + "': " + kind_of(l) +
             " and " + kind_of(r),
         e.loc);
  return Value::integer(arith(arith_op(b.op), l.as_int(), r.as_int()));
}

// ---------------------------------------------------------------------------
// Calls and statements

Value Evaluator::call_function(const Value& callee, std::vector<Value> args, SourceLoc loc) {
  if (!callee.is(Value::Kind::Func))
    fail(RuntimeErrorKind::TypeMismatch, kind_of(callee) + " is not callable", loc);
  const FuncRep& f = callee.as_func();
  if (!f.def) return call_builtin(f.name, args, loc);
  const FuncDef& def = *f.def;
  if (args.size() != def.params.size())
    fail(RuntimeErrorKind::ArityMismatch,
         def.name + "() takes " + std::to_string(def.params.size()) + " argument(s), got " +
             std::to_string(args.size()),
         loc);
  DepthGuard guard(in_.call_depth_);
  if (in_.call_depth_ > in_.opts_.recursion_limit)
    fail(RuntimeErrorKind::RecursionLimit,
         "call depth exceeded " + std::to_string(in_.opts_.recursion_limit) + " in " + def.name + "()",
         loc);
  std::unordered_map<std::string, Value> locals;
  for (std::size_t i = 0; i < args.size(); ++i) locals[def.params[i]] = std::move(args[i]);
  Activation act;
  act.locals = &locals;
  if (exec_block(def.body, act) == Flow::Return) return act.return_value;
  return Value();
}

Evaluator::Flow Evaluator::exec_block(const Block& block, Activation& act) {
  for (const auto& s : block)
    if (exec_stmt(*s, act) == Flow::Return) return Flow::Return;
  return Flow::Normal;
}

Evaluator::Flow Evaluator::exec_stmt(const Stmt& s, Activation& act) {
  if (in_.opts_.trace) *in_.opts_.trace << "trace: line " << s.loc.line << '\n';
  return std::visit(
      [&](const auto& n) -> Flow {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignStmt>) {
          assign_target(n.target, eval(*n.value, act), act, s.loc);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          eval(*n.expr, act);
        } else if constexpr (std::is_same_v<T, FuncDef>) {
          in_.set_global(n.name, Value::func(n.name, &n, unit));
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          act.return_value = n.value ? eval(*n.value, act) : Value();
          return Flow::Return;
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          for (const auto& [cond, body] : n.branches)
            if (eval_bool(*cond, act)) return exec_block(body, act);
          return exec_block(n.else_body, act);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          while (eval_bool(*n.cond, act))
            if (exec_block(n.body, act) == Flow::Return) return Flow::Return;
        } else {
          static_assert(std::is_same_v<T, ForStmt>);
          const Value src = eval(*n.iterable, act);
          require_collection(src, n.iterable->loc);
          for (const Value& item : iteration_items(src)) {
            assign_target(n.target, item, act, s.loc);
            if (exec_block(n.body, act) == Flow::Return) return Flow::Return;
          }
        }
        return Flow::Normal;
      },
      s.node);
}

// ---------------------------------------------------------------------------
// Constructs: path dispatch and the differential check

Value Evaluator::eval_construct(const Construct& c, Activation& act) {
  ++in_.stats_.constructs_evaluated;
  switch (in_.opts_.path) {
    case ExecPath::Direct: return eval_construct_direct(c, act);
    case ExecPath::Lowered: return exec_ir(*in_.irs_[static_cast<std::size_t>(c.id)], act);
    case ExecPath::Differential: return eval_differential(c, act);
  }
  return Value();
}

Value Evaluator::eval_differential(const Construct& c, Activation& act) {
  ++in_.stats_.differential_checks;
  struct Outcome {
    std::optional<Value> value;
    std::optional<RuntimeError> error;
    std::vector<Value> witnesses;
    std::string output;
  };
  std::ostream* const real_out = in_.opts_.out;
  auto attempt = [&](bool direct) {
    Outcome o;
    std::ostringstream captured;
    in_.opts_.out = &captured;
    try {
      o.value = direct ? eval_construct_direct(c, act)
                       : exec_ir(*in_.irs_[static_cast<std::size_t>(c.id)], act);
    } catch (const RuntimeError& e) {
      o.error = e;
    } catch (...) {
      in_.opts_.out = real_out;
      throw;
    }
    in_.opts_.out = real_out;
    o.output = captured.str();
    if (o.value && c.kind == ConstructKind::Some && o.value->as_bool()) o.witnesses = read_witnesses(c, act);
    return o;
  };
  Outcome d = attempt(true);
  Outcome l = attempt(false);

  auto describe = [](const Outcome& o) {
    return o.error ? std::string(to_string(o.error->kind())) : render(*o.value);
  };
  const std::string where = std::string(to_string(c.kind)) + " at " + std::to_string(c.loc.line) +
                            ":" + std::to_string(c.loc.col);
  if (d.error || l.error) {
    if (!(d.error && l.error && d.error->kind() == l.error->kind()))
      throw DifferentialMismatch(
          where + ": direct gave " + describe(d) + ", lowered gave " + describe(l), c.loc);
  } else if (!value_eq(*d.value, *l.value)) {
    throw DifferentialMismatch(where + ": direct gave " + describe(d) + ", lowered gave " + describe(l),
                               c.loc);
  } else if (in_.opts_.plan == PlanStrategy::Greedy && d.witnesses.size() == l.witnesses.size()) {
    for (std::size_t i = 0; i < d.witnesses.size(); ++i)
      if (!value_eq(d.witnesses[i], l.witnesses[i]))
        throw DifferentialMismatch(where + ": witness " +
                                       c.vars[static_cast<std::size_t>(c.witnesses[i])] +
                                       " is " + render(d.witnesses[i]) + " directly but " +
                                       render(l.witnesses[i]) + " lowered",
                                   c.loc);
  }
  if (d.output != l.output)
    throw DifferentialMismatch(where + ": the two paths printed different output", c.loc);

  std::ostream& out = real_out ? *real_out : std::cout;
  out << d.output;
  if (d.error) throw *d.error;
  // Leave the direct path's witnesses in place.
  for (std::size_t i = 0; i < d.witnesses.size(); ++i) {
    Binding b;
    b.kind = act.locals ? Binding::Kind::Local : Binding::Kind::Global;
    store(b, c.vars[static_cast<std::size_t>(c.witnesses[i])], d.witnesses[i], act);
  }
  return *d.value;
}

// ---------------------------------------------------------------------------
// Interpreter

Interpreter::Interpreter(ExecOptions options) : opts_(options) {}
Interpreter::~Interpreter() = default;

std::shared_ptr<const CompiledUnit> Interpreter::compile(std::string_view source) {
  auto unit = std::make_shared<CompiledUnit>();
  unit->program = std::make_shared<Program>(parse_source(source));
  ResolveOptions ro;
  ro.known_globals = global_order_;
  ro.lenient_function_globals = opts_.lenient_function_globals;
  ro.first_construct_id = next_construct_id_;
  unit->resolved = resolve(unit->program, ro);
  unit->lowered = lower_program(unit->resolved, opts_.plan);

  const std::size_t count = unit->lowered.irs.size();
  irs_.resize(static_cast<std::size_t>(next_construct_id_) + count, nullptr);
  for (std::size_t i = 0; i < count; ++i)
    irs_[static_cast<std::size_t>(next_construct_id_) + i] = &unit->lowered.irs[i];
  next_construct_id_ += static_cast<int>(count);
  units_.push_back(unit);
  return unit;
}

std::optional<Value> Interpreter::execute(const std::shared_ptr<const CompiledUnit>& unit,
                                          bool want_last_value) {
  std::optional<Value> last;
  run_with_large_stack([&] {
    Evaluator ev(*this);
    ev.unit = unit;
    Activation act;
    const Block& body = unit->program->body;
    call_depth_ = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = *body[i];
      const auto* es = s.as<ExprStmt>();
      if (want_last_value && es && i + 1 == body.size()) {
        if (opts_.trace) *opts_.trace << "trace: line " << s.loc.line << '\n';
        last = ev.eval(*es->expr, act);
      } else {
        ev.exec_stmt(s, act);
      }
    }
  });
  return last;
}

void Interpreter::run(std::string_view source) { execute(compile(source)); }

Value Interpreter::eval(std::string_view expression) {
  auto v = execute(compile(expression), true);
  return v ? *v : Value();
}

Value Interpreter::call(std::string_view function, std::vector<Value> args) {
  const Value* f = global(function);
  if (!f)
    throw RuntimeError(RuntimeErrorKind::KeyMissing, "no function '" + std::string(function) + "'", {});
  Value result;
  const Value callee = *f;
  run_with_large_stack([&] {
    Evaluator ev(*this);
    call_depth_ = 0;
    result = ev.call_function(callee, std::move(args), {});
  });
  return result;
}

const Value* Interpreter::global(std::string_view name) const {
  auto it = globals_.find(std::string(name));
  return it == globals_.end() ? nullptr : &it->second;
}

void Interpreter::set_global(const std::string& name, Value value) {
  auto [it, inserted] = globals_.insert_or_assign(name, std::move(value));
  if (inserted) global_order_.push_back(name);
}

std::vector<std::pair<std::string, Value>> Interpreter::globals() const {
  std::vector<std::pair<std::string, Value>> out;
  out.reserve(global_order_.size());
  for (const auto& name : global_order_) out.emplace_back(name, globals_.at(name));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ThreadJob {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

void* thread_main(void* arg) {
  auto* job = static_cast<ThreadJob*>(arg);
  try {
    (*job->fn)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes) {
  ThreadJob job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  pthread_t thread;
  const int rc = pthread_create(&thread, &attr, thread_main, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();  // fall back to the current stack
    return;
  }
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace dml

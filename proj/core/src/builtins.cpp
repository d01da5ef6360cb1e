#include <algorithm>
#include <iostream>

#include "evaluator.hpp"

namespace dml {

namespace {

[[noreturn]] void fail(RuntimeErrorKind kind, const std::string& msg, SourceLoc loc) {
  throw RuntimeError(kind, msg, loc);
}

void arity(const std::string& name, const std::vector<Value>& args, std::size_t lo, std::size_t hi,
           SourceLoc loc) {
  if (args.size() < lo || args.size() > hi) {
    const std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi);
    fail(RuntimeErrorKind::ArityMismatch,
         name + "() takes " + want + " argument(s), got " + std::to_string(args.size()), loc);
  }
}

const std::vector<Value>& items_of(const std::string& name, const Value& v, SourceLoc loc) {
  if (v.is(Value::Kind::Tuple)) return v.tuple_elems();
  if (!v.is(Value::Kind::Set) && !v.is(Value::Kind::Seq) && !v.is(Value::Kind::Map))
    fail(RuntimeErrorKind::TypeMismatch,
         name + "() needs a collection, got " + std::string(kind_name(v.kind())), loc);
  return iteration_items(v);
}

}  // namespace

Value Evaluator::call_builtin(const std::string& name, std::vector<Value>& args, SourceLoc loc) {
  try {
    if (name == "print") {
      std::ostream& out = in_.opts_.out ? *in_.opts_.out : std::cout;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out << ' ';
        out << render(args[i]);
      }
      out << '\n';
      return Value();
    }
    if (name == "len") {
      arity(name, args, 1, 1, loc);
      const Value& v = args[0];
      if (v.is(Value::Kind::Str)) return Value::integer(static_cast<std::int64_t>(v.as_str().size()));
      return Value::integer(static_cast<std::int64_t>(items_of(name, v, loc).size()));
    }
    if (name == "keys") {
      arity(name, args, 1, 1, loc);
      if (!args[0].is(Value::Kind::Map))
        fail(RuntimeErrorKind::TypeMismatch,
             "keys() needs a map, got " + std::string(kind_name(args[0].kind())), loc);
      return Value::set(args[0].as_map().keys);
    }
    if (name == "range") {
      arity(name, args, 1, 2, loc);
      const std::int64_t lo = args.size() == 2 ? args[0].as_int() : 0;
      const std::int64_t hi = args.back().as_int();
      std::vector<Value> out;
      for (std::int64_t i = lo; i < hi; ++i) out.push_back(Value::integer(i));
      return Value::seq(std::move(out));
    }
    if (name == "set") {
      arity(name, args, 0, 1, loc);
      if (args.empty()) return Value::empty_set();
      SetRep rep;
      for (const Value& v : items_of(name, args[0], loc)) {
        if (!v.hashable())
          fail(RuntimeErrorKind::Unhashable,
               std::string(kind_name(v.kind())) + " values cannot be set elements", loc);
        rep.insert(v);
      }
      return Value::set(rep);
    }
    if (name == "list") {
      arity(name, args, 0, 1, loc);
      if (args.empty()) return Value::seq({});
      return Value::seq(items_of(name, args[0], loc));
    }
    if (name == "sorted") {
      arity(name, args, 1, 1, loc);
      std::vector<Value> out = items_of(name, args[0], loc);
      std::stable_sort(out.begin(), out.end(),
                       [](const Value& a, const Value& b) { return value_cmp(a, b) < 0; });
      return Value::seq(std::move(out));
    }
    if (name == "abs") {
      arity(name, args, 1, 1, loc);
      const std::int64_t v = args[0].as_int();
      return Value::integer(v < 0 ? arith(ArithOp::Sub, 0, v) : v);
    }
  } catch (const ValueError& e) {
    throw RuntimeError(to_runtime_kind(e.kind()), e.what(), loc);
  }
  fail(RuntimeErrorKind::TypeMismatch, "'" + name + "' is not callable", loc);
}

}  // namespace dml

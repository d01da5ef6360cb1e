#include "dml/value.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace dml {

namespace {

constexpr std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

[[noreturn]] void type_mismatch(const std::string& msg) {
  throw ValueError(ValueErrorKind::TypeMismatch, msg);
}

// Sort signature: equal signatures mean the values are mutually ordered by
// value_cmp. An empty signature marks an unordered value.
std::string sort_signature(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return "i";
    case Value::Kind::Str:
      return "s";
    case Value::Kind::Tuple: {
      std::string sig = "(";
      for (const Value& e : v.tuple_elems()) {
        std::string inner = sort_signature(e);
        if (inner.empty()) return {};
        sig += inner;
      }
      return sig + ")";
    }
    default:
      return {};
  }
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out + "'";
}

// Returns the indices of `items` in rendering order.
std::vector<std::size_t> render_order(const std::vector<Value>& items) {
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (items.size() < 2) return order;
  const std::string sig = sort_signature(items.front());
  if (sig.empty()) return order;
  for (const Value& v : items)
    if (sort_signature(v) != sig) return order;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return value_cmp(items[a], items[b]) < 0;
  });
  return order;
}

void render_into(std::string& out, const Value& v, bool top_level);

void render_list(std::string& out, const std::vector<Value>& elems) {
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i) out += ", ";
    render_into(out, elems[i], false);
  }
}

void render_into(std::string& out, const Value& v, bool top_level) {
  switch (v.kind()) {
    case Value::Kind::None:
      out += "None";
      return;
    case Value::Kind::Int:
      out += std::to_string(v.as_int());
      return;
    case Value::Kind::Bool:
      out += v.as_bool() ? "True" : "False";
      return;
    case Value::Kind::Str:
      out += top_level ? v.as_str() : quote(v.as_str());
      return;
    case Value::Kind::Tuple: {
      const auto& elems = v.tuple_elems();
      out += '(';
      render_list(out, elems);
      if (elems.size() == 1) out += ',';
      out += ')';
      return;
    }
    case Value::Kind::Seq:
      out += '[';
      render_list(out, v.seq_elems());
      out += ']';
      return;
    case Value::Kind::Set: {
      const auto& items = v.as_set().items;
      out += '{';
      bool first = true;
      for (std::size_t i : render_order(items)) {
        if (!first) out += ", ";
        first = false;
        render_into(out, items[i], false);
      }
      out += '}';
      return;
    }
    case Value::Kind::Map: {
      const MapRep& m = v.as_map();
      if (m.size() == 0) {
        out += "{:}";
        return;
      }
      out += '{';
      bool first = true;
      for (std::size_t i : render_order(m.keys)) {
        if (!first) out += ", ";
        first = false;
        render_into(out, m.keys[i], false);
        out += ": ";
        render_into(out, m.vals[i], false);
      }
      out += '}';
      return;
    }
    case Value::Kind::Func:
      out += "<function " + v.as_func().name + ">";
      return;
  }
}

}  // namespace

std::string_view to_string(ValueErrorKind kind) {
  switch (kind) {
    case ValueErrorKind::TypeMismatch: return "TypeMismatch";
    case ValueErrorKind::Unhashable: return "Unhashable";
    case ValueErrorKind::Overflow: return "Overflow";
    case ValueErrorKind::DivisionByZero: return "DivisionByZero";
  }
  return "?";
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::None: return "none";
    case Value::Kind::Int: return "int";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Str: return "str";
    case Value::Kind::Tuple: return "tuple";
    case Value::Kind::Set: return "set";
    case Value::Kind::Seq: return "sequence";
    case Value::Kind::Map: return "map";
    case Value::Kind::Func: return "function";
  }
  return "?";
}

Value Value::tuple(std::vector<Value> elems) {
  return Value(Data(std::make_shared<const TupleRep>(TupleRep{std::move(elems)})));
}

Value Value::seq(std::vector<Value> elems) {
  return Value(Data(std::make_shared<const SeqRep>(SeqRep{std::move(elems)})));
}

Value Value::set(std::span<const Value> elems) {
  SetRep rep;
  for (const Value& e : elems) rep.insert(e);
  return set(rep);
}

Value Value::set(const SetRep& rep) { return Value(Data(std::make_shared<const SetRep>(rep))); }

Value Value::empty_set() { return Value(Data(std::make_shared<const SetRep>())); }

Value Value::map(const MapRep& rep) { return Value(Data(std::make_shared<const MapRep>(rep))); }

Value Value::func(std::string name, const FuncDef* def, std::shared_ptr<const void> owner) {
  return Value(
      Data(std::make_shared<const FuncRep>(FuncRep{std::move(name), def, std::move(owner)})));
}

std::int64_t Value::as_int() const {
  if (!is(Kind::Int)) type_mismatch("expected int, got " + std::string(kind_name(kind())));
  return std::get<std::int64_t>(data_);
}

bool Value::as_bool() const {
  if (!is(Kind::Bool)) type_mismatch("expected bool, got " + std::string(kind_name(kind())));
  return std::get<bool>(data_);
}

const std::string& Value::as_str() const {
  if (!is(Kind::Str)) type_mismatch("expected str, got " + std::string(kind_name(kind())));
  return std::get<std::string>(data_);
}

const std::vector<Value>& Value::tuple_elems() const {
  if (!is(Kind::Tuple)) type_mismatch("expected tuple, got " + std::string(kind_name(kind())));
  return std::get<std::shared_ptr<const TupleRep>>(data_)->elems;
}

const std::vector<Value>& Value::seq_elems() const {
  if (!is(Kind::Seq)) type_mismatch("expected sequence, got " + std::string(kind_name(kind())));
  return std::get<std::shared_ptr<const SeqRep>>(data_)->elems;
}

const SetRep& Value::as_set() const {
  if (!is(Kind::Set)) type_mismatch("expected set, got " + std::string(kind_name(kind())));
  return *std::get<std::shared_ptr<const SetRep>>(data_);
}

const MapRep& Value::as_map() const {
  if (!is(Kind::Map)) type_mismatch("expected map, got " + std::string(kind_name(kind())));
  return *std::get<std::shared_ptr<const MapRep>>(data_);
}

const FuncRep& Value::as_func() const {
  if (!is(Kind::Func)) type_mismatch("expected function, got " + std::string(kind_name(kind())));
  return *std::get<std::shared_ptr<const FuncRep>>(data_);
}

bool Value::hashable() const {
  switch (kind()) {
    case Kind::Int:
    case Kind::Bool:
    case Kind::Str:
      return true;
    case Kind::Tuple:
      return std::all_of(tuple_elems().begin(), tuple_elems().end(),
                         [](const Value& e) { return e.hashable(); });
    default:
      return false;
  }
}

std::size_t Value::hash() const {
  switch (kind()) {
    case Kind::Int:
      return mix(1, std::hash<std::int64_t>{}(as_int()));
    case Kind::Bool:
      return mix(2, as_bool() ? 1 : 0);
    case Kind::Str:
      return mix(3, std::hash<std::string>{}(as_str()));
    case Kind::Tuple: {
      std::size_t h = mix(4, tuple_elems().size());
      for (const Value& e : tuple_elems()) h = mix(h, e.hash());
      return h;
    }
    default:
      throw ValueError(ValueErrorKind::Unhashable,
                       std::string(kind_name(kind())) + " values cannot be set elements or map keys");
  }
}

bool SetRep::contains(const Value& v) const {
  auto [lo, hi] = index.equal_range(v.hash());
  for (auto it = lo; it != hi; ++it)
    if (value_eq(items[it->second], v)) return true;
  return false;
}

bool SetRep::insert(Value v) {
  const std::size_t h = v.hash();
  auto [lo, hi] = index.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (value_eq(items[it->second], v)) return false;
  index.emplace(h, static_cast<std::uint32_t>(items.size()));
  items.push_back(std::move(v));
  return true;
}

const Value* MapRep::find(const Value& key) const {
  auto [lo, hi] = index.equal_range(key.hash());
  for (auto it = lo; it != hi; ++it)
    if (value_eq(keys[it->second], key)) return &vals[it->second];
  return nullptr;
}

void MapRep::insert_or_assign(Value key, Value val) {
  const std::size_t h = key.hash();
  auto [lo, hi] = index.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (value_eq(keys[it->second], key)) {
      vals[it->second] = std::move(val);
      return;
    }
  }
  index.emplace(h, static_cast<std::uint32_t>(keys.size()));
  keys.push_back(std::move(key));
  vals.push_back(std::move(val));
}

bool value_eq(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::None:
      return true;
    case Value::Kind::Int:
      return a.as_int() == b.as_int();
    case Value::Kind::Bool:
      return a.as_bool() == b.as_bool();
    case Value::Kind::Str:
      return a.as_str() == b.as_str();
    case Value::Kind::Tuple:
      return std::ranges::equal(a.tuple_elems(), b.tuple_elems(), value_eq);
    case Value::Kind::Seq:
      return std::ranges::equal(a.seq_elems(), b.seq_elems(), value_eq);
    case Value::Kind::Set: {
      const SetRep& sa = a.as_set();
      const SetRep& sb = b.as_set();
      if (sa.size() != sb.size()) return false;
      return std::all_of(sa.items.begin(), sa.items.end(),
                         [&](const Value& v) { return sb.contains(v); });
    }
    case Value::Kind::Map: {
      const MapRep& ma = a.as_map();
      const MapRep& mb = b.as_map();
      if (ma.size() != mb.size()) return false;
      for (std::size_t i = 0; i < ma.size(); ++i) {
        const Value* other = mb.find(ma.keys[i]);
        if (!other || !value_eq(ma.vals[i], *other)) return false;
      }
      return true;
    }
    case Value::Kind::Func:
      return &a.as_func() == &b.as_func();
  }
  return false;
}

bool comparable(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Int:
    case Value::Kind::Str:
      return true;
    case Value::Kind::Tuple: {
      const auto& ea = a.tuple_elems();
      const auto& eb = b.tuple_elems();
      const std::size_t n = std::min(ea.size(), eb.size());
      for (std::size_t i = 0; i < n; ++i)
        if (!comparable(ea[i], eb[i])) return false;
      return true;
    }
    default:
      return false;
  }
}

std::strong_ordering value_cmp(const Value& a, const Value& b) {
  if (a.kind() != b.kind())
    type_mismatch("cannot order " + std::string(kind_name(a.kind())) + " against " +
                  std::string(kind_name(b.kind())));
  switch (a.kind()) {
    case Value::Kind::Int:
      return a.as_int() <=> b.as_int();
    case Value::Kind::Str:
      return a.as_str().compare(b.as_str()) <=> 0;
    case Value::Kind::Tuple: {
      const auto& ea = a.tuple_elems();
      const auto& eb = b.tuple_elems();
      const std::size_t n = std::min(ea.size(), eb.size());
      for (std::size_t i = 0; i < n; ++i) {
        auto c = value_cmp(ea[i], eb[i]);
        if (c != 0) return c;
      }
      return ea.size() <=> eb.size();
    }
    default:
      type_mismatch(std::string(kind_name(a.kind())) + " values are unordered");
  }
}

std::string render(const Value& v, bool top_level) {
  std::string out;
  render_into(out, v, top_level);
  return out;
}

Value set_insert(const Value& set, const Value& v) {
  const SetRep& rep = set.as_set();
  if (!v.hashable())
    throw ValueError(ValueErrorKind::Unhashable,
                     std::string(kind_name(v.kind())) + " values cannot be set elements");
  if (rep.contains(v)) return set;
  SetRep copy = rep;
  copy.insert(v);
  return Value::set(copy);
}

std::int64_t arith(ArithOp op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  switch (op) {
    case ArithOp::Add:
      if (__builtin_add_overflow(a, b, &r)) break;
      return r;
    case ArithOp::Sub:
      if (__builtin_sub_overflow(a, b, &r)) break;
      return r;
    case ArithOp::Mul:
      if (__builtin_mul_overflow(a, b, &r)) break;
      return r;
    case ArithOp::FloorDiv: {
      if (b == 0) throw ValueError(ValueErrorKind::DivisionByZero, "integer division by zero");
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) break;
      std::int64_t q = a / b;
      if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
      return q;
    }
    case ArithOp::Mod: {
      if (b == 0) throw ValueError(ValueErrorKind::DivisionByZero, "integer modulo by zero");
      if (b == -1) return 0;
      std::int64_t m = a % b;
      if (m != 0 && ((m < 0) != (b < 0))) m += b;
      return m;
    }
  }
  throw ValueError(ValueErrorKind::Overflow, "64-bit integer overflow");
}

const std::vector<Value>& iteration_items(const Value& collection) {
  switch (collection.kind()) {
    case Value::Kind::Set:
      return collection.as_set().items;
    case Value::Kind::Seq:
      return collection.seq_elems();
    case Value::Kind::Map:
      return collection.as_map().keys;
    default:
      type_mismatch("cannot iterate over " + std::string(kind_name(collection.kind())));
  }
}

bool contains(const Value& haystack, const Value& needle) {
  switch (haystack.kind()) {
    case Value::Kind::Set:
      if (!needle.hashable()) return false;
      return haystack.as_set().contains(needle);
    case Value::Kind::Map:
      if (!needle.hashable()) return false;
      return haystack.as_map().find(needle) != nullptr;
    case Value::Kind::Seq:
      return std::ranges::any_of(haystack.seq_elems(),
                                 [&](const Value& e) { return value_eq(e, needle); });
    case Value::Kind::Tuple:
      return std::ranges::any_of(haystack.tuple_elems(),
                                 [&](const Value& e) { return value_eq(e, needle); });
    case Value::Kind::Str:
      return haystack.as_str().find(needle.as_str()) != std::string::npos;
    default:
      type_mismatch("'in' needs a collection, got " + std::string(kind_name(haystack.kind())));
  }
}

}  // namespace dml

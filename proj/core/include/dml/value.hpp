#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dml {

struct FuncDef;

enum class ValueErrorKind { TypeMismatch, Unhashable, Overflow, DivisionByZero };

std::string_view to_string(ValueErrorKind kind);

/// Failure raised by the value layer. Carries no source position; the
/// runtime attaches one when it rethrows.
class ValueError : public std::runtime_error {
 public:
  ValueError(ValueErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ValueErrorKind kind() const { return kind_; }

 private:
  ValueErrorKind kind_;
};

class Value;

struct TupleRep;
struct SeqRep;
struct SetRep;
struct MapRep;
struct FuncRep;

/// Immutable runtime datum. Collections share their storage, so copying a
/// Value is cheap and never aliases mutable state.
class Value {
 public:
  enum class Kind : std::uint8_t { None, Int, Bool, Str, Tuple, Set, Seq, Map, Func };

  Value() = default;

  static Value none() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Data(v)); }
  static Value boolean(bool v) { return Value(Data(v)); }
  static Value string(std::string v) { return Value(Data(std::move(v))); }
  static Value tuple(std::vector<Value> elems);
  static Value seq(std::vector<Value> elems);
  static Value set(std::span<const Value> elems);
  static Value set(const SetRep& rep);
  static Value empty_set();
  static Value map(const MapRep& rep);
  static Value func(std::string name, const FuncDef* def, std::shared_ptr<const void> owner);

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is(Kind k) const { return kind() == k; }

  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_str() const;
  const std::vector<Value>& tuple_elems() const;
  const std::vector<Value>& seq_elems() const;
  const SetRep& as_set() const;
  const MapRep& as_map() const;
  const FuncRep& as_func() const;

  /// Int, Bool, Str, and tuples built only from those.
  bool hashable() const;
  std::size_t hash() const;

 private:
  using Data = std::variant<std::monostate, std::int64_t, bool, std::string,
                            std::shared_ptr<const TupleRep>, std::shared_ptr<const SetRep>,
                            std::shared_ptr<const SeqRep>, std::shared_ptr<const MapRep>,
                            std::shared_ptr<const FuncRep>>;

  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

std::string_view kind_name(Value::Kind kind);

struct TupleRep {
  std::vector<Value> elems;
};

struct SeqRep {
  std::vector<Value> elems;
};

/// Duplicate-free, insertion-ordered collection of hashable values.
struct SetRep {
  std::vector<Value> items;
  std::unordered_multimap<std::size_t, std::uint32_t> index;

  bool contains(const Value& v) const;
  /// Returns false when an equal element is already present.
  bool insert(Value v);
  std::size_t size() const { return items.size(); }
};

/// Insertion-ordered map with hashable, duplicate-free keys.
struct MapRep {
  std::vector<Value> keys;
  std::vector<Value> vals;
  std::unordered_multimap<std::size_t, std::uint32_t> index;

  const Value* find(const Value& key) const;
  void insert_or_assign(Value key, Value val);
  std::size_t size() const { return keys.size(); }
};

struct FuncRep {
  std::string name;
  const FuncDef* def = nullptr;
  std::shared_ptr<const void> owner;
};

bool value_eq(const Value& a, const Value& b);
inline bool operator==(const Value& a, const Value& b) { return value_eq(a, b); }

/// Total order within Int, Str and Tuple-of-comparables. Throws
/// ValueError(TypeMismatch) across kinds or for unordered kinds.
std::strong_ordering value_cmp(const Value& a, const Value& b);
bool comparable(const Value& a, const Value& b);

/// Canonical text. `top_level` controls whether a bare string is quoted.
std::string render(const Value& v, bool top_level = true);

Value set_insert(const Value& set, const Value& v);

enum class ArithOp { Add, Sub, Mul, FloorDiv, Mod };
std::int64_t arith(ArithOp op, std::int64_t a, std::int64_t b);

/// Elements visited by a membership clause or a for loop: set elements,
/// sequence elements, or map keys. Throws TypeMismatch otherwise.
const std::vector<Value>& iteration_items(const Value& collection);

/// `needle in haystack` for the `in` operator.
bool contains(const Value& haystack, const Value& needle);

}  // namespace dml

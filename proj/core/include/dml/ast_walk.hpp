#pragma once

// Generic traversal helpers for ast.hpp. Included at the end of ast.hpp.

#include <type_traits>

namespace dml {

/// Calls `f(child)` for every direct sub-expression of `e`, in source order.
template <class E, class F>
void for_each_child(E& e, F&& f) {
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          f(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          f(*n.lhs);
          f(*n.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          f(*n.callee);
          for (auto& a : n.args) f(*a);
        } else if constexpr (std::is_same_v<T, Index>) {
          f(*n.object);
          f(*n.key);
        } else if constexpr (std::is_same_v<T, TupleExpr> || std::is_same_v<T, SetExpr> ||
                             std::is_same_v<T, SeqExpr>) {
          for (auto& x : n.elems) f(*x);
        } else if constexpr (std::is_same_v<T, MapExpr>) {
          for (auto& [k, v] : n.entries) {
            f(*k);
            f(*v);
          }
        } else if constexpr (std::is_same_v<T, Construct>) {
          for (auto& c : n.clauses) f(*c.expr);
          f(*n.body);
        }
      },
      e.node);
}

template <class F>
void for_each_construct(const Expr& e, F&& f) {
  if (const auto* c = e.as<Construct>()) f(*c);
  for_each_child(e, [&](const Expr& child) { for_each_construct(child, f); });
}

}  // namespace dml

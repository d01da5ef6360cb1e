#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dml/diagnostics.hpp"

namespace dml {

/// Where a name lives at run time. Filled in by the resolver.
struct Binding {
  enum class Kind { Unresolved, Global, Local, Logic, Builtin };
  Kind kind = Kind::Unresolved;
  /// Logic: nesting depth of the owning construct within its activation.
  int depth = -1;
  /// Logic: variable id within the owning construct.
  int slot = -1;

  bool is_logic_at(int d) const { return kind == Kind::Logic && depth == d; }
};

struct Pattern {
  enum class Kind { Name, Wildcard, Tuple };
  Kind kind = Kind::Wildcard;
  std::string name;
  std::vector<Pattern> elems;
  SourceLoc loc;
  Binding binding;

  static Pattern named(std::string n, SourceLoc l) {
    Pattern p;
    p.kind = Kind::Name;
    p.name = std::move(n);
    p.loc = l;
    return p;
  }
};

enum class UnaryOp { Not, Neg };

enum class BinaryOp {
  Implies, Or, And,
  Eq, Ne, Lt, Le, Gt, Ge, In, NotIn,
  Union, Intersect,
  Add, Sub, Mul, FloorDiv, Mod,
};

enum class ConstructKind { Each, Some, SetOf, ListOf, SumOf, ProductOf, CountOf, MaxOf, MinOf };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);
std::string_view to_string(ConstructKind kind);

inline bool is_quantifier(ConstructKind k) { return k == ConstructKind::Each || k == ConstructKind::Some; }
inline bool is_comprehension(ConstructKind k) {
  return k == ConstructKind::SetOf || k == ConstructKind::ListOf;
}

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
  std::int64_t value;
};
struct BoolLit {
  bool value;
};
struct StrLit {
  std::string value;
};
struct NameRef {
  std::string name;
  Binding binding;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  ExprPtr callee;
  std::vector<ExprPtr> args;
  /// Written as `args[0].callee(rest...)`.
  bool method = false;
};
struct Index {
  ExprPtr object;
  ExprPtr key;
};
struct TupleExpr {
  std::vector<ExprPtr> elems;
};
struct SetExpr {
  std::vector<ExprPtr> elems;
};
struct SeqExpr {
  std::vector<ExprPtr> elems;
};
struct MapExpr {
  std::vector<std::pair<ExprPtr, ExprPtr>> entries;
};

struct Clause {
  enum class Kind { Membership, Condition };
  Kind kind = Kind::Condition;
  Pattern pattern;  // Membership only
  ExprPtr expr;     // membership source, or the condition
  SourceLoc loc;
};

/// Quantification (each/some), comprehension (setof/listof) or aggregation.
struct Construct {
  ConstructKind kind;
  SourceLoc loc;
  /// Head for comprehensions/aggregations; the `has=` predicate for quantifiers.
  ExprPtr body;
  std::vector<Clause> clauses;

  // Filled in by the resolver.
  int id = -1;
  int depth = -1;
  /// Logic variable names indexed by var id (sorted, so independent of clause order).
  std::vector<std::string> vars;
  /// `some` only: var ids in clause order, then pattern left-to-right.
  std::vector<int> witnesses;
  /// var id -> index of the first membership clause whose pattern binds it.
  std::vector<int> restriction;
  /// clause index -> own var ids referenced by the clause's expression.
  std::vector<std::vector<int>> clause_deps;
  /// clause index -> own var ids appearing in the clause's pattern.
  std::vector<std::vector<int>> clause_binds;
  /// clause index -> pattern contains a wildcard.
  std::vector<bool> clause_wild;
};

struct Expr {
  using Node = std::variant<IntLit, BoolLit, StrLit, NameRef, Unary, Binary, Call, Index, TupleExpr,
                            SetExpr, SeqExpr, MapExpr, Construct>;

  SourceLoc loc;
  bool parenthesized = false;
  Node node;

  template <class T>
  T* as() {
    return std::get_if<T>(&node);
  }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

template <class T>
ExprPtr make_expr(SourceLoc loc, T node) {
  auto e = std::make_unique<Expr>();
  e->loc = loc;
  e->node = std::move(node);
  return e;
}

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

struct AssignStmt {
  Pattern target;
  ExprPtr value;
};
struct ExprStmt {
  ExprPtr expr;
};
struct FuncDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<SourceLoc> param_locs;
  Block body;
  /// Names local to the function (parameters first). Filled in by the resolver.
  std::vector<std::string> locals;
};
struct ReturnStmt {
  ExprPtr value;  // may be null
};
struct IfStmt {
  std::vector<std::pair<ExprPtr, Block>> branches;  // if + elifs
  Block else_body;
};
struct WhileStmt {
  ExprPtr cond;
  Block body;
};
struct ForStmt {
  Pattern target;
  ExprPtr iterable;
  Block body;
};

struct Stmt {
  using Node = std::variant<AssignStmt, ExprStmt, FuncDef, ReturnStmt, IfStmt, WhileStmt, ForStmt>;

  SourceLoc loc;
  Node node;

  template <class T>
  T* as() {
    return std::get_if<T>(&node);
  }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct Program {
  Block body;
};

/// S-expression text, one node per line, two spaces of indentation per depth.
std::string dump_ast(const Program& program);
std::string dump_ast(const Expr& expr);

/// Re-renders an expression as surface syntax (used by IR dumps and traces).
std::string to_source(const Expr& expr);
std::string to_source(const Pattern& pattern);

/// Visits every construct in an expression, outermost first.
template <class F>
void for_each_construct(const Expr& e, F&& f);

}  // namespace dml

#include "dml/ast_walk.hpp"

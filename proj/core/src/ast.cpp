#include "dml/ast.hpp"

#include <sstream>

#include "dml/value.hpp"

namespace dml {

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Not ? "not" : "-"; }

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return "implies";
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "and";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::In: return "in";
    case BinaryOp::NotIn: return "not in";
    case BinaryOp::Union: return "|";
    case BinaryOp::Intersect: return "&";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::FloorDiv: return "//";
    case BinaryOp::Mod: return "%";
  }
  return "?";
}

std::string_view to_string(ConstructKind kind) {
  switch (kind) {
    case ConstructKind::Each: return "each";
    case ConstructKind::Some: return "some";
    case ConstructKind::SetOf: return "setof";
    case ConstructKind::ListOf: return "listof";
    case ConstructKind::SumOf: return "sumof";
    case ConstructKind::ProductOf: return "productof";
    case ConstructKind::CountOf: return "countof";
    case ConstructKind::MaxOf: return "maxof";
    case ConstructKind::MinOf: return "minof";
  }
  return "?";
}

namespace {

// Builds the indented s-expression. Each node opens on its own line; the
// closing parens of a subtree trail its last line.
class Dumper {
 public:
  std::string finish() { return out_.str(); }

  void open(int depth, const std::string& head) {
    if (!first_) out_ << '\n';
    first_ = false;
    out_ << std::string(static_cast<std::size_t>(depth) * 2, ' ') << '(' << head;
  }
  void close() { out_ << ')'; }
  void leaf(int depth, const std::string& text) {
    open(depth, text);
    close();
  }

  void pattern(const Pattern& p, int depth) {
    switch (p.kind) {
      case Pattern::Kind::Name:
        leaf(depth, "pname " + p.name);
        return;
      case Pattern::Kind::Wildcard:
        leaf(depth, "pwild");
        return;
      case Pattern::Kind::Tuple:
        open(depth, "ptuple");
        for (const auto& e : p.elems) pattern(e, depth + 1);
        close();
        return;
    }
  }

  void expr(const Expr& e, int depth) {
    std::visit([&](const auto& n) { node(n, depth); }, e.node);
  }

  void block(const std::string& head, const Block& b, int depth) {
    open(depth, head);
    for (const auto& s : b) stmt(*s, depth + 1);
    close();
  }

  void stmt(const Stmt& s, int depth) {
    std::visit([&](const auto& n) { node(n, depth); }, s.node);
  }

 private:
  void node(const IntLit& n, int d) { leaf(d, "int " + std::to_string(n.value)); }
  void node(const BoolLit& n, int d) { leaf(d, n.value ? "bool True" : "bool False"); }
  void node(const StrLit& n, int d) { leaf(d, "str " + render(Value::string(n.value), false)); }
  void node(const NameRef& n, int d) { leaf(d, "name " + n.name); }
  void node(const Unary& n, int d) {
    open(d, "unop " + std::string(to_string(n.op)));
    expr(*n.operand, d + 1);
    close();
  }
  void node(const Binary& n, int d) {
    open(d, "binop " + std::string(to_string(n.op)));
    expr(*n.lhs, d + 1);
    expr(*n.rhs, d + 1);
    close();
  }
  void node(const Call& n, int d) {
    open(d, n.method ? "method" : "call");
    expr(*n.callee, d + 1);
    for (const auto& a : n.args) expr(*a, d + 1);
    close();
  }
  void node(const Index& n, int d) {
    open(d, "index");
    expr(*n.object, d + 1);
    expr(*n.key, d + 1);
    close();
  }
  void elems(const char* head, const std::vector<ExprPtr>& xs, int d) {
    open(d, head);
    for (const auto& x : xs) expr(*x, d + 1);
    close();
  }
  void node(const TupleExpr& n, int d) { elems("tuple", n.elems, d); }
  void node(const SetExpr& n, int d) { elems("set", n.elems, d); }
  void node(const SeqExpr& n, int d) { elems("seq", n.elems, d); }
  void node(const MapExpr& n, int d) {
    open(d, "map");
    for (const auto& [k, v] : n.entries) {
      open(d + 1, "entry");
      expr(*k, d + 2);
      expr(*v, d + 2);
      close();
    }
    close();
  }
  void node(const Construct& n, int d) {
    const char* family = is_quantifier(n.kind)       ? "quant "
                         : is_comprehension(n.kind) ? "compr "
                                                    : "aggr ";
    open(d, family + std::string(to_string(n.kind)));
    if (!is_quantifier(n.kind)) {
      open(d + 1, "head");
      expr(*n.body, d + 2);
      close();
    }
    for (const auto& c : n.clauses) {
      if (c.kind == Clause::Kind::Membership) {
        open(d + 1, "member");
        pattern(c.pattern, d + 2);
        expr(*c.expr, d + 2);
      } else {
        open(d + 1, "cond");
        expr(*c.expr, d + 2);
      }
      close();
    }
    if (is_quantifier(n.kind)) {
      open(d + 1, "has");
      expr(*n.body, d + 2);
      close();
    }
    close();
  }

  void node(const AssignStmt& n, int d) {
    open(d, "assign");
    pattern(n.target, d + 1);
    expr(*n.value, d + 1);
    close();
  }
  void node(const ExprStmt& n, int d) {
    open(d, "expr-stmt");
    expr(*n.expr, d + 1);
    close();
  }
  void node(const FuncDef& n, int d) {
    std::string head = "def " + n.name;
    open(d, head);
    std::string params = "params";
    for (const auto& p : n.params) params += " " + p;
    leaf(d + 1, params);
    block("body", n.body, d + 1);
    close();
  }
  void node(const ReturnStmt& n, int d) {
    if (!n.value) {
      leaf(d, "return");
      return;
    }
    open(d, "return");
    expr(*n.value, d + 1);
    close();
  }
  void node(const IfStmt& n, int d) {
    open(d, "if");
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      open(d + 1, i == 0 ? "then" : "elif");
      expr(*n.branches[i].first, d + 2);
      block("body", n.branches[i].second, d + 2);
      close();
    }
    if (!n.else_body.empty()) block("else", n.else_body, d + 1);
    close();
  }
  void node(const WhileStmt& n, int d) {
    open(d, "while");
    expr(*n.cond, d + 1);
    block("body", n.body, d + 1);
    close();
  }
  void node(const ForStmt& n, int d) {
    open(d, "for");
    pattern(n.target, d + 1);
    expr(*n.iterable, d + 1);
    block("body", n.body, d + 1);
    close();
  }

  std::ostringstream out_;
  bool first_ = true;
};

int precedence(const Expr& e) {
  if (const auto* b = e.as<Binary>()) {
    switch (b->op) {
      case BinaryOp::Implies: return 1;
      case BinaryOp::Or: return 2;
      case BinaryOp::And: return 3;
      case BinaryOp::Union: return 6;
      case BinaryOp::Intersect: return 7;
      case BinaryOp::Add:
      case BinaryOp::Sub: return 8;
      case BinaryOp::Mul:
      case BinaryOp::FloorDiv:
      case BinaryOp::Mod: return 9;
      default: return 5;
    }
  }
  if (const auto* u = e.as<Unary>()) return u->op == UnaryOp::Not ? 4 : 10;
  if (e.as<TupleExpr>()) return 0;
  return 11;
}

void source_into(std::string& out, const Expr& e);

void source_operand(std::string& out, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    out += '(';
    source_into(out, e);
    out += ')';
  } else {
    source_into(out, e);
  }
}

void source_list(std::string& out, const std::vector<ExprPtr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    source_operand(out, *xs[i], 1);
  }
}

void source_into(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += n.value ? "True" : "False";
        } else if constexpr (std::is_same_v<T, StrLit>) {
          out += render(Value::string(n.value), false);
        } else if constexpr (std::is_same_v<T, NameRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          const int p = precedence(e);
          out += n.op == UnaryOp::Not ? "not " : "-";
          source_operand(out, *n.operand, p);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = precedence(e);
          // implies is right-associative, the rest associate to the left;
          // comparisons do not chain.
          const bool right = n.op == BinaryOp::Implies;
          const bool cmp = p == 5;
          source_operand(out, *n.lhs, right || cmp ? p + 1 : p);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          source_operand(out, *n.rhs, right ? p : p + 1);
        } else if constexpr (std::is_same_v<T, Call>) {
          if (n.method && !n.args.empty()) {
            source_operand(out, *n.args[0], 11);
            out += '.';
            source_into(out, *n.callee);
            out += '(';
            for (std::size_t i = 1; i < n.args.size(); ++i) {
              if (i > 1) out += ", ";
              source_operand(out, *n.args[i], 1);
            }
            out += ')';
          } else {
            source_operand(out, *n.callee, 11);
            out += '(';
            source_list(out, n.args);
            out += ')';
          }
        } else if constexpr (std::is_same_v<T, Index>) {
          source_operand(out, *n.object, 11);
          out += '[';
          source_into(out, *n.key);
          out += ']';
        } else if constexpr (std::is_same_v<T, TupleExpr>) {
          out += '(';
          source_list(out, n.elems);
          if (n.elems.size() == 1) out += ',';
          out += ')';
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          out += '{';
          source_list(out, n.elems);
          out += '}';
        } else if constexpr (std::is_same_v<T, SeqExpr>) {
          out += '[';
          source_list(out, n.elems);
          out += ']';
        } else if constexpr (std::is_same_v<T, MapExpr>) {
          if (n.entries.empty()) {
            out += "{:}";
            return;
          }
          out += '{';
          for (std::size_t i = 0; i < n.entries.size(); ++i) {
            if (i) out += ", ";
            source_operand(out, *n.entries[i].first, 1);
            out += ": ";
            source_operand(out, *n.entries[i].second, 1);
          }
          out += '}';
        } else if constexpr (std::is_same_v<T, Construct>) {
          out += to_string(n.kind);
          out += '(';
          bool first = true;
          if (!is_quantifier(n.kind)) {
            source_operand(out, *n.body, 1);
            first = false;
          }
          for (const auto& c : n.clauses) {
            if (!first) out += ", ";
            first = false;
            if (c.kind == Clause::Kind::Membership) {
              out += to_source(c.pattern);
              out += " in ";
              source_operand(out, *c.expr, 6);
            } else {
              // A bare `a in b` condition needs parens to stay a condition.
              const auto* b = c.expr->template as<Binary>();
              source_operand(out, *c.expr, b && b->op == BinaryOp::In ? 11 : 1);
            }
          }
          if (is_quantifier(n.kind)) {
            out += ", has= ";
            source_operand(out, *n.body, 1);
          }
          out += ')';
        }
      },
      e.node);
}

}  // namespace

std::string dump_ast(const Program& program) {
  Dumper d;
  d.block("program", program.body, 0);
  return d.finish();
}

std::string dump_ast(const Expr& expr) {
  Dumper d;
  d.expr(expr, 0);
  return d.finish();
}

std::string to_source(const Expr& expr) {
  std::string out;
  source_into(out, expr);
  return out;
}

std::string to_source(const Pattern& pattern) {
  switch (pattern.kind) {
    case Pattern::Kind::Name:
      return pattern.name;
    case Pattern::Kind::Wildcard:
      return "_";
    case Pattern::Kind::Tuple: {
      std::string out = "(";
      for (std::size_t i = 0; i < pattern.elems.size(); ++i) {
        if (i) out += ", ";
        out += to_source(pattern.elems[i]);
      }
      if (pattern.elems.size() == 1) out += ',';
      return out + ")";
    }
  }
  return {};
}

std::string format_diagnostic(std::string_view file, SourceLoc loc, std::string_view tag,
                              std::string_view message) {
  std::ostringstream os;
  os << file << ':' << loc.line << ':' << loc.col << ": error: " << tag << ": " << message;
  return os.str();
}

}  // namespace dml

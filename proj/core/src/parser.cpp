#include "dml/parser.hpp"

#include <charconv>
#include <optional>

namespace dml {

namespace {

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::Eof)
      throw ParseError("token stream is not terminated", {});
  }

  Program program() {
    Program prog;
    skip_newlines();
    while (!at(TokenKind::Eof)) {
      prog.body.push_back(statement(Context::TopLevel));
      skip_newlines();
    }
    return prog;
  }

  ExprPtr lone_expression() {
    skip_newlines();
    ExprPtr e = expr_list();
    skip_newlines();
    if (!at(TokenKind::Eof)) fail({"end of input"});
    return e;
  }

  Pattern lone_pattern() {
    Pattern p = target_pattern();
    skip_newlines();
    if (!at(TokenKind::Eof)) fail({"end of input"});
    return p;
  }

 private:
  enum class Context { TopLevel, Function, Nested };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at(TokenKind k, std::string_view text) const { return peek().is(k, text); }
  bool at_punct(std::string_view p) const { return at(TokenKind::Punct, p); }
  bool at_kw(std::string_view k) const { return at(TokenKind::Keyword, k); }

  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Newline: return "end of line";
      case TokenKind::Indent: return "indentation";
      case TokenKind::Dedent: return "dedent";
      case TokenKind::Eof: return "end of input";
      case TokenKind::String: return "string literal";
      default: return "'" + t.lexeme + "'";
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + describe(peek());
    throw ParseError(msg, peek().loc(), std::move(expected));
  }

  [[noreturn]] void fail_at(const std::string& msg, SourceLoc loc) const {
    throw ParseError(msg, loc);
  }

  const Token& expect_punct(std::string_view p) {
    if (!at_punct(p)) fail({"'" + std::string(p) + "'"});
    return advance();
  }
  const Token& expect_kw(std::string_view k) {
    if (!at_kw(k)) fail({"'" + std::string(k) + "'"});
    return advance();
  }
  const Token& expect_ident() {
    if (!at(TokenKind::Ident)) fail({"identifier"});
    return advance();
  }
  void expect_newline() {
    if (at(TokenKind::Eof)) return;
    if (!at(TokenKind::Newline)) fail({"end of line"});
    advance();
  }
  void skip_newlines() {
    while (at(TokenKind::Newline)) advance();
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.nesting_ > kMaxNesting) p_.fail_at("nesting too deep", p_.peek().loc());
    }
    ~DepthGuard() { --p_.nesting_; }
    Parser& p_;
  };

  // ---- statements ----

  StmtPtr statement(Context ctx) {
    DepthGuard guard(*this);
    const Token& t = peek();
    auto stmt = std::make_unique<Stmt>();
    stmt->loc = t.loc();
    if (t.kind == TokenKind::Indent) fail_at("unexpected indentation", t.loc());
    if (t.is(TokenKind::Keyword, "def")) {
      if (ctx != Context::TopLevel)
        fail_at("function definitions are only allowed at top level", t.loc());
      stmt->node = func_def();
    } else if (t.is(TokenKind::Keyword, "if")) {
      stmt->node = if_stmt(ctx);
    } else if (t.is(TokenKind::Keyword, "while")) {
      advance();
      WhileStmt w;
      w.cond = expression();
      w.body = suite(ctx);
      stmt->node = std::move(w);
    } else if (t.is(TokenKind::Keyword, "for")) {
      advance();
      ForStmt f;
      f.target = target_pattern();
      expect_kw("in");
      f.iterable = expression();
      f.body = suite(ctx);
      stmt->node = std::move(f);
    } else {
      stmt->node = simple_statement(ctx);
      expect_newline();
    }
    return stmt;
  }

  Stmt::Node simple_statement(Context ctx) {
    if (at_kw("return")) {
      const Token& kw = advance();
      if (ctx == Context::TopLevel) fail_at("'return' outside of a function", kw.loc());
      ReturnStmt r;
      if (!at(TokenKind::Newline) && !at(TokenKind::Eof)) r.value = expr_list();
      return r;
    }
    ExprPtr lhs = expr_list();
    if (at_punct("=")) {
      advance();
      AssignStmt a;
      a.target = expr_to_pattern(*lhs);
      a.value = expr_list();
      return a;
    }
    return ExprStmt{std::move(lhs)};
  }

  Block suite(Context ctx) {
    const Context inner = ctx == Context::TopLevel ? Context::Nested : ctx;
    expect_punct(":");
    Block body;
    if (!at(TokenKind::Newline)) {
      auto stmt = std::make_unique<Stmt>();
      stmt->loc = peek().loc();
      stmt->node = simple_statement(inner);
      expect_newline();
      body.push_back(std::move(stmt));
      return body;
    }
    advance();
    skip_newlines();
    if (!at(TokenKind::Indent)) fail({"indented block"});
    advance();
    while (!at(TokenKind::Dedent) && !at(TokenKind::Eof)) {
      body.push_back(statement(inner));
      skip_newlines();
    }
    if (at(TokenKind::Dedent)) advance();
    return body;
  }

  FuncDef func_def() {
    expect_kw("def");
    FuncDef f;
    f.name = expect_ident().lexeme;
    expect_punct("(");
    if (!at_punct(")")) {
      while (true) {
        const Token& p = expect_ident();
        f.params.push_back(p.lexeme);
        f.param_locs.push_back(p.loc());
        if (!at_punct(",")) break;
        advance();
      }
    }
    expect_punct(")");
    f.body = suite(Context::Function);
    return f;
  }

  IfStmt if_stmt(Context ctx) {
    IfStmt s;
    expect_kw("if");
    ExprPtr cond = expression();
    s.branches.emplace_back(std::move(cond), suite(ctx));
    while (true) {
      skip_newlines_before_continuation();
      if (at_kw("elif")) {
        advance();
        ExprPtr c = expression();
        s.branches.emplace_back(std::move(c), suite(ctx));
        continue;
      }
      if (at_kw("else")) {
        advance();
        s.else_body = suite(ctx);
      }
      break;
    }
    return s;
  }

  // Allows blank lines between an if-block and its elif/else.
  void skip_newlines_before_continuation() {
    std::size_t p = pos_;
    while (p < toks_.size() && toks_[p].kind == TokenKind::Newline) ++p;
    if (p < toks_.size() && toks_[p].kind == TokenKind::Keyword &&
        (toks_[p].lexeme == "elif" || toks_[p].lexeme == "else"))
      pos_ = p;
  }

  // ---- patterns ----

  Pattern pattern_atom() {
    const Token& t = peek();
    if (t.kind == TokenKind::Ident) {
      advance();
      if (t.lexeme == "_") {
        Pattern p;
        p.kind = Pattern::Kind::Wildcard;
        p.loc = t.loc();
        return p;
      }
      return Pattern::named(t.lexeme, t.loc());
    }
    if (t.is(TokenKind::Punct, "(")) {
      DepthGuard guard(*this);
      advance();
      Pattern p;
      p.kind = Pattern::Kind::Tuple;
      p.loc = t.loc();
      bool trailing_comma = false;
      while (!at_punct(")")) {
        p.elems.push_back(pattern_atom());
        trailing_comma = false;
        if (!at_punct(",")) break;
        advance();
        trailing_comma = true;
      }
      expect_punct(")");
      if (p.elems.size() == 1 && !trailing_comma) return std::move(p.elems.front());
      return p;
    }
    fail({"identifier", "'('"});
  }

  Pattern target_pattern() {
    const SourceLoc loc = peek().loc();
    Pattern first = pattern_atom();
    if (!at_punct(",")) return first;
    Pattern tup;
    tup.kind = Pattern::Kind::Tuple;
    tup.loc = loc;
    tup.elems.push_back(std::move(first));
    while (at_punct(",")) {
      advance();
      if (at_kw("in") || at_punct("=")) break;
      tup.elems.push_back(pattern_atom());
    }
    return tup;
  }

  // ---- expressions ----

  ExprPtr expr_list() {
    const SourceLoc loc = peek().loc();
    ExprPtr first = expression();
    if (!at_punct(",")) return first;
    TupleExpr tup;
    tup.elems.push_back(std::move(first));
    while (at_punct(",")) {
      advance();
      if (at(TokenKind::Newline) || at(TokenKind::Eof) || at_punct("=")) break;
      tup.elems.push_back(expression());
    }
    return make_expr(loc, std::move(tup));
  }

  ExprPtr expression() {
    DepthGuard guard(*this);
    return implies_expr();
  }

  ExprPtr implies_expr() {
    ExprPtr lhs = or_expr();
    if (at_kw("implies")) {
      const Token& op = advance();
      ExprPtr rhs = implies_expr();
      return make_expr(op.loc(), Binary{BinaryOp::Implies, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (at_kw("or")) {
      const Token& op = advance();
      ExprPtr rhs = and_expr();
      lhs = make_expr(op.loc(), Binary{BinaryOp::Or, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (at_kw("and")) {
      const Token& op = advance();
      ExprPtr rhs = not_expr();
      lhs = make_expr(op.loc(), Binary{BinaryOp::And, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (at_kw("not")) {
      DepthGuard guard(*this);
      const Token& op = advance();
      ExprPtr operand = not_expr();
      return make_expr(op.loc(), Unary{UnaryOp::Not, std::move(operand)});
    }
    return comparison();
  }

  std::optional<BinaryOp> comparison_op() {
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword) {
      if (t.lexeme == "in") return BinaryOp::In;
      if (t.lexeme == "not" && peek(1).is(TokenKind::Keyword, "in")) return BinaryOp::NotIn;
      return std::nullopt;
    }
    if (t.kind != TokenKind::Punct) return std::nullopt;
    if (t.lexeme == "==") return BinaryOp::Eq;
    if (t.lexeme == "!=") return BinaryOp::Ne;
    if (t.lexeme == "<") return BinaryOp::Lt;
    if (t.lexeme == "<=") return BinaryOp::Le;
    if (t.lexeme == ">") return BinaryOp::Gt;
    if (t.lexeme == ">=") return BinaryOp::Ge;
    return std::nullopt;
  }

  ExprPtr comparison() {
    ExprPtr lhs = union_expr();
    auto op = comparison_op();
    if (!op) return lhs;
    const Token& t = advance();
    if (*op == BinaryOp::NotIn) advance();
    ExprPtr rhs = union_expr();
    if (comparison_op()) fail_at("chained comparisons are not supported; use 'and'", peek().loc());
    return make_expr(t.loc(), Binary{*op, std::move(lhs), std::move(rhs)});
  }

  ExprPtr union_expr() {
    ExprPtr lhs = intersect_expr();
    while (at_punct("|")) {
      const Token& op = advance();
      ExprPtr rhs = intersect_expr();
      lhs = make_expr(op.loc(), Binary{BinaryOp::Union, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr intersect_expr() {
    ExprPtr lhs = additive();
    while (at_punct("&")) {
      const Token& op = advance();
      ExprPtr rhs = additive();
      lhs = make_expr(op.loc(), Binary{BinaryOp::Intersect, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = term();
    while (at_punct("+") || at_punct("-")) {
      const Token& op = advance();
      ExprPtr rhs = term();
      lhs = make_expr(op.loc(), Binary{op.lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub,
                                       std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (at_punct("*") || at_punct("//") || at_punct("%")) {
      const Token& op = advance();
      const BinaryOp bop = op.lexeme == "*"    ? BinaryOp::Mul
                           : op.lexeme == "//" ? BinaryOp::FloorDiv
                                               : BinaryOp::Mod;
      ExprPtr rhs = unary();
      lhs = make_expr(op.loc(), Binary{bop, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_punct("-")) {
      DepthGuard guard(*this);
      const Token& op = advance();
      ExprPtr operand = unary();
      return make_expr(op.loc(), Unary{UnaryOp::Neg, std::move(operand)});
    }
    return postfix();
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    expect_punct("(");
    if (!at_punct(")")) {
      while (true) {
        args.push_back(expression());
        if (!at_punct(",")) break;
        advance();
        if (at_punct(")")) break;
      }
    }
    expect_punct(")");
    return args;
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    while (true) {
      if (at_punct("(")) {
        const SourceLoc loc = peek().loc();
        Call c;
        c.callee = std::move(e);
        c.args = call_args();
        e = make_expr(loc, std::move(c));
      } else if (at_punct("[")) {
        const SourceLoc loc = advance().loc();
        ExprPtr key = expression();
        expect_punct("]");
        e = make_expr(loc, Index{std::move(e), std::move(key)});
      } else if (at_punct(".")) {
        const SourceLoc loc = advance().loc();
        const Token& name = expect_ident();
        if (!at_punct("(")) fail({"'(' after method name"});
        Call c;
        c.callee = make_expr(name.loc(), NameRef{name.lexeme, {}});
        c.method = true;
        c.args.push_back(std::move(e));
        for (auto& a : call_args()) c.args.push_back(std::move(a));
        e = make_expr(loc, std::move(c));
      } else {
        return e;
      }
    }
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Int: {
        advance();
        std::int64_t v = 0;
        std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        return make_expr(t.loc(), IntLit{v});
      }
      case TokenKind::String:
        advance();
        return make_expr(t.loc(), StrLit{t.lexeme});
      case TokenKind::Ident:
        advance();
        return make_expr(t.loc(), NameRef{t.lexeme, {}});
      case TokenKind::Keyword:
        if (t.lexeme == "True" || t.lexeme == "False") {
          advance();
          return make_expr(t.loc(), BoolLit{t.lexeme == "True"});
        }
        if (auto kind = construct_kind(t.lexeme)) return construct(*kind);
        break;
      case TokenKind::Punct:
        if (t.lexeme == "(") return paren();
        if (t.lexeme == "[") return seq_display();
        if (t.lexeme == "{") return brace_display();
        break;
      default:
        break;
    }
    fail({"expression"});
  }

  static std::optional<ConstructKind> construct_kind(std::string_view word) {
    if (word == "each") return ConstructKind::Each;
    if (word == "some") return ConstructKind::Some;
    if (word == "setof") return ConstructKind::SetOf;
    if (word == "listof") return ConstructKind::ListOf;
    if (word == "sumof") return ConstructKind::SumOf;
    if (word == "productof") return ConstructKind::ProductOf;
    if (word == "countof") return ConstructKind::CountOf;
    if (word == "maxof") return ConstructKind::MaxOf;
    if (word == "minof") return ConstructKind::MinOf;
    return std::nullopt;
  }

  ExprPtr paren() {
    DepthGuard guard(*this);
    const Token& open = advance();
    if (at_punct(")")) {
      advance();
      return make_expr(open.loc(), TupleExpr{});
    }
    ExprPtr first = expression();
    if (at_punct(")")) {
      advance();
      first->parenthesized = true;
      return first;
    }
    TupleExpr tup;
    tup.elems.push_back(std::move(first));
    while (at_punct(",")) {
      advance();
      if (at_punct(")")) break;
      tup.elems.push_back(expression());
    }
    expect_punct(")");
    auto e = make_expr(open.loc(), std::move(tup));
    e->parenthesized = true;
    return e;
  }

  ExprPtr seq_display() {
    DepthGuard guard(*this);
    const Token& open = advance();
    SeqExpr seq;
    while (!at_punct("]")) {
      seq.elems.push_back(expression());
      if (!at_punct(",")) break;
      advance();
    }
    expect_punct("]");
    return make_expr(open.loc(), std::move(seq));
  }

  ExprPtr brace_display() {
    DepthGuard guard(*this);
    const Token& open = advance();
    if (at_punct("}")) {
      advance();
      return make_expr(open.loc(), SetExpr{});
    }
    if (at_punct(":")) {
      advance();
      expect_punct("}");
      return make_expr(open.loc(), MapExpr{});
    }
    ExprPtr first = expression();
    if (at_punct(":")) {
      advance();
      MapExpr m;
      ExprPtr v = expression();
      m.entries.emplace_back(std::move(first), std::move(v));
      while (at_punct(",")) {
        advance();
        if (at_punct("}")) break;
        ExprPtr k = expression();
        expect_punct(":");
        ExprPtr val = expression();
        m.entries.emplace_back(std::move(k), std::move(val));
      }
      expect_punct("}");
      return make_expr(open.loc(), std::move(m));
    }
    SetExpr s;
    s.elems.push_back(std::move(first));
    while (at_punct(",")) {
      advance();
      if (at_punct("}")) break;
      s.elems.push_back(expression());
    }
    expect_punct("}");
    return make_expr(open.loc(), std::move(s));
  }

  bool at_has_marker() const {
    return peek().is(TokenKind::Ident, "has") && peek(1).is(TokenKind::Punct, "=");
  }

  Clause clause() {
    Clause c;
    c.loc = peek().loc();
    ExprPtr e = expression();
    auto* bin = e->as<Binary>();
    if (bin && bin->op == BinaryOp::In && !e->parenthesized) {
      c.kind = Clause::Kind::Membership;
      c.pattern = expr_to_pattern(*bin->lhs);
      c.expr = std::move(bin->rhs);
      return c;
    }
    c.kind = Clause::Kind::Condition;
    c.expr = std::move(e);
    return c;
  }

  ExprPtr construct(ConstructKind kind) {
    DepthGuard guard(*this);
    const Token& kw = advance();
    expect_punct("(");
    Construct c;
    c.kind = kind;
    c.loc = kw.loc();
    if (is_quantifier(kind)) {
      while (!at_has_marker()) {
        if (at_punct(")")) fail({"'has='"});
        c.clauses.push_back(clause());
        if (at_punct(")")) fail({"',' followed by 'has='"});
        expect_punct(",");
      }
      if (c.clauses.empty()) fail({"membership clause"});
      advance();
      advance();
      c.body = expression();
    } else {
      c.body = expression();
      if (!at_punct(",")) fail({"',' followed by a membership clause"});
      while (at_punct(",")) {
        advance();
        if (at_has_marker()) fail_at("'has=' is only valid in each/some", peek().loc());
        c.clauses.push_back(clause());
      }
    }
    expect_punct(")");
    return make_expr(kw.loc(), std::move(c));
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int nesting_ = 0;
};

}  // namespace

Pattern expr_to_pattern(const Expr& e) {
  if (const auto* n = e.as<NameRef>()) {
    if (n->name == "_") {
      Pattern p;
      p.kind = Pattern::Kind::Wildcard;
      p.loc = e.loc;
      return p;
    }
    return Pattern::named(n->name, e.loc);
  }
  if (const auto* t = e.as<TupleExpr>()) {
    Pattern p;
    p.kind = Pattern::Kind::Tuple;
    p.loc = e.loc;
    for (const auto& el : t->elems) p.elems.push_back(expr_to_pattern(*el));
    return p;
  }
  throw ParseError("expected a pattern (identifier, '_' or tuple of patterns)", e.loc,
                   {"identifier", "'_'", "tuple pattern"});
}

Program parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Program parse_source(std::string_view source) { return parse(lex(source)); }

ExprPtr parse_expression(std::string_view source) {
  const auto tokens = lex(source);
  return Parser(tokens).lone_expression();
}

Pattern parse_pattern(std::string_view source) {
  const auto tokens = lex(source);
  return Parser(tokens).lone_pattern();
}

}  // namespace dml

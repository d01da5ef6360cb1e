#include "dml/resolver.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

namespace dml {

namespace {

constexpr std::array kBuiltins = {"print", "len", "keys", "range", "set", "list", "sorted", "abs"};

std::string resolve_message(ResolveErrorKind kind, const std::string& name) {
  switch (kind) {
    case ResolveErrorKind::UnrestrictedLogicVar:
      return "logic variable '" + name + "' is not bound by any membership clause";
    case ResolveErrorKind::UnboundName:
      return "name '" + name + "' is not bound";
    case ResolveErrorKind::DuplicateParam:
      return "duplicate parameter '" + name + "'";
  }
  return name;
}

void pattern_names(const Pattern& p, std::vector<const Pattern*>& out) {
  if (p.kind == Pattern::Kind::Name) out.push_back(&p);
  for (const auto& e : p.elems) pattern_names(e, out);
}

void mutable_pattern_names(Pattern& p, std::vector<Pattern*>& out) {
  if (p.kind == Pattern::Kind::Name) out.push_back(&p);
  for (auto& e : p.elems) mutable_pattern_names(e, out);
}

bool has_wildcard(const Pattern& p) {
  if (p.kind == Pattern::Kind::Wildcard) return true;
  return std::any_of(p.elems.begin(), p.elems.end(), has_wildcard);
}

// Names an expression may bind as `some` witnesses (over-approximation).
void collect_some_patterns(const Expr& e, std::set<std::string>& out) {
  for_each_construct(e, [&](const Construct& c) {
    if (c.kind != ConstructKind::Some) return;
    for (const auto& cl : c.clauses) {
      if (cl.kind != Clause::Kind::Membership) continue;
      std::vector<const Pattern*> names;
      pattern_names(cl.pattern, names);
      for (const Pattern* p : names) out.insert(p->name);
    }
  });
}

// Names assigned anywhere in a block, without descending into nested defs.
void collect_assigned(const Block& block, std::set<std::string>& out) {
  auto add_pattern = [&](const Pattern& p) {
    std::vector<const Pattern*> names;
    pattern_names(p, names);
    for (const Pattern* n : names) out.insert(n->name);
  };
  for (const auto& s : block) {
    if (const auto* a = s->as<AssignStmt>()) {
      add_pattern(a->target);
      collect_some_patterns(*a->value, out);
    } else if (const auto* e = s->as<ExprStmt>()) {
      collect_some_patterns(*e->expr, out);
    } else if (const auto* f = s->as<FuncDef>()) {
      out.insert(f->name);
    } else if (const auto* r = s->as<ReturnStmt>()) {
      if (r->value) collect_some_patterns(*r->value, out);
    } else if (const auto* i = s->as<IfStmt>()) {
      for (const auto& [cond, body] : i->branches) {
        collect_some_patterns(*cond, out);
        collect_assigned(body, out);
      }
      collect_assigned(i->else_body, out);
    } else if (const auto* w = s->as<WhileStmt>()) {
      collect_some_patterns(*w->cond, out);
      collect_assigned(w->body, out);
    } else if (const auto* fo = s->as<ForStmt>()) {
      add_pattern(fo->target);
      collect_some_patterns(*fo->iterable, out);
      collect_assigned(fo->body, out);
    }
  }
}

class Resolver {
 public:
  explicit Resolver(const ResolveOptions& opts) : opts_(opts), next_id_(opts.first_construct_id) {}

  void resolve_program(Program& program, ResolvedProgram* out, bool functions_only) {
    out_ = out;
    for (const auto& g : opts_.known_globals) {
      globals_.all.insert(g);
      globals_.bound.insert(g);
    }
    collect_assigned(program.body, globals_.all);
    functions_only_ = functions_only;
    scope_ = &globals_;
    resolve_block(program.body);
  }

 private:
  struct Scope {
    bool is_function = false;
    std::set<std::string> all;
    std::set<std::string> bound;
  };

  struct Frame {
    Construct* construct;
    std::map<std::string, int> vars;
  };

  bool in_source_ = false;

  [[noreturn]] void fail(ResolveErrorKind kind, const std::string& name, SourceLoc loc) {
    throw ResolveError(kind, name, loc);
  }

  bool bound_here(const std::string& name) const {
    for (const auto& f : frames_)
      if (f.vars.count(name)) return true;
    return scope_->bound.count(name) > 0;
  }

  Binding lookup(const std::string& name, SourceLoc loc) {
    for (int d = static_cast<int>(frames_.size()) - 1; d >= 0; --d) {
      auto it = frames_[static_cast<std::size_t>(d)].vars.find(name);
      if (it != frames_[static_cast<std::size_t>(d)].vars.end())
        return Binding{Binding::Kind::Logic, d, it->second};
    }
    const bool in_construct = !frames_.empty();
    if (scope_->is_function) {
      if (scope_->all.count(name) && (!in_construct || scope_->bound.count(name)))
        return Binding{Binding::Kind::Local};
      if (globals_.all.count(name) || opts_.lenient_function_globals)
        if (!is_builtin(name) || globals_.all.count(name)) return Binding{Binding::Kind::Global};
    } else {
      if (globals_.bound.count(name)) return Binding{Binding::Kind::Global};
      if (!in_construct && globals_.all.count(name)) return Binding{Binding::Kind::Global};
    }
    if (is_builtin(name)) return Binding{Binding::Kind::Builtin};
    // A name in a membership source is never a logic variable candidate.
    fail(in_construct && !in_source_ ? ResolveErrorKind::UnrestrictedLogicVar : ResolveErrorKind::UnboundName,
         name, loc);
  }

  VarClass classify(const Binding& b) const {
    VarClass vc;
    const int innermost = static_cast<int>(frames_.size()) - 1;
    switch (b.kind) {
      case Binding::Kind::Logic:
        if (b.depth == innermost) {
          vc.kind = VarClass::Kind::LogicVar;
          vc.construct_id = frames_.back().construct->id;
          vc.var_id = b.slot;
        } else {
          vc.kind = VarClass::Kind::OuterRef;
          vc.scope_depth = innermost - b.depth;
        }
        break;
      case Binding::Kind::Local:
        vc.kind = VarClass::Kind::OuterRef;
        vc.scope_depth = innermost + 1;
        break;
      case Binding::Kind::Global:
        vc.kind = VarClass::Kind::OuterRef;
        vc.scope_depth = innermost + 1 + (scope_->is_function ? 1 : 0);
        break;
      default:
        vc.kind = VarClass::Kind::Builtin;
    }
    return vc;
  }

  void record(const std::string& name, SourceLoc loc, const Binding& b, bool in_pattern) {
    if (out_) out_->occurrences.push_back(Occurrence{name, loc, classify(b), in_pattern});
  }

  void flush_witnesses() {
    for (auto& w : pending_witnesses_) scope_->bound.insert(w);
    pending_witnesses_.clear();
  }

  // Binds the names of an assignment or for-loop target in the current scope.
  void bind_target(Pattern& p) {
    std::vector<Pattern*> names;
    mutable_pattern_names(p, names);
    for (Pattern* n : names) {
      n->binding = Binding{scope_->is_function ? Binding::Kind::Local : Binding::Kind::Global};
      scope_->bound.insert(n->name);
      record(n->name, n->loc, n->binding, true);
    }
  }

  void resolve_block(Block& block) {
    for (auto& s : block) resolve_stmt(*s);
  }

  void resolve_stmt(Stmt& s) {
    if (functions_only_ && !s.as<FuncDef>()) {
      // Track top-level bindings so functions see the same globals.
      return;
    }
    std::visit([&](auto& n) { stmt(n); }, s.node);
  }

  void stmt(AssignStmt& a) {
    expr(*a.value);
    flush_witnesses();
    bind_target(a.target);
  }
  void stmt(ExprStmt& e) {
    expr(*e.expr);
    flush_witnesses();
  }
  void stmt(FuncDef& f) {
    globals_.bound.insert(f.name);
    Scope fn;
    fn.is_function = true;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (!fn.bound.insert(f.params[i]).second)
        fail(ResolveErrorKind::DuplicateParam, f.params[i], f.param_locs[i]);
    }
    fn.all = fn.bound;
    collect_assigned(f.body, fn.all);
    Scope* saved = scope_;
    scope_ = &fn;
    resolve_block(f.body);
    scope_ = saved;
    f.locals = f.params;
    for (const auto& n : fn.all)
      if (std::find(f.params.begin(), f.params.end(), n) == f.params.end()) f.locals.push_back(n);
  }
  void stmt(ReturnStmt& r) {
    if (r.value) expr(*r.value);
    flush_witnesses();
  }
  void stmt(IfStmt& i) {
    for (auto& [cond, body] : i.branches) {
      expr(*cond);
      flush_witnesses();
      resolve_block(body);
    }
    resolve_block(i.else_body);
  }
  void stmt(WhileStmt& w) {
    expr(*w.cond);
    flush_witnesses();
    resolve_block(w.body);
  }
  void stmt(ForStmt& f) {
    expr(*f.iterable);
    flush_witnesses();
    bind_target(f.target);
    resolve_block(f.body);
  }

  void expr(Expr& e) {
    if (auto* n = e.as<NameRef>()) {
      n->binding = lookup(n->name, e.loc);
      record(n->name, e.loc, n->binding, false);
      return;
    }
    if (auto* c = e.as<Construct>()) {
      construct(*c);
      return;
    }
    for_each_child(e, [&](Expr& child) { expr(child); });
  }

  static void collect_deps(const Expr& e, int depth, std::set<int>& out) {
    if (const auto* n = e.as<NameRef>()) {
      if (n->binding.is_logic_at(depth)) out.insert(n->binding.slot);
      return;
    }
    if (const auto* c = e.as<Construct>()) {
      for (const auto& cl : c->clauses) {
        collect_deps(*cl.expr, depth, out);
        if (cl.kind == Clause::Kind::Membership) collect_pattern_deps(cl.pattern, depth, out);
      }
      collect_deps(*c->body, depth, out);
      return;
    }
    for_each_child(e, [&](const Expr& child) { collect_deps(child, depth, out); });
  }

  // Patterns of nested constructs may constrain against our variables.
  static void collect_pattern_deps(const Pattern& p, int depth, std::set<int>& out) {
    if (p.kind == Pattern::Kind::Name && p.binding.is_logic_at(depth)) out.insert(p.binding.slot);
    for (const auto& e : p.elems) collect_pattern_deps(e, depth, out);
  }

  void construct(Construct& c) {
    c.id = next_id_++;
    c.depth = static_cast<int>(frames_.size());
    if (out_) out_->constructs.push_back(&c);

    std::set<std::string> fresh;
    for (auto& cl : c.clauses) {
      if (cl.kind != Clause::Kind::Membership) continue;
      std::vector<Pattern*> names;
      mutable_pattern_names(cl.pattern, names);
      for (Pattern* p : names)
        if (!bound_here(p->name)) fresh.insert(p->name);
    }
    c.vars.assign(fresh.begin(), fresh.end());
    Frame frame{&c, {}};
    for (std::size_t i = 0; i < c.vars.size(); ++i) frame.vars[c.vars[i]] = static_cast<int>(i);

    // Constraint names resolve against the enclosing scopes.
    for (auto& cl : c.clauses) {
      if (cl.kind != Clause::Kind::Membership) continue;
      std::vector<Pattern*> names;
      mutable_pattern_names(cl.pattern, names);
      for (Pattern* p : names)
        if (!frame.vars.count(p->name)) p->binding = lookup(p->name, p->loc);
    }

    frames_.push_back(std::move(frame));
    const std::map<std::string, int>& vars = frames_.back().vars;

    c.restriction.assign(c.vars.size(), -1);
    c.clause_binds.assign(c.clauses.size(), {});
    c.clause_wild.assign(c.clauses.size(), false);
    c.witnesses.clear();
    for (std::size_t ci = 0; ci < c.clauses.size(); ++ci) {
      auto& cl = c.clauses[ci];
      if (cl.kind != Clause::Kind::Membership) continue;
      c.clause_wild[ci] = has_wildcard(cl.pattern);
      std::vector<Pattern*> names;
      mutable_pattern_names(cl.pattern, names);
      for (Pattern* p : names) {
        auto it = vars.find(p->name);
        if (it != vars.end()) {
          const int slot = it->second;
          p->binding = Binding{Binding::Kind::Logic, c.depth, slot};
          auto& binds = c.clause_binds[ci];
          if (std::find(binds.begin(), binds.end(), slot) == binds.end()) binds.push_back(slot);
          if (c.restriction[static_cast<std::size_t>(slot)] < 0)
            c.restriction[static_cast<std::size_t>(slot)] = static_cast<int>(ci);
          if (c.kind == ConstructKind::Some &&
              std::find(c.witnesses.begin(), c.witnesses.end(), slot) == c.witnesses.end())
            c.witnesses.push_back(slot);
        }
        record(p->name, p->loc, p->binding, true);
      }
    }

    const bool outer_source = in_source_;
    for (auto& cl : c.clauses) {
      in_source_ = cl.kind == Clause::Kind::Membership;
      expr(*cl.expr);
    }
    in_source_ = false;
    expr(*c.body);
    in_source_ = outer_source;

    c.clause_deps.assign(c.clauses.size(), {});
    for (std::size_t ci = 0; ci < c.clauses.size(); ++ci) {
      std::set<int> deps;
      collect_deps(*c.clauses[ci].expr, c.depth, deps);
      c.clause_deps[ci].assign(deps.begin(), deps.end());
    }

    frames_.pop_back();
    if (c.kind == ConstructKind::Some)
      for (int w : c.witnesses) pending_witnesses_.insert(c.vars[static_cast<std::size_t>(w)]);
  }

  const ResolveOptions& opts_;
  ResolvedProgram* out_ = nullptr;
  int next_id_;
  bool functions_only_ = false;
  Scope globals_;
  Scope* scope_ = nullptr;
  std::vector<Frame> frames_;
  std::set<std::string> pending_witnesses_;
};

}  // namespace

std::string_view to_string(ResolveErrorKind kind) {
  switch (kind) {
    case ResolveErrorKind::UnrestrictedLogicVar: return "UnrestrictedLogicVar";
    case ResolveErrorKind::UnboundName: return "UnboundName";
    case ResolveErrorKind::DuplicateParam: return "DuplicateParam";
  }
  return "?";
}

ResolveError::ResolveError(ResolveErrorKind kind, std::string name, SourceLoc loc)
    : StaticError(std::string(to_string(kind)), resolve_message(kind, name), loc),
      kind_(kind),
      name_(std::move(name)) {}

bool is_builtin(std::string_view name) {
  return std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end();
}

ResolvedProgram resolve(std::shared_ptr<Program> program, const ResolveOptions& options) {
  ResolvedProgram rp;
  rp.program = program;
  rp.first_construct_id = options.first_construct_id;
  Resolver r(options);
  r.resolve_program(*program, &rp, false);
  return rp;
}

std::vector<int> witness_vars(int construct_id, const ResolvedProgram& rp) {
  const Construct& c = rp.construct(construct_id);
  if (c.kind != ConstructKind::Some) return {};
  return c.witnesses;
}

void check_function_scopes(Program& program) {
  ResolveOptions opts;
  Resolver r(opts);
  r.resolve_program(program, nullptr, true);
}

}  // namespace dml

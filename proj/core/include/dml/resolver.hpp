#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dml/ast.hpp"
#include "dml/diagnostics.hpp"

namespace dml {

enum class ResolveErrorKind { UnrestrictedLogicVar, UnboundName, DuplicateParam };

std::string_view to_string(ResolveErrorKind kind);

class ResolveError : public StaticError {
 public:
  ResolveError(ResolveErrorKind kind, std::string name, SourceLoc loc);

  ResolveErrorKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  ResolveErrorKind kind_;
  std::string name_;
};

/// Classification of one name occurrence relative to the innermost
/// declarative construct enclosing it.
struct VarClass {
  enum class Kind { LogicVar, OuterRef, Builtin };
  Kind kind = Kind::Builtin;
  int construct_id = -1;  // LogicVar
  int var_id = -1;        // LogicVar
  int scope_depth = 0;    // OuterRef: scopes crossed outward

  friend bool operator==(const VarClass&, const VarClass&) = default;
};

struct Occurrence {
  std::string name;
  SourceLoc loc;
  VarClass cls;
  bool in_pattern = false;
};

struct ResolveOptions {
  /// Globals already bound before this program runs (the REPL session).
  std::vector<std::string> known_globals;
  /// Let function bodies refer to globals that do not exist yet.
  bool lenient_function_globals = false;
  int first_construct_id = 0;
};

struct ResolvedProgram {
  std::shared_ptr<Program> program;
  /// Indexed by construct id minus first_construct_id.
  std::vector<const Construct*> constructs;
  std::vector<Occurrence> occurrences;
  int first_construct_id = 0;

  const Construct& construct(int id) const {
    return *constructs[static_cast<std::size_t>(id - first_construct_id)];
  }
};

/// Annotates every name in `program` with its binding and checks range
/// restriction. Throws ResolveError.
ResolvedProgram resolve(std::shared_ptr<Program> program, const ResolveOptions& options = {});

/// Logic variables a true `some` writes back, in clause order then pattern
/// order. Empty for every other construct.
std::vector<int> witness_vars(int construct_id, const ResolvedProgram& rp);

/// Resolves only the function definitions of `program` against its globals
/// (rejecting duplicate parameters and unbound names).
void check_function_scopes(Program& program);

bool is_builtin(std::string_view name);

}  // namespace dml

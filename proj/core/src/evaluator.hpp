#pragma once

// Internal to the runtime: the machinery shared by the statement executor,
// the direct construct evaluator and the IR executor.

#include <string>
#include <unordered_map>
#include <vector>

#include "dml/runtime.hpp"

namespace dml {

/// One function activation (or the top level, with no locals).
struct Activation {
  std::unordered_map<std::string, Value>* locals = nullptr;
  /// Logic-variable frames of the constructs being evaluated, by depth.
  std::vector<std::vector<Value>> frames;
  Value return_value;
};

/// Pushes a construct's logic-variable frame for the duration of a scope.
class FrameGuard {
 public:
  FrameGuard(Activation& act, std::size_t nvars) : act_(act) { act_.frames.emplace_back(nvars); }
  ~FrameGuard() { act_.frames.pop_back(); }
  FrameGuard(const FrameGuard&) = delete;
  FrameGuard& operator=(const FrameGuard&) = delete;

  std::vector<Value>& frame() { return act_.frames.back(); }

 private:
  Activation& act_;
};

RuntimeErrorKind to_runtime_kind(ValueErrorKind kind);

/// Folds the head values of a comprehension or aggregation.
class Accumulator {
 public:
  Accumulator(AccKind kind, SourceLoc loc) : kind_(kind), loc_(loc) {}

  void add(const Value& v);
  Value result() const;

 private:
  AccKind kind_;
  SourceLoc loc_;
  SetRep set_;
  std::vector<Value> list_;
  std::int64_t num_ = 0;
  bool seeded_ = false;
  Value best_;
};

class Evaluator {
 public:
  explicit Evaluator(Interpreter& interp) : in_(interp) {}

  enum class Flow { Normal, Return };

  Value eval(const Expr& e, Activation& act);
  bool eval_bool(const Expr& e, Activation& act);
  Flow exec_block(const Block& block, Activation& act);
  Value call_function(const Value& callee, std::vector<Value> args, SourceLoc loc);

  // Constructs.
  Value eval_construct(const Construct& c, Activation& act);
  Value eval_construct_direct(const Construct& c, Activation& act);
  Value exec_ir(const LoopIr& ir, Activation& act);

  // Pattern helpers shared by both construct paths. `bound` flags the
  // construct's own variables that already hold a value; matching binds the
  // rest and sets their flags.
  bool match(const Pattern& p, const Value& v, Activation& act, int depth,
             std::vector<char>& bound);
  Value pattern_value(const Pattern& p, Activation& act);
  void write_witnesses(const Construct& c, Activation& act);
  std::vector<Value> read_witnesses(const Construct& c, Activation& act);

  Value lookup(const Binding& b, const std::string& name, Activation& act, SourceLoc loc);
  void store(const Binding& b, const std::string& name, Value v, Activation& act);
  void assign_target(const Pattern& p, const Value& v, Activation& act, SourceLoc loc);

  Value call_builtin(const std::string& name, std::vector<Value>& args, SourceLoc loc);

  ExecStats& stats() { return in_.stats_; }
  const ExecOptions& options() const { return in_.opts_; }

  Flow exec_stmt(const Stmt& s, Activation& act);

 private:
  Value eval_inner(const Expr& e, Activation& act);
  Value eval_binary(const Binary& b, const Expr& e, Activation& act);
  Value eval_differential(const Construct& c, Activation& act);

  Interpreter& in_;

 public:
  std::shared_ptr<const CompiledUnit> unit;  // owner of functions defined now
};

/// Throws TypeMismatch unless `v` can be a membership source.
void require_collection(const Value& v, SourceLoc loc);

}  // namespace dml

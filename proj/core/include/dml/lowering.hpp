#pragma once

#include <string>
#include <vector>

#include "dml/ast.hpp"
#include "dml/diagnostics.hpp"
#include "dml/resolver.hpp"

namespace dml {

enum class PlanStrategy {
  /// Earliest schedulable membership clause first, in source order.
  Greedy,
  /// Containment tests first, then the smallest literal source.
  Sized,
};

class PlanError : public StaticError {
 public:
  PlanError(const std::string& message, SourceLoc loc) : StaticError("PlanError", message, loc) {}
};

struct PlanStep {
  enum class Kind {
    Loop,    // iterate the source, binding fresh pattern variables
    Test,    // every pattern variable already bound: containment test
    Filter,  // condition clause
  };
  Kind kind;
  int clause;
  /// Loop only: own variable ids first bound by this step.
  std::vector<int> binds;
  std::vector<int> bound_before;
  std::vector<int> bound_after;
};

struct Plan {
  std::vector<PlanStep> steps;
};

/// Orders the clauses of a resolved construct so each membership source and
/// each condition only mentions variables bound earlier. Throws PlanError.
Plan plan_clauses(const Construct& construct, PlanStrategy strategy = PlanStrategy::Greedy);

enum class AccKind { Set, List, Sum, Product, Count, Max, Min, All, Any };

std::string_view to_string(AccKind kind);
AccKind acc_kind_for(ConstructKind kind);

struct IrNode {
  enum class Op {
    Seq,
    AccInit,
    LoopOver,      // for pattern in expr: body
    IfMember,      // if pattern-value in expr: body
    If,            // if [not] expr: body
    AccUpdate,     // acc <- expr
    StoreWitness,  // copy `vars` into the enclosing scope
    BreakOut,      // result <- exit_value, leave the construct
    Result,
  };
  Op op = Op::Seq;
  const Pattern* pattern = nullptr;
  const Expr* expr = nullptr;
  bool negate = false;
  bool exit_value = false;
  std::vector<int> vars;
  std::vector<IrNode> body;
};

/// Imperative form of one construct. Immutable after lowering; points into
/// the AST it was lowered from.
struct LoopIr {
  const Construct* construct = nullptr;
  AccKind acc = AccKind::Sum;
  Plan plan;
  IrNode root;
};

LoopIr lower_quant(const Construct& quant, const Plan& plan);
LoopIr lower_compr_aggr(const Construct& construct, const Plan& plan);
LoopIr lower(const Construct& construct, PlanStrategy strategy = PlanStrategy::Greedy);

/// Indented pseudocode, deterministic.
std::string dump_ir(const LoopIr& ir);

struct LoweredProgram {
  int first_construct_id = 0;
  std::vector<LoopIr> irs;  // by construct id - first_construct_id

  const LoopIr& at(int construct_id) const {
    return irs[static_cast<std::size_t>(construct_id - first_construct_id)];
  }
};

LoweredProgram lower_program(const ResolvedProgram& rp, PlanStrategy strategy = PlanStrategy::Greedy);

}  // namespace dml

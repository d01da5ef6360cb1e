#pragma once

#include <string>
#include <vector>

#include "dml/driver.hpp"
#include "dml/runtime.hpp"

namespace dmltest {

/// Result of evaluating one expression after a prelude, in a fresh interpreter.
struct Outcome {
  bool ok = false;
  dml::Value value;
  std::string error;  // runtime tag, or "static:<tag>"
  std::string output;
  dml::ExecStats stats;
  std::vector<std::pair<std::string, dml::Value>> globals;
};

Outcome evaluate(const std::string& prelude, const std::string& expr, dml::ExecPath path,
                 dml::PlanStrategy plan = dml::PlanStrategy::Greedy);

/// Same value (or same error kind).
bool same_result(const Outcome& a, const Outcome& b);
std::string describe(const Outcome& o);

std::string corpus_dir();
std::string cli_path();
std::string slurp(const std::string& path);

/// Runs a shell command, capturing stdout; returns the exit status.
int run_command(const std::string& cmd, std::string* out);

}  // namespace dmltest

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dml/runtime.hpp"

namespace dml {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitStatic = 2,
  kExitUsage = 64,
};

struct CliConfig {
  enum class Command { Run, Check, Repl };
  Command command = Command::Run;
  std::string file;
  bool dump_ast = false;
  bool dump_ir = false;
  bool trace = false;
  PlanStrategy plan = PlanStrategy::Greedy;
  ExecPath path = ExecPath::Lowered;
  int recursion_limit = 10000;
};

std::optional<std::string> read_file(const std::string& path);

/// Each returns a process exit code. Program output goes to `out`;
/// diagnostics and traces to `err`.
int run_file(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int check_file(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int run_repl(const CliConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err,
             bool interactive);

/// Runs `source` in a fresh interpreter; used by run_file and by tests.
int run_source(const std::string& source, const std::string& file_label, const CliConfig& cfg,
               std::ostream& out, std::ostream& err);

}  // namespace dml

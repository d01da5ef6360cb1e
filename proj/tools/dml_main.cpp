#include <unistd.h>

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "dml/driver.hpp"

int main(int argc, char** argv) {
  using dml::CliConfig;
  CliConfig cfg;

  CLI::App app{"dml: discrete-math language interpreter"};
  app.require_subcommand(1);

  const std::map<std::string, dml::PlanStrategy> plans{{"greedy", dml::PlanStrategy::Greedy},
                                                       {"sized", dml::PlanStrategy::Sized}};
  const std::map<std::string, dml::ExecPath> paths{{"direct", dml::ExecPath::Direct},
                                                   {"lowered", dml::ExecPath::Lowered},
                                                   {"differential", dml::ExecPath::Differential}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--dump-ast", cfg.dump_ast, "print the syntax tree");
    sub->add_flag("--dump-ir", cfg.dump_ir, "print the loop IR of every construct");
    sub->add_option("--plan", cfg.plan, "clause planning strategy")
        ->transform(CLI::CheckedTransformer(plans, CLI::ignore_case));
    sub->add_option("--path", cfg.path, "execution path for constructs")
        ->transform(CLI::CheckedTransformer(paths, CLI::ignore_case));
    sub->add_flag("--trace", cfg.trace, "trace executed statements on stderr");
    sub->add_option("--recursion-limit", cfg.recursion_limit, "maximum call depth")
        ->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "run a program");
  run->add_option("file", cfg.file, "source file")->required();
  add_common(run);
  auto* check = app.add_subcommand("check", "parse and resolve a program without running it");
  check->add_option("file", cfg.file, "source file")->required();
  add_common(check);
  auto* repl = app.add_subcommand("repl", "interactive session");
  add_common(repl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dml::kExitUsage;
  }

  if (run->parsed()) return dml::run_file(cfg, std::cout, std::cerr);
  if (check->parsed()) {
    cfg.command = CliConfig::Command::Check;
    return dml::check_file(cfg, std::cout, std::cerr);
  }
  cfg.command = CliConfig::Command::Repl;
  return dml::run_repl(cfg, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
}

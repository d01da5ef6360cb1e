#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dml/driver.hpp"
#include "util.hpp"

namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& text) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("dml_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++) + ".dml");
    std::ofstream(path) << text;
  }
  ~TempFile() { fs::remove(path); }
};

int cli(const std::string& args, std::string* out = nullptr) {
  return dmltest::run_command(dmltest::cli_path() + " " + args + " 2>&1", out);
}

}  // namespace

TEST_CASE("exit codes") {
  TempFile ok("print(sumof(x, x in {1, 2}))\n");
  TempFile runtime("print(maxof(x, x in {}))\n");
  TempFile unbound("print(y)\n");
  TempFile unrestricted("s = setof(x, x > 1)\n");
  TempFile syntax("x = (1,\n");
  std::string out;
  CHECK(cli("run " + ok.path.string(), &out) == 0);
  CHECK(out == "3\n");
  CHECK(cli("run " + runtime.path.string(), &out) == 1);
  CHECK(out.find(":1:7: error: EmptyAggregate:") != std::string::npos);
  CHECK(cli("run " + unbound.path.string(), &out) == 2);
  CHECK(out.find("error: UnboundName:") != std::string::npos);
  CHECK(cli("check " + unrestricted.path.string(), &out) == 2);
  CHECK(out.find("error: UnrestrictedLogicVar:") != std::string::npos);
  CHECK(cli("run " + syntax.path.string(), &out) == 2);
  CHECK(out.find("error: ParseError:") != std::string::npos);
  CHECK(cli("check " + runtime.path.string()) == 0);
  CHECK(cli("run /nonexistent/file.dml") == 64);
  CHECK(cli("run") == 64);
  CHECK(cli("frobnicate x.dml") == 64);
  CHECK(cli("run --plan=clever " + ok.path.string()) == 64);
  CHECK(cli("run --path=sideways " + ok.path.string()) == 64);
}

TEST_CASE("check with dumps") {
  TempFile f("S = {1, 2}\nb = some(x in S, x in {2}, has= x > 0)\n");
  std::string out;
  REQUIRE(cli("check --dump-ast --dump-ir " + f.path.string(), &out) == 0);
  CHECK(out.find("(program") != std::string::npos);
  CHECK(out.find("(quant some") != std::string::npos);
  CHECK(out.find("for x in S") != std::string::npos);
  CHECK(out.find("if x in {2}") != std::string::npos);
  std::string again;
  cli("check --dump-ast --dump-ir " + f.path.string(), &again);
  CHECK(out == again);
  std::string sized;
  REQUIRE(cli("check --dump-ir --plan=sized " + f.path.string(), &sized) == 0);
  CHECK(sized.find("for x in {2}") != std::string::npos);
}

TEST_CASE("trace writes one line per executed statement to stderr") {
  TempFile f("x = 1\ny = x + 1\n");
  std::string out;
  REQUIRE(cli("run --trace " + f.path.string(), &out) == 0);
  CHECK(out.find("trace: line 1") != std::string::npos);
  CHECK(out.find("trace: line 2") != std::string::npos);
}

TEST_CASE("recursion limit flag") {
  TempFile f("def f(n):\n    return f(n + 1)\nf(0)\n");
  std::string out;
  CHECK(cli("run --recursion-limit 25 " + f.path.string(), &out) == 1);
  CHECK(out.find("RecursionLimit") != std::string::npos);
  CHECK(cli("run --recursion-limit 0 " + f.path.string()) == 64);
}

TEST_CASE("every corpus program agrees across paths via the CLI") {
  for (const auto& entry : fs::directory_iterator(dmltest::corpus_dir())) {
    if (entry.path().extension() != ".dml") continue;
    std::string direct, lowered, diff;
    CHECK(cli("run --path=direct " + entry.path().string(), &direct) == 0);
    CHECK(cli("run --path=lowered " + entry.path().string(), &lowered) == 0);
    CHECK(cli("run --path=differential " + entry.path().string(), &diff) == 0);
    CHECK_MESSAGE(direct == lowered, entry.path().string());
    CHECK_MESSAGE(direct == diff, entry.path().string());
  }
}

TEST_CASE("run_source reports diagnostics with the file label") {
  dml::CliConfig cfg;
  std::ostringstream out, err;
  CHECK(dml::run_source("x = {1: 2}[3]\n", "mem.dml", cfg, out, err) == dml::kExitRuntime);
  CHECK(err.str().rfind("mem.dml:1:", 0) == 0);
  CHECK(err.str().find("error: KeyMissing:") != std::string::npos);
  CHECK(dml::format_diagnostic("f.dml", {3, 4}, "ParseError", "boom") == "f.dml:3:4: error: ParseError: boom");
}

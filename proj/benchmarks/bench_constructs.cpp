#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "dml/driver.hpp"
#include "dml/runtime.hpp"

// Interpreter entry points run on their own large-stack thread, so wall time is reported.

namespace {

std::string universe(int n) {
  std::string s = "S = set(range(" + std::to_string(n) + "))\n";
  s += "R = setof((a, (a * 7 + 3) % " + std::to_string(n) + "), a in S)\n";
  // inside a function the witnesses of some stay local, so every call does the same work
  s += "def covered(S, R):\n    return each(x in S, has= some((a, b) in R, has= a == x))\n";
  return s;
}

void run_expr(benchmark::State& state, const std::string& expr, dml::ExecPath path) {
  dml::ExecOptions opts;
  opts.path = path;
  std::ostringstream sink;
  opts.out = &sink;
  dml::Interpreter in(opts);
  in.run(universe(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(in.eval(expr));
  state.counters["iterations/eval"] =
      static_cast<double>(in.stats().loop_iterations) / static_cast<double>(state.iterations());
}

void BM_CountPairs(benchmark::State& state, dml::ExecPath path) {
  run_expr(state, "countof((x, y), x in S, y in S, x < y)", path);
}

void BM_JoinTest(benchmark::State& state, dml::ExecPath path) {
  // the second clause is a containment test once x and y are bound
  run_expr(state, "countof(x, (x, y) in R, (y, x) in R)", path);
}

void BM_EachSome(benchmark::State& state, dml::ExecPath path) {
  run_expr(state, "covered(S, R)", path);
}

void BM_Corpus(benchmark::State& state, const char* file) {
  const auto src = dml::read_file(std::string(DML_CORPUS_DIR) + "/" + file);
  if (!src) {
    state.SkipWithError("corpus file missing");
    return;
  }
  dml::CliConfig cfg;
  cfg.path = static_cast<dml::ExecPath>(state.range(0));
  for (auto _ : state) {
    std::ostringstream out, err;
    benchmark::DoNotOptimize(dml::run_source(*src, file, cfg, out, err));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_CountPairs, direct, dml::ExecPath::Direct)->Arg(16)->Arg(64)->UseRealTime();
BENCHMARK_CAPTURE(BM_CountPairs, lowered, dml::ExecPath::Lowered)->Arg(16)->Arg(64)->UseRealTime();
BENCHMARK_CAPTURE(BM_JoinTest, direct, dml::ExecPath::Direct)->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK_CAPTURE(BM_JoinTest, lowered, dml::ExecPath::Lowered)->Arg(64)->Arg(256)->UseRealTime();
BENCHMARK_CAPTURE(BM_EachSome, direct, dml::ExecPath::Direct)->Arg(32)->Arg(128)->UseRealTime();
BENCHMARK_CAPTURE(BM_EachSome, lowered, dml::ExecPath::Lowered)->Arg(32)->Arg(128)->UseRealTime();
BENCHMARK_CAPTURE(BM_Corpus, cafe, "cafe.dml")->DenseRange(0, 2)->UseRealTime();
BENCHMARK_CAPTURE(BM_Corpus, closure, "closure.dml")->DenseRange(0, 2)->UseRealTime();

BENCHMARK_MAIN();

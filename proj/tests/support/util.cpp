#include "util.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>

namespace dmltest {

Outcome evaluate(const std::string& prelude, const std::string& expr, dml::ExecPath path,
                 dml::PlanStrategy plan) {
  Outcome o;
  std::ostringstream out;
  dml::ExecOptions opts;
  opts.path = path;
  opts.plan = plan;
  opts.out = &out;
  dml::Interpreter interp(opts);
  try {
    interp.run(prelude);
    o.value = interp.eval(expr);
    o.ok = true;
  } catch (const dml::StaticError& e) {
    o.error = "static:" + e.tag();
  } catch (const dml::RuntimeError& e) {
    o.error = std::string(dml::to_string(e.kind()));
  } catch (const dml::DifferentialMismatch& e) {
    o.error = std::string("mismatch:") + e.what();
  }
  o.output = out.str();
  o.stats = interp.stats();
  o.globals = interp.globals();
  return o;
}

bool same_result(const Outcome& a, const Outcome& b) {
  if (a.ok != b.ok) return false;
  return a.ok ? dml::value_eq(a.value, b.value) : a.error == b.error;
}

std::string describe(const Outcome& o) { return o.ok ? dml::render(o.value, false) : "error " + o.error; }

std::string corpus_dir() { return DML_CORPUS_DIR; }
std::string cli_path() { return DML_CLI_PATH; }

std::string slurp(const std::string& path) {
  auto text = dml::read_file(path);
  return text ? *text : std::string();
}

int run_command(const std::string& cmd, std::string* out) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  std::array<char, 4096> buf{};
  std::string text;
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  const int status = pclose(pipe);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace dmltest

#include "dml/driver.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "dml/parser.hpp"

namespace dml {

namespace {

ExecOptions exec_options(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  ExecOptions o;
  o.path = cfg.path;
  o.plan = cfg.plan;
  o.recursion_limit = cfg.recursion_limit;
  o.out = &out;
  o.trace = cfg.trace ? &err : nullptr;
  return o;
}

void report(std::ostream& err, const std::string& file, SourceLoc loc, std::string_view tag,
            std::string_view msg) {
  err << format_diagnostic(file, loc, tag, msg) << '\n';
}

void dump_unit(const CliConfig& cfg, const CompiledUnit& unit, std::ostream& out) {
  if (cfg.dump_ast) out << dump_ast(*unit.program);
  if (cfg.dump_ir)
    for (const LoopIr& ir : unit.lowered.irs) out << dump_ir(ir);
}

// Runs `body`, mapping every language error to a diagnostic and exit code.
template <class F>
int guarded(const std::string& file, std::ostream& out, std::ostream& err, F&& body) {
  try {
    body();
    out.flush();
    return kExitOk;
  } catch (const StaticError& e) {
    out.flush();
    report(err, file, e.loc(), e.tag(), e.what());
    return kExitStatic;
  } catch (const RuntimeError& e) {
    out.flush();
    report(err, file, e.loc(), to_string(e.kind()), e.what());
    return kExitRuntime;
  } catch (const DifferentialMismatch& e) {
    out.flush();
    report(err, file, e.loc(), "DifferentialMismatch", e.what());
    return kExitRuntime;
  }
}

int open_bracket_depth(const std::string& text) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quote) {
      if (ch == '\\') ++i;
      else if (ch == quote) quote = 0;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (ch == '\'' || ch == '"') {
      quote = ch;
    } else if (ch == '(' || ch == '[' || ch == '{') {
      ++depth;
    } else if (ch == ')' || ch == ']' || ch == '}') {
      --depth;
    }
  }
  return depth;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

int run_source(const std::string& source, const std::string& file_label, const CliConfig& cfg,
               std::ostream& out, std::ostream& err) {
  Interpreter interp(exec_options(cfg, out, err));
  return guarded(file_label, out, err, [&] {
    auto unit = interp.compile(source);
    dump_unit(cfg, *unit, out);
    interp.execute(unit);
  });
}

int run_file(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  auto source = read_file(cfg.file);
  if (!source) {
    err << "dml: cannot read '" << cfg.file << "'\n";
    return kExitUsage;
  }
  return run_source(*source, cfg.file, cfg, out, err);
}

int check_file(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  auto source = read_file(cfg.file);
  if (!source) {
    err << "dml: cannot read '" << cfg.file << "'\n";
    return kExitUsage;
  }
  Interpreter interp(exec_options(cfg, out, err));
  return guarded(cfg.file, out, err, [&] { dump_unit(cfg, *interp.compile(*source), out); });
}

int run_repl(const CliConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err,
             bool interactive) {
  ExecOptions opts = exec_options(cfg, out, err);
  opts.lenient_function_globals = true;
  Interpreter interp(opts);
  const std::string label = "<repl>";

  std::string buffer;
  bool block = false;
  std::string line;
  for (;;) {
    if (interactive) {
      out << (buffer.empty() ? ">>> " : "... ");
      out.flush();
    }
    if (!std::getline(in, line)) {
      if (buffer.empty()) break;
      line.clear();
    }
    const bool at_eof = in.eof();
    const std::string t = trim(line);

    if (buffer.empty()) {
      if (t.empty()) {
        if (at_eof) break;
        continue;
      }
      if (t == ":quit" || t == ":q") break;
      if (t == ":env") {
        for (const auto& [name, value] : interp.globals()) out << name << " = " << render(value, false) << '\n';
        continue;
      }
      if (t.rfind(":ir", 0) == 0) {
        const std::string expr = trim(t.substr(3));
        guarded(label, out, err, [&] {
          auto unit = interp.compile(expr);
          if (unit->lowered.irs.empty()) out << "(no constructs)\n";
          for (const LoopIr& ir : unit->lowered.irs) out << dump_ir(ir);
        });
        continue;
      }
      if (t[0] == ':') {
        err << label << ": unknown command '" << t << "'\n";
        continue;
      }
      block = t.back() == ':';
    }

    buffer += line;
    buffer += '\n';
    const bool incomplete = open_bracket_depth(buffer) > 0 || (block && !t.empty());
    if (incomplete && !at_eof) continue;

    const std::string src = buffer;
    buffer.clear();
    block = false;
    guarded(label, out, err, [&] {
      auto unit = interp.compile(src);
      dump_unit(cfg, *unit, out);
      auto value = interp.execute(unit, true);
      if (value && !value->is(Value::Kind::None)) out << render(*value) << '\n';
    });
    if (at_eof) break;
  }
  return kExitOk;
}

}  // namespace dml

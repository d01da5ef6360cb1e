// Acceptance suite: one PASS/FAIL line per criterion.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dml/driver.hpp"
#include "dml/parser.hpp"
#include "gen.hpp"
#include "util.hpp"

using namespace dmltest;
using dml::ExecPath;
using dml::Value;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail = why;
    pass = pass && ok;
  }
};

const std::vector<std::string> kCorpus = {"cafe", "tarski", "gcd", "hanoi", "relations", "functions", "closure"};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int run_program(const std::string& source, ExecPath path, std::string* out, std::string* err = nullptr) {
  dml::CliConfig cfg;
  cfg.path = path;
  std::ostringstream o, e;
  const int code = dml::run_source(source, "<test>", cfg, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

Value int_pair(int a, int b) { return Value::tuple({Value::integer(a), Value::integer(b)}); }

Value pair_set(const std::set<std::pair<int, int>>& pairs) {
  std::vector<Value> elems;
  for (auto [a, b] : pairs) elems.push_back(int_pair(a, b));
  return Value::set(elems);
}

Value int_set(const std::vector<int>& xs) {
  std::vector<Value> elems;
  for (int x : xs) elems.push_back(Value::integer(x));
  return Value::set(elems);
}

// ---------------------------------------------------------------------------

Verdict cafe_fidelity() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::string source = slurp(corpus_dir() + "/cafe.dml");

  // The listing, line by line, as it must appear in the fixture.
  const std::vector<std::string> listing = {
      "salads = {'green salad', 'fruit salad'}",
      "main_courses = {'spaghetti', 'fish'}",
      "desserts = {'pie', 'cake'}",
      "beverages = {'milk', 'soda', 'coffee'}",
      "stations = [salads, main_courses, desserts, beverages]",
      "choices = {",
      "  'Uta': {'green salad', 'spaghetti', 'pie', 'milk'},",
      "  'Tim': {'fruit salad', 'fish', 'pie', 'cake', 'milk', 'coffee'},",
      "  'Yuen': {'spaghetti', 'fish', 'pie', 'soda'} }",
      "students = choices.keys()",
      "items = setof(item, sta in stations, item in sta)",
      "def chose(student, item): return item in choices[student]",
  };
  std::size_t at = 0;
  for (const auto& line : listing) {
    const auto pos = source.find(line + "\n", at);
    v.require(pos != std::string::npos, "listing line missing or out of order: " + line);
    if (pos != std::string::npos) at = pos + line.size();
  }
  const std::string statement = "some(I in items, has= each(S in students, has= chose(S,I)))";
  v.require(source.find("print(" + statement + ")\nprint(I)\n") != std::string::npos,
            "statement 1 and its witness print are not in the fixture");

  // Independent oracle: items chosen by every student.
  const std::map<std::string, std::set<std::string>> choices = {
      {"Uta", {"green salad", "spaghetti", "pie", "milk"}},
      {"Tim", {"fruit salad", "fish", "pie", "cake", "milk", "coffee"}},
      {"Yuen", {"spaghetti", "fish", "pie", "soda"}}};
  std::set<std::string> common = choices.begin()->second;
  for (const auto& [name, chosen] : choices) {
    std::set<std::string> next;
    std::set_intersection(common.begin(), common.end(), chosen.begin(), chosen.end(),
                          std::inserter(next, next.end()));
    common = next;
  }
  v.require(common.size() == 1, "oracle intersection is not a single item");
  const std::string expected_witness = *common.begin();

  for (ExecPath path : {ExecPath::Lowered, ExecPath::Direct}) {
    std::string out, err;
    const int code = run_program(source, path, &out, &err);
    v.require(code == 0, "cafe exited " + std::to_string(code) + ": " + err);
    const auto lines = lines_of(out);
    v.require(lines.size() >= 3 && lines[1] == "True" && lines[2] == expected_witness,
              "statement 1 printed unexpected output:\n" + out);
  }
  const double secs = seconds_since(t0);
  v.require(secs < 1.0, "took " + std::to_string(secs) + " s");
  if (v.pass) v.detail = "True, I = " + expected_witness + " on both paths in " + std::to_string(secs) + " s";
  return v;
}

Verdict differential_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  std::uint64_t corpus_constructs = 0;
  for (const auto& name : kCorpus) {
    std::ostringstream out;
    dml::ExecOptions opts;
    opts.path = ExecPath::Differential;
    opts.out = &out;
    dml::Interpreter interp(opts);
    try {
      interp.run(slurp(corpus_dir() + "/" + name + ".dml"));
    } catch (const std::exception& e) {
      v.require(false, name + ": " + e.what());
    }
    corpus_constructs += interp.stats().differential_checks;
    v.require(out.str() == slurp(corpus_dir() + "/" + name + ".golden"), name + ": output differs from golden");
  }

  Generator gen(20240601);
  GenOptions opts;
  opts.max_clauses = 3;
  opts.max_depth = 2;
  int mismatches = 0;
  int errors_agreed = 0;
  const int kInstances = 1500;
  for (int i = 0; i < kInstances; ++i) {
    const std::string prelude = gen.universe();
    const std::string expr = gen.construct(opts).text();
    const Outcome d = evaluate(prelude, expr, ExecPath::Direct);
    const Outcome l = evaluate(prelude, expr, ExecPath::Lowered);
    const Outcome both = evaluate(prelude, expr, ExecPath::Differential);
    bool same = same_result(d, l) && same_result(d, both) && d.error.rfind("static:", 0) != 0;
    if (same && d.ok) {
      same = d.globals.size() == l.globals.size();
      for (std::size_t k = 0; same && k < d.globals.size(); ++k)
        same = d.globals[k].first == l.globals[k].first && dml::value_eq(d.globals[k].second, l.globals[k].second);
    }
    if (!d.ok && same) ++errors_agreed;
    if (!same) {
      ++mismatches;
      v.require(false, "mismatch on " + expr + " with\n" + prelude + "direct: " + describe(d) +
                           ", lowered: " + describe(l) + ", differential: " + describe(both));
    }
  }
  const double secs = seconds_since(t0);
  v.require(corpus_constructs > 0, "no corpus constructs were checked");
  v.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (v.pass)
    v.detail = std::to_string(corpus_constructs) + " corpus construct evaluations, " +
               std::to_string(kInstances) + " random constructs (" + std::to_string(errors_agreed) +
               " agreeing errors), 0 mismatches, " + std::to_string(secs) + " s";
  else
    v.detail += " [" + std::to_string(mismatches) + " mismatches]";
  return v;
}

Value sorted_if_list(const Outcome& o) {
  if (!o.ok || !o.value.is(Value::Kind::Seq)) return o.value;
  std::vector<Value> elems = o.value.seq_elems();
  std::sort(elems.begin(), elems.end(), [](const Value& a, const Value& b) { return dml::value_cmp(a, b) < 0; });
  return Value::seq(elems);
}

Verdict permutation_invariance() {
  Verdict v;
  Generator gen(777);
  GenOptions opts;
  opts.max_clauses = 4;
  opts.allow_sequences = false;  // duplicates in a sequence make multiplicity order-dependent
  opts.max_depth = 2;
  int constructs = 0;
  int permutations_run = 0;
  int violations = 0;
  for (int attempt = 0; constructs < 300 && attempt < 5000; ++attempt) {
    const std::string prelude = gen.universe();
    const GenConstruct g = gen.construct(opts);
    if (g.clauses.size() < 2) continue;
    ++constructs;
    std::optional<Outcome> first;
    for (const auto& order : permutations(g.clauses.size())) {
      const Outcome o = evaluate(prelude, g.text(order), ExecPath::Lowered);
      if (o.error == "static:PlanError") continue;  // not a resolvable order
      ++permutations_run;
      if (!first) {
        first = o;
        continue;
      }
      const bool same = first->ok == o.ok &&
                        (o.ok ? dml::value_eq(sorted_if_list(*first), sorted_if_list(o)) : first->error == o.error);
      if (!same) {
        ++violations;
        v.require(false, "permutation changed the result of " + g.text() + " -> " + g.text(order) + ": " +
                             describe(*first) + " vs " + describe(o) + "\n" + prelude);
      }
    }
  }
  v.require(constructs >= 200, "only " + std::to_string(constructs) + " constructs generated");
  if (v.pass)
    v.detail = std::to_string(constructs) + " constructs, " + std::to_string(permutations_run) +
               " permutations, 0 violations";
  else
    v.detail += " [" + std::to_string(violations) + " violations]";
  return v;
}

Verdict quantifier_laws() {
  Verdict v;
  Generator gen(4242);
  GenOptions opts;
  opts.max_clauses = 3;
  opts.max_depth = 2;
  opts.kinds = {"each", "some"};
  int duality = 0;
  int vacuity = 0;
  for (int i = 0; i < 600; ++i) {
    const std::string prelude = gen.universe();
    GenConstruct g = gen.construct(opts);
    const std::string pred = g.body;
    for (const char* kind : {"some", "each"}) {
      g.kind = kind;
      g.body = pred;
      const std::string lhs = "not " + g.text();
      g.kind = std::string(kind) == "some" ? "each" : "some";
      g.body = "not (" + pred + ")";
      const std::string rhs = g.text();
      for (ExecPath path : {ExecPath::Lowered, ExecPath::Direct}) {
        const Outcome a = evaluate(prelude, lhs, path);
        const Outcome b = evaluate(prelude, rhs, path);
        v.require(a.ok && b.ok && dml::value_eq(a.value, b.value),
                  "duality fails: " + lhs + " is " + describe(a) + ", " + rhs + " is " + describe(b) + "\n" + prelude);
      }
    }
    ++duality;

    // Empty domain: the predicate would raise if it were ever evaluated.
    const std::string empty_prelude = gen.universe_with_empty_a();
    GenConstruct e = gen.construct(opts);
    GenClause empty;
    empty.pattern = "_";
    empty.source = "A";
    e.clauses.insert(e.clauses.begin() + gen.pick(0, static_cast<int>(e.clauses.size())), empty);
    e.body = "1 // 0 == 0";
    for (const char* kind : {"some", "each"}) {
      e.kind = kind;
      for (ExecPath path : {ExecPath::Lowered, ExecPath::Direct}) {
        const Outcome o = evaluate(empty_prelude, e.text(), path);
        const bool want = std::string(kind) == "each";
        v.require(o.ok && o.value.is(Value::Kind::Bool) && o.value.as_bool() == want,
                  "vacuity fails: " + e.text() + " gave " + describe(o));
      }
    }
    ++vacuity;
  }
  if (v.pass)
    v.detail = std::to_string(duality) + " De Morgan instances (both directions, both paths), " +
               std::to_string(vacuity) + " vacuity instances";
  return v;
}

Verdict witness_soundness() {
  Verdict v;
  Generator gen(99);
  GenOptions opts;
  opts.max_clauses = 3;
  opts.max_depth = 2;
  opts.kinds = {"some"};
  int checked = 0;
  int total = 0;
  for (int i = 0; i < 1500; ++i) {
    const std::string prelude = gen.universe();
    const GenConstruct g = gen.construct(opts);
    for (ExecPath path : {ExecPath::Lowered, ExecPath::Direct}) {
      std::ostringstream sink;
      dml::ExecOptions eo;
      eo.path = path;
      eo.out = &sink;
      dml::Interpreter interp(eo);
      interp.run(prelude);
      auto unit = interp.compile(g.text());
      const dml::Construct& top = unit->resolved.construct(unit->resolved.first_construct_id);
      auto value = interp.execute(unit, true);
      ++total;
      if (!value || !value->is(Value::Kind::Bool) || !value->as_bool()) continue;
      ++checked;

      // Fresh interpreter with only the witnesses carried over, as text.
      std::string assignments;
      for (int id : top.witnesses) {
        const std::string& name = top.vars[static_cast<std::size_t>(id)];
        const Value* w = interp.global(name);
        v.require(w != nullptr, "witness " + name + " was not written for " + g.text());
        if (w) assignments += name + " = " + dml::render(*w, false) + "\n";
      }
      dml::Interpreter fresh(eo);
      fresh.run(prelude + assignments);
      auto holds = [&](const std::string& expr) {
        try {
          const Value r = fresh.eval(expr);
          return r.is(Value::Kind::Bool) && r.as_bool();
        } catch (const std::exception&) {
          return false;
        }
      };
      for (const GenClause& c : g.clauses) {
        const std::string check = c.membership ? "some(" + c.pattern + " in " + c.source + ", has= True)" : c.cond;
        v.require(holds(check), "witnesses " + assignments + "fail clause " + c.text() + " of " + g.text());
      }
      v.require(holds(g.body), "witnesses " + assignments + "fail predicate of " + g.text() + "\n" + prelude);
    }
  }
  v.require(checked >= 300, "only " + std::to_string(checked) + " true instances");
  if (v.pass)
    v.detail = std::to_string(checked) + " true some instances of " + std::to_string(total) +
               " evaluations, all witnesses sound";
  return v;
}

Verdict russell_guard() {
  Verdict v;
  // Through the CLI binary.
  const std::string path = "/tmp/dml_russell_" + std::to_string(::getpid()) + ".dml";
  {
    std::ofstream f(path);
    f << "print('before')\nS = setof(x, x > 0)\nprint(S)\n";
  }
  std::string out;
  const int code = run_command(cli_path() + " run " + path + " 2>" + path + ".err", &out);
  const std::string err = slurp(path + ".err");
  std::remove(path.c_str());
  std::remove((path + ".err").c_str());
  v.require(code == 2, "exit code " + std::to_string(code));
  v.require(out.empty(), "program produced output: " + out);
  v.require(err.find("UnrestrictedLogicVar") != std::string::npos, "diagnostic: " + err);

  Generator gen(31337);
  GenOptions opts;
  int rejected = 0;
  for (int i = 0; i < 400; ++i) {
    const std::string prelude = gen.universe();
    GenConstruct g = gen.construct(opts);
    switch (i % 3) {
      case 0: {
        GenClause c;
        c.membership = false;
        c.cond = "t > 0";
        g.clauses.insert(g.clauses.begin() + gen.pick(0, static_cast<int>(g.clauses.size())), c);
        break;
      }
      case 1: g.body = g.quantifier() ? "t > 0" : "t + 1"; break;
      default: g.body = g.quantifier() ? "some(u in A, has= u < t)" : "countof(u, u in A, u < t)"; break;
    }
    std::string o, e;
    const int rc = run_program(prelude + "print('ran')\nprint(" + g.text() + ")\n", ExecPath::Lowered, &o, &e);
    const bool ok = rc == 2 && o.empty() && e.find("UnrestrictedLogicVar") != std::string::npos;
    v.require(ok, "not rejected statically: " + g.text() + " (exit " + std::to_string(rc) + ") " + e);
    if (ok) ++rejected;
  }
  if (v.pass)
    v.detail = "setof(x, x > 0) exits 2 with no output; " + std::to_string(rejected) +
               " generated unrestricted constructs rejected before execution";
  return v;
}

Verdict small_universes() {
  Verdict v;
  const auto t0 = Clock::now();
  std::ostringstream sink;
  dml::ExecOptions eo;
  eo.out = &sink;

  dml::Interpreter rel(eo);
  rel.run(slurp(corpus_dir() + "/relations.dml"));
  const Value U = int_set({0, 1, 2});
  int relations = 0;
  for (int mask = 0; mask < 512; ++mask) {
    std::set<std::pair<int, int>> r;
    for (int bit = 0; bit < 9; ++bit)
      if (mask & (1 << bit)) r.emplace(bit / 3, bit % 3);
    bool reflexive = true, symmetric = true, transitive = true;
    for (int a = 0; a < 3; ++a) reflexive = reflexive && r.count({a, a});
    for (auto [a, b] : r) symmetric = symmetric && r.count({b, a});
    for (auto [a, b] : r)
      for (auto [c, d] : r)
        if (b == c) transitive = transitive && r.count({a, d});
    const Value R = pair_set(r);
    const bool got_r = rel.call("is_reflexive", {R, U}).as_bool();
    const bool got_s = rel.call("is_symmetric", {R}).as_bool();
    const bool got_t = rel.call("is_transitive", {R}).as_bool();
    v.require(got_r == reflexive && got_s == symmetric && got_t == transitive,
              "relation " + dml::render(R) + " misjudged");
    ++relations;
  }

  dml::Interpreter fun(eo);
  fun.run(slurp(corpus_dir() + "/functions.dml"));
  int functions = 0;
  for (int code = 0; code < 27; ++code) {
    const int img[3] = {code % 3, (code / 3) % 3, code / 9};
    std::set<std::pair<int, int>> f;
    for (int a = 0; a < 3; ++a) f.emplace(a, img[a]);
    const std::set<int> image(img, img + 3);
    const bool one_to_one = image.size() == 3;
    const bool onto = image.size() == 3;
    const Value F = pair_set(f);
    v.require(fun.call("is_function", {F, U, U}).as_bool(), "not a function: " + dml::render(F));
    v.require(fun.call("is_one_to_one", {F}).as_bool() == one_to_one, "1-1 misjudged: " + dml::render(F));
    v.require(fun.call("is_onto", {F, U}).as_bool() == onto, "onto misjudged: " + dml::render(F));
    ++functions;
  }

  dml::Interpreter clo(eo);
  clo.run(slurp(corpus_dir() + "/closure.dml"));
  Generator gen(5150);
  int graphs = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = gen.pick(1, 6);
    bool reach[6][6] = {};
    std::set<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (gen.coin(0.25)) {
          edges.emplace(a, b);
          reach[a][b] = true;
        }
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) reach[a][b] = reach[a][b] || (reach[a][k] && reach[k][b]);
    std::set<std::pair<int, int>> expected;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (reach[a][b]) expected.emplace(a, b);
    const Value got = clo.call("closure", {pair_set(edges)});
    v.require(dml::value_eq(got, pair_set(expected)),
              "closure of " + dml::render(pair_set(edges)) + " gave " + dml::render(got));
    ++graphs;
  }
  const double secs = seconds_since(t0);
  v.require(secs < 30.0, "took " + std::to_string(secs) + " s");
  if (v.pass)
    v.detail = std::to_string(relations) + " relations, " + std::to_string(functions) + " functions, " +
               std::to_string(graphs) + " digraphs agree with brute force in " + std::to_string(secs) + " s";
  return v;
}

Verdict algorithmic_corpus() {
  Verdict v;
  std::ostringstream sink;
  dml::ExecOptions eo;
  eo.out = &sink;
  dml::Interpreter g(eo);
  g.run(slurp(corpus_dir() + "/gcd.dml"));
  const Value a = Value::integer(12), b = Value::integer(18);
  v.require(g.call("gcd_iter", {a, b}).as_int() == 6, "gcd_iter(12, 18) != 6");
  v.require(g.call("gcd_rec", {a, b}).as_int() == 6, "gcd_rec(12, 18) != 6");

  dml::Interpreter h(eo);
  h.run(slurp(corpus_dir() + "/hanoi.dml"));
  v.require(h.eval("len(hanoi(10, 'A', 'C', 'B'))").as_int() == 1023, "hanoi(10) move count != 1023");
  v.require(h.eval("len(hanoi(3, 'A', 'C', 'B'))").as_int() == 7, "hanoi(3) move count != 7");

  int runs = 0;
  for (const auto& name : kCorpus) {
    const std::string source = slurp(corpus_dir() + "/" + name + ".dml");
    const std::string golden = slurp(corpus_dir() + "/" + name + ".golden");
    v.require(!golden.empty(), name + ".golden is missing");
    for (int rep = 0; rep < 3; ++rep)
      for (ExecPath path : {ExecPath::Direct, ExecPath::Lowered}) {
        std::string out, err;
        const int code = run_program(source, path, &out, &err);
        v.require(code == 0 && out == golden, name + " differs from golden (exit " + std::to_string(code) + ") " + err);
        ++runs;
      }
  }
  if (v.pass)
    v.detail = "gcd(12,18) = 6 both ways, hanoi(10) = 1023 moves, " + std::to_string(runs) +
               " corpus runs byte-identical to goldens";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "cafe fidelity", cafe_fidelity},
      {2, "differential oracle", differential_oracle},
      {3, "clause-permutation invariance", permutation_invariance},
      {4, "quantifier laws", quantifier_laws},
      {5, "witness soundness", witness_soundness},
      {6, "Russell guard", russell_guard},
      {7, "exhaustive small universes", small_universes},
      {8, "algorithmic corpus", algorithmic_corpus},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::cout << "criterion " << c.id << " [PRIMARY] " << c.name << ": " << (v.pass ? "PASS" : "FAIL") << " -- "
              << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

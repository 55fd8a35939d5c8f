#include "slprove_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "slprove/problem.hpp"
#include "slprove/prover.hpp"
#include "slprove/semantics.hpp"

namespace slp::cli {

namespace {

using json = nlohmann::json;

struct Loaded {
  ProblemFile problem;
  RuleSet rules;
};

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << path << '\n';
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and validates; diagnostics go to `err`.
std::optional<Loaded> load(const std::string& path, bool require_valid, std::ostream& err) {
  auto text = read_file(path, err);
  if (!text) return std::nullopt;
  try {
    Loaded l{parse_problem(*text), {}};
    l.rules = l.problem.rule_set();
    if (require_valid && !l.rules.valid()) {
      for (const auto& m : l.rules.diagnostics().messages(l.rules.rules())) err << path << ": " << m << '\n';
      return std::nullopt;
    }
    return l;
  } catch (const ParseError& e) {
    err << path << ':' << e.what() << '\n';
  } catch (const SortError& e) {
    err << path << ": " << e.what() << '\n';
  }
  return std::nullopt;
}

json stats_json(const ProverStats& s) {
  json apps = json::object();
  for (const auto& [r, n] : s.applications) apps[std::string(to_string(r))] = n;
  return {{"sequents", s.sequents},
          {"narrow_sequents", s.narrow_sequents},
          {"oracle_queries", s.oracle_queries},
          {"applications", apps}};
}

json proof_json(const Signature& sig, const Proof& p) {
  json steps = json::array();
  for (const auto& s : p.steps) {
    json j = {{"sequent", print_sequent(sig, s.sequent)}};
    switch (s.kind) {
      case ProofStep::Kind::Axiom:
        j["kind"] = "axiom";
        j["axiom_form"] = s.axiom_form;
        break;
      case ProofStep::Kind::BackEdge:
        j["kind"] = "back-edge";
        j["target"] = s.back_edge_to;
        break;
      case ProofStep::Kind::Inference:
        j["kind"] = "rule";
        j["rule"] = std::string(to_string(s.rule));
        j["detail"] = s.detail;
        j["children"] = s.children;
        break;
    }
    steps.push_back(std::move(j));
  }
  return {{"kind", "proof"}, {"steps", steps}, {"back_edges", p.back_edges()}};
}

json refutation_json(const Signature& sig, const Refutation& r) {
  json path = json::array();
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    json j = {{"sequent", print_sequent(sig, r.path[i].sequent)}};
    if (i > 0) {
      j["via"] = std::string(to_string(r.path[i].via));
      j["detail"] = r.path[i].detail;
    }
    path.push_back(std::move(j));
  }
  json out = {{"kind", "refutation"}, {"path", path}};
  if (r.leaf == Refutation::Leaf::AntiAxiom) {
    out["leaf"] = "anti-axiom";
    out["condition"] = r.anti_axiom_condition;
  } else {
    out["leaf"] = "stuck";
  }
  return out;
}

json structure_json(const Signature& sig, const Structure& st) {
  json store = json::object();
  for (const auto& [t, v] : st.store)
    if (t.is_var()) store[t.name] = to_string(sig, v);
  json heap = json::array();
  for (const auto& [l, tuple] : st.heap) {
    json vals = json::array();
    for (const auto& v : tuple) vals.push_back(to_string(sig, v));
    heap.push_back({{"address", to_string(sig, Value::loc(l))}, {"tuple", vals}});
  }
  return {{"store", store}, {"heap", heap}};
}

struct ProveFlags {
  std::string file;
  bool proof = false;
  bool countermodel = false;
  std::size_t max_sequents = ProverOptions{}.max_sequents;
  bool json_out = false;
  bool no_timing = false;
  int max_cells = Bounds{}.max_cells;
  int max_locs = Bounds{}.max_locs;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string format_ms(double ms) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << ms;
  return os.str();
}

int cmd_check(const std::string& file, std::ostream& out, std::ostream& err) {
  auto l = load(file, false, err);
  if (!l) return 2;
  const RuleSet& rs = l->rules;
  for (const auto& m : rs.diagnostics().messages(rs.rules())) (rs.valid() ? out : err) << m << '\n';
  if (!rs.valid()) return 2;
  const Measures& m = rs.measures();
  out << "valid rule set: " << rs.rules().size() << " rules, width " << m.width << ", max arity " << m.ar_max
      << ", max record " << m.record_max << '\n';
  return 0;
}

int cmd_prove(const ProveFlags& f, std::ostream& out, std::ostream& err) {
  auto l = load(f.file, true, err);
  if (!l) return 2;
  const Signature& sig = l->rules.signature();
  ProverOptions opts;
  opts.max_sequents = f.max_sequents;
  int code = 0;
  for (std::size_t i = 0; i < l->problem.queries.size(); ++i) {
    const Query& q = l->problem.queries[i];
    auto start = std::chrono::steady_clock::now();
    json rec = {{"query", i + 1}, {"line", q.line}};
    try {
      Verdict v = prove(l->rules, q.sequent, opts);
      double ms = f.no_timing ? 0.0 : elapsed_ms(start);
      if (!v.valid) code = std::max(code, 1);
      std::optional<Structure> cm;
      if (f.countermodel && !v.valid) {
        Bounds b;
        b.max_cells = f.max_cells;
        b.max_locs = f.max_locs;
        cm = find_countermodel(l->rules, q.sequent, b);
      }
      if (f.json_out) {
        rec["valid"] = v.valid;
        rec["nodes"] = v.stats.sequents;
        rec["milliseconds"] = ms;
        rec["evidence"] = v.valid ? proof_json(sig, *v.proof) : refutation_json(sig, *v.refutation);
        if (f.countermodel && !v.valid) rec["countermodel"] = cm ? structure_json(sig, *cm) : json(nullptr);
        out << rec.dump() << '\n';
        continue;
      }
      out << "query " << i + 1 << " (line " << q.line << "): " << print_sequent(sig, q.sequent) << '\n';
      out << "  " << (v.valid ? "valid" : "invalid") << ", " << v.stats.sequents << " sequents";
      if (!f.no_timing) out << ", " << format_ms(ms) << " ms";
      out << '\n';
      if (f.proof) {
        std::istringstream body(v.valid ? to_string(*v.proof) : to_string(*v.refutation));
        for (std::string line; std::getline(body, line);) out << "    " << line << '\n';
      }
      if (f.countermodel && !v.valid) {
        if (!cm) {
          out << "  no counter-model within " << f.max_cells << " cells and " << f.max_locs << " locations\n";
        } else {
          out << "  counter-model:\n";
          std::istringstream body(to_string(sig, *cm));
          for (std::string line; std::getline(body, line);) out << "    " << line << '\n';
        }
      }
    } catch (const ResourceError& e) {
      code = 2;
      if (f.json_out) {
        rec["error"] = e.what();
        rec["nodes"] = e.stats().sequents;
        out << rec.dump() << '\n';
      } else {
        err << "query " << i + 1 << " (line " << q.line << "): " << e.what() << '\n';
      }
    }
  }
  return code;
}

int cmd_oracle(const std::string& file, int max_cells, int max_locs, bool json_out, std::ostream& out,
               std::ostream& err) {
  auto l = load(file, false, err);
  if (!l) return 2;
  if (!l->rules.prule_shaped()) {
    for (const auto& m : l->rules.diagnostics().messages(l->rules.rules())) err << file << ": " << m << '\n';
    return 2;
  }
  const Signature& sig = l->rules.signature();
  Bounds b;
  b.max_cells = max_cells;
  b.max_locs = max_locs;
  int code = 0;
  for (std::size_t i = 0; i < l->problem.queries.size(); ++i) {
    const Query& q = l->problem.queries[i];
    std::optional<Structure> cm;
    try {
      cm = find_countermodel(l->rules, q.sequent, b);
    } catch (const std::invalid_argument& e) {
      err << e.what() << '\n';
      return 2;
    }
    if (cm) code = 1;
    if (json_out) {
      json rec = {{"query", i + 1}, {"line", q.line}, {"countermodel", cm ? structure_json(sig, *cm) : json(nullptr)}};
      out << rec.dump() << '\n';
      continue;
    }
    out << "query " << i + 1 << " (line " << q.line << "): " << print_sequent(sig, q.sequent) << '\n';
    if (!cm) {
      out << "  no counter-model within " << max_cells << " cells and " << max_locs << " locations\n";
    } else {
      out << "  counter-model:\n";
      std::istringstream body(to_string(sig, *cm));
      for (std::string line; std::getline(body, line);) out << "    " << line << '\n';
    }
  }
  return code;
}

int cmd_bench(const std::string& file, int repeat, std::size_t max_sequents, bool json_out, std::ostream& out,
              std::ostream& err) {
  auto l = load(file, true, err);
  if (!l) return 2;
  ProverOptions opts;
  opts.max_sequents = max_sequents;
  int code = 0;
  for (std::size_t i = 0; i < l->problem.queries.size(); ++i) {
    const Query& q = l->problem.queries[i];
    std::vector<double> times;
    Verdict v;
    try {
      for (int k = 0; k < repeat; ++k) {
        auto start = std::chrono::steady_clock::now();
        v = prove(l->rules, q.sequent, opts);
        times.push_back(elapsed_ms(start));
      }
    } catch (const ResourceError& e) {
      err << "query " << i + 1 << " (line " << q.line << "): " << e.what() << '\n';
      code = 2;
      continue;
    }
    std::sort(times.begin(), times.end());
    double median = times[times.size() / 2];
    if (json_out) {
      json rec = {{"query", i + 1},          {"line", q.line},          {"valid", v.valid},
                  {"nodes", v.stats.sequents}, {"milliseconds", median}, {"stats", stats_json(v.stats)}};
      out << rec.dump() << '\n';
      continue;
    }
    out << "query " << i + 1 << " (line " << q.line << "): " << (v.valid ? "valid" : "invalid") << ", "
        << v.stats.sequents << " sequents (" << v.stats.narrow_sequents << " narrow), " << v.stats.oracle_queries
        << " oracle queries, median " << format_ms(median) << " ms over " << repeat << " runs\n  applications:";
    for (const auto& [r, n] : v.stats.applications) out << ' ' << to_string(r) << '=' << n;
    out << '\n';
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entailment prover for separation logic with inductive predicates", "slprove"};
  app.require_subcommand(1);

  std::string check_file;
  auto* check = app.add_subcommand("check", "Validate the rule set of a problem file");
  check->add_option("file", check_file, "Problem file")->required();

  ProveFlags pf;
  auto* prove_cmd = app.add_subcommand("prove", "Decide every query of a problem file");
  prove_cmd->add_option("file", pf.file, "Problem file")->required();
  prove_cmd->add_flag("--proof", pf.proof, "Print the proof or refutation trace");
  prove_cmd->add_flag("--countermodel", pf.countermodel, "Search a counter-model for invalid queries");
  prove_cmd->add_option("--max-sequents", pf.max_sequents, "Cap on normalized sequents")->check(CLI::PositiveNumber);
  prove_cmd->add_option("--max-cells", pf.max_cells, "Counter-model heap size bound")->check(CLI::PositiveNumber);
  prove_cmd->add_option("--max-locs", pf.max_locs, "Counter-model location bound")->check(CLI::PositiveNumber);
  prove_cmd->add_flag("--json", pf.json_out, "One JSON record per query");
  prove_cmd->add_flag("--no-timing", pf.no_timing, "Report zero milliseconds");

  std::string oracle_file;
  int max_cells = Bounds{}.max_cells;
  int max_locs = Bounds{}.max_locs;
  bool oracle_json = false;
  auto* oracle = app.add_subcommand("oracle", "Bounded counter-model search for every query");
  oracle->add_option("file", oracle_file, "Problem file")->required();
  oracle->add_option("--max-cells", max_cells, "Heap size bound")->check(CLI::PositiveNumber);
  oracle->add_option("--max-locs", max_locs, "Location bound")->check(CLI::PositiveNumber);
  oracle->add_flag("--json", oracle_json, "One JSON record per query");

  std::string bench_file;
  int repeat = 5;
  std::size_t bench_cap = ProverOptions{}.max_sequents;
  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "Node and time statistics per query");
  bench->add_option("file", bench_file, "Problem file")->required();
  bench->add_option("--repeat", repeat, "Runs per query")->check(CLI::PositiveNumber);
  bench->add_option("--max-sequents", bench_cap, "Cap on normalized sequents")->check(CLI::PositiveNumber);
  bench->add_flag("--json", bench_json, "One JSON record per query");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(check_file, out, err);
    if (*prove_cmd) return cmd_prove(pf, out, err);
    if (*oracle) return cmd_oracle(oracle_file, max_cells, max_locs, oracle_json, out, err);
    if (*bench) return cmd_bench(bench_file, repeat, bench_cap, bench_json, out, err);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace slp::cli

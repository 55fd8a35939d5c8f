// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "corpus.hpp"
#include "models.hpp"
#include "slprove/analysis.hpp"
#include "slprove/calculus.hpp"
#include "slprove/problem.hpp"
#include "slprove/prover.hpp"
#include "slprove/semantics.hpp"
#include "slprove_cli/cli.hpp"

namespace {

using namespace slp;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string data_path(const std::string& name) { return std::string(SLPROVE_TEST_DATA_DIR) + "/" + name; }

ProblemFile load(const std::string& name) {
  std::ifstream in(data_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

struct Result {
  bool pass = true;
  std::string note;

  void fail(const std::string& why) {
    if (pass) note = why;
    pass = false;
  }
};

std::string label(const std::vector<RuleViolation>& vs) {
  if (vs.empty()) return "P-rule";
  for (const auto& v : vs)
    if (v.kind == RuleViolation::Kind::NoPointsTo) return "No points-to atom";
  std::set<int> conds;
  for (const auto& v : vs)
    if (v.condition() > 0) conds.insert(v.condition());
  std::string out;
  for (int c : conds) out += (out.empty() ? "Condition " : ",") + std::to_string(c);
  return out.empty() ? "other" : out;
}

Result classification() {
  Result r;
  auto t = Clock::now();
  ProblemFile ex1 = load("non_prules.slp");
  std::vector<std::string> expected = {"P-rule",          "Condition 2", "No points-to atom", "Condition 2",
                                       "No points-to atom", "Condition 1", "Condition 1"};
  if (ex1.rules.size() != expected.size()) r.fail("rule count");
  for (std::size_t i = 0; i < ex1.rules.size() && i < expected.size(); ++i) {
    std::string got = label(validate_prule(ex1.signature, ex1.rules[i], i));
    if (got != expected[i]) r.fail("rule " + std::to_string(i + 1) + ": " + got + " vs " + expected[i]);
  }
  ProblemFile ls = load("intro_ls.slp");
  if (!check_deterministic(ls.rules)) r.fail("intro ls classified deterministic");
  ProblemFile st = load("structures.slp");
  for (const std::string& head : {"tree", "als", "tll", "dll", "tptr"}) {
    std::vector<InductiveRule> rules;
    for (const auto& rule : st.rules)
      if (rule.head == head || (head == "tll" && rule.head == "tree")) rules.push_back(rule);
    for (std::size_t i = 0; i < rules.size(); ++i)
      if (!validate_prule(st.signature, rules[i], i).empty()) r.fail(head + " has a non-P-rule");
    if (check_deterministic(rules)) r.fail(head + " classified non-deterministic");
    if (!check_loc_deterministic(rules)) r.fail(head + " classified not loc-deterministic");
  }
  ProblemFile nl = load("non_loc_deterministic.slp");
  if (check_deterministic(nl.rules)) r.fail("data disequation set classified non-deterministic");
  if (check_loc_deterministic(nl.rules)) r.fail("data disequation set classified loc-deterministic");
  double s = seconds_since(t);
  if (s >= 0.1) r.fail("took " + std::to_string(s) + " s");
  return r;
}

Result worked_example() {
  Result r;
  auto t = Clock::now();
  ProblemFile p = load("worked_example.slp");
  RuleSet rs = p.rule_set();
  Verdict v = prove(rs, p.queries.at(0).sequent);
  double s = seconds_since(t);
  if (!v.valid || !v.proof) {
    r.fail("not proved");
    return r;
  }
  const auto& st = v.proof->steps;
  using K = ProofStep::Kind;
  auto is = [&](std::size_t i, K k, RuleId rule = RuleId::W) {
    return i < st.size() && st[i].kind == k && (k != K::Inference || st[i].rule == rule);
  };
  auto child = [&](std::size_t i, std::size_t k) { return k < st[i].children.size() ? st[i].children[k] : kNoStep; };
  bool shape = is(0, K::Inference, RuleId::U) && st[0].children.size() == 2;
  if (shape) {
    std::size_t b1 = child(0, 0), b2 = child(0, 1);
    shape = is(b1, K::Inference, RuleId::I) && is(child(b1, 0), K::Inference, RuleId::S);
    if (shape) {
      std::size_t split = child(b1, 0);
      std::size_t vnode = child(split, 1);
      shape = is(child(split, 0), K::Axiom) && is(vnode, K::Inference, RuleId::V) && is(child(vnode, 0), K::BackEdge) &&
              st[child(vnode, 0)].back_edge_to == 0;
    }
    shape = shape && is(b2, K::Inference, RuleId::I) && is(child(b2, 0), K::Axiom);
  }
  if (!shape) r.fail("proof shape differs:\n" + to_string(*v.proof));
  if (v.proof->back_edges() != 1) r.fail("back-edges: " + std::to_string(v.proof->back_edges()));
  if (v.stats.sequents >= 100) r.fail("sequents: " + std::to_string(v.stats.sequents));
  if (s >= 1.0) r.fail("took " + std::to_string(s) + " s");
  if (r.pass) r.note = std::to_string(v.stats.sequents) + " sequents";
  return r;
}

Result anti_axioms() {
  Result r;
  auto t = Clock::now();
  ProblemFile p = load("anti_axioms.slp");
  RuleSet rs = p.rule_set();
  for (std::size_t i = 0; i < p.queries.size(); ++i) {
    const Sequent& s = p.queries[i].sequent;
    Verdict v = prove(rs, s);
    int want = static_cast<int>(i) + 1;
    if (v.valid || !v.refutation || v.refutation->leaf != Refutation::Leaf::AntiAxiom ||
        v.refutation->path.size() != 1 || v.refutation->anti_axiom_condition != want)
      r.fail("sequent " + std::to_string(want) + " not refuted by condition " + std::to_string(want));
    auto cm = find_countermodel(rs, s, Bounds{3, 4, -1});
    if (!cm) r.fail("no counter-model for sequent " + std::to_string(want));
    else if (!satisfies(rs, *cm, s.lhs) || satisfies(rs, *cm, s.rhs))
      r.fail("bogus counter-model for sequent " + std::to_string(want));
  }
  if (p.queries.size() != 5) r.fail("expected five sequents");
  double s = seconds_since(t);
  if (s >= 1.0) r.fail("took " + std::to_string(s) + " s");
  return r;
}

Result precision() {
  Result r;
  ProblemFile st = load("structures.slp");
  RuleSet rs = st.rule_set();
  constexpr int kLocs = 4;
  constexpr int kCells = 4;
  std::size_t pairs = 0;
  for (const std::string& pred : {"tree", "als", "dll", "tptr"}) {
    std::size_t arity = rs.signature().profile(pred)->size();
    std::vector<int> args(arity, 0);
    for (;;) {
      // Two distinct satisfying subheaps of one heap are two compatible
      // models whose union fits the cell bound.
      auto models = testing::unfold_models(rs, pred, args, kCells, kLocs);
      for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j) {
          ++pairs;
          testing::LocHeap u = models[i];
          bool compatible = true;
          for (const auto& [l, tuple] : models[j]) {
            auto [it, fresh] = u.emplace(l, tuple);
            if (!fresh && it->second != tuple) compatible = false;
          }
          if (compatible && static_cast<int>(u.size()) <= kCells) r.fail(pred + " is not precise");
        }
      std::size_t k = 0;
      while (k < args.size() && ++args[k] == kLocs) args[k++] = 0;
      if (k == args.size()) break;
    }
  }
  // The overlapping list segment has a model strictly inside another.
  ProblemFile ls = load("intro_ls.slp");
  RuleSet lrs = ls.rule_set();
  Structure big{{{Term::var("x"), Value::loc(1)}, {Term::var("y"), Value::loc(2)}},
                {{1, {Value::loc(2)}}, {2, {Value::loc(2)}}}};
  Structure small = big;
  small.heap.erase(2);
  SymbolicHeap atom{{SpatialAtom::predicate("ls", {Term::var("x"), Term::var("y")})}, {}};
  if (!satisfies(lrs, big, atom) || !satisfies(lrs, small, atom)) r.fail("ls witness not reproduced");
  Structure probe{big.store, big.heap};
  if (satisfying_subheaps(lrs, probe, atom.spatial.front()).size() != 2) r.fail("ls witness subheap count");
  if (r.pass) r.note = std::to_string(pairs) + " model pairs";
  return r;
}

Result differential() {
  Result r;
  std::mt19937 rng(20240611);
  std::size_t sets = 0, sequents = 0, valid = 0, invalid = 0, unconfirmed = 0;
  for (; sets < 200; ++sets) {
    RuleSet rs = testing::random_rule_set(rng);
    for (int k = 0; k < 5; ++k, ++sequents) {
      Sequent s = testing::random_sequent(rng, rs);
      Verdict v;
      try {
        v = prove(rs, s);
      } catch (const std::exception& e) {
        r.fail(std::string(e.what()) + " on " + print_sequent(rs.signature(), s) + "\n" +
               print_problem(ProblemFile{rs.signature(), rs.rules(), {}}));
        continue;
      }
      auto cm = find_countermodel(rs, s, Bounds{4, 5, -1});
      if (v.valid) ++valid;
      else ++invalid;
      if (v.valid && cm) {
        std::ostringstream os;
        os << "prover valid, oracle counter-model: " << print_sequent(rs.signature(), s) << "\n"
           << print_problem(ProblemFile{rs.signature(), rs.rules(), {}}) << to_string(rs.signature(), *cm);
        r.fail(os.str());
      }
      if (!v.valid && !cm) ++unconfirmed;
    }
  }
  std::ostringstream os;
  os << sets << " rule sets, " << sequents << " sequents, " << valid << " valid, " << invalid << " invalid ("
     << unconfirmed << " without a counter-model within bounds)";
  if (r.pass) r.note = os.str();
  return r;
}

Result invertibility() {
  Result r;
  std::mt19937 rng(777);
  const Bounds bounds{3, 7, 2};
  std::map<RuleId, int> checked;
  const std::vector<RuleId> rules = {RuleId::R, RuleId::E, RuleId::U, RuleId::W, RuleId::V, RuleId::C, RuleId::I};
  auto done = [&] {
    return std::all_of(rules.begin(), rules.end(), [&](RuleId id) { return checked[id] >= 100; });
  };
  for (int attempt = 0; attempt < 200000 && !done(); ++attempt) {
    RuleSet rs = testing::random_rule_set(rng);
    Sequent s = testing::random_sequent(rng, rs);
    if (!heap_satisfiable(s.lhs)) continue;
    std::vector<RuleApplication> apps;
    for (RuleId id : rules) {
      if (checked[id] >= 100) continue;
      std::vector<RuleApplication> got;
      switch (id) {
        case RuleId::R: got = apply_R(s); break;
        case RuleId::E: got = apply_E(s); break;
        case RuleId::U: got = apply_U(rs, s); break;
        case RuleId::W: got = apply_W(s); break;
        case RuleId::V: got = apply_V(s); break;
        case RuleId::C: got = apply_C(s); break;
        case RuleId::I: got = apply_I(rs, s); break;
        default: break;
      }
      if (!got.empty()) apps.push_back(got.front());
    }
    if (apps.empty()) continue;
    bool conclusion = find_countermodel(rs, s, bounds).has_value();
    for (const auto& app : apps) {
      bool premise = false;
      for (const auto& p : app.premises)
        if (heap_satisfiable(p.lhs) && find_countermodel(rs, p, bounds)) premise = true;
      ++checked[app.rule];
      if (premise != conclusion) {
        std::ostringstream os;
        os << to_string(app.rule) << " changes counter-model existence on " << to_string(s);
        r.fail(os.str());
      }
    }
  }
  std::ostringstream os;
  for (RuleId id : rules) {
    os << to_string(id) << '=' << checked[id] << ' ';
    if (checked[id] < 100) r.fail("too few samples for " + std::string(to_string(id)));
  }
  if (r.pass) r.note = os.str();
  return r;
}

Result scaling() {
  Result r;
  RuleSet rs = testing::list_rule_set();
  std::vector<double> xs, ys;
  std::ostringstream os;
  for (int n : {4, 8, 16, 32}) {
    auto t = Clock::now();
    Verdict v = prove(rs, testing::chain_sequent(n, "list"));
    double s = seconds_since(t);
    if (!v.valid) r.fail("chain of " + std::to_string(n) + " not proved");
    if (n == 32 && s >= 5.0) r.fail("n = 32 took " + std::to_string(s) + " s");
    xs.push_back(std::log(n));
    ys.push_back(std::log(static_cast<double>(v.stats.sequents)));
    os << "n=" << n << ": " << v.stats.sequents << " sequents; ";
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) num += (xs[i] - mx) * (ys[i] - my), den += (xs[i] - mx) * (xs[i] - mx);
  double slope = num / den;
  os << "slope " << slope;
  if (slope > 2.2) r.fail(os.str());
  if (r.pass) r.note = os.str();
  return r;
}

std::string run_suite() {
  std::ostringstream out, err;
  for (const char* f : {"worked_example.slp", "anti_axioms.slp", "structures.slp", "constructors.slp"})
    slp::cli::run({"prove", "--json", "--no-timing", "--countermodel", data_path(f)}, out, err);
  return out.str() + err.str();
}

Result determinism() {
  Result r;
  std::string a = run_suite();
  std::string b = run_suite();
  if (a != b) r.fail("outputs differ");
  if (a.empty()) r.fail("empty output");
  if (r.pass) r.note = std::to_string(a.size()) + " bytes";
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"1 rule classification", classification},
      {"2 worked proof tree", worked_example},
      {"3 anti-axiom suite", anti_axioms},
      {"4 precision", precision},
      {"5 differential soundness", differential},
      {"6 invertibility", invertibility},
      {"7 polynomial scaling", scaling},
      {"8 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Result res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.fail(std::string("exception: ") + e.what());
    }
    if (!res.pass) ++failures;
    std::cout << (res.pass ? "PASS " : "FAIL ") << name;
    if (!res.note.empty()) std::cout << " -- " << res.note;
    std::cout << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

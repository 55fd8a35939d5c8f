#include "slprove/rules.hpp"

#include <algorithm>

namespace slp {

const SpatialAtom* InductiveRule::points_to() const {
  const SpatialAtom* found = nullptr;
  for (const auto& a : body.spatial) {
    if (!a.is_points_to()) continue;
    if (found) return nullptr;
    found = &a;
  }
  return found;
}

std::set<Term> InductiveRule::existentials() const {
  std::set<Term> vs = vars_of(body);
  for (const auto& p : params) vs.erase(p);
  return vs;
}

std::string to_string(const InductiveRule& r) {
  std::string s = r.head + "(";
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    if (i) s += ", ";
    s += to_string(r.params[i]);
  }
  return s + ") <= " + to_string(r.body);
}

int RuleViolation::condition() const {
  switch (kind) {
    case Kind::Condition1: return 1;
    case Kind::Condition2: return 2;
    case Kind::Condition3: return 3;
    default: return 0;
  }
}

std::string to_string(RuleViolation::Kind k) {
  using K = RuleViolation::Kind;
  switch (k) {
    case K::IllSorted: return "ill-sorted";
    case K::NoPointsTo: return "no points-to atom";
    case K::MultiplePointsTo: return "more than one points-to atom";
    case K::WrongRoot: return "points-to atom not rooted at the first parameter";
    case K::EquationInBody: return "equation in rule body";
    case K::UnsatisfiableBody: return "contradictory disequation in rule body";
    case K::Condition1: return "condition 1 violated";
    case K::Condition2: return "condition 2 violated";
    case K::Condition3: return "condition 3 violated";
  }
  return "?";
}

namespace {

void check_sorts(const Signature& sig, const InductiveRule& rule, std::size_t index,
                 std::vector<RuleViolation>& out) {
  auto bad = [&](std::string d) {
    out.push_back({RuleViolation::Kind::IllSorted, index, std::move(d)});
  };
  const auto* prof = sig.profile(rule.head);
  if (!prof) {
    bad("undeclared predicate " + rule.head);
    return;
  }
  if (prof->size() != rule.params.size()) bad("arity of " + rule.head + " does not match its profile");
  std::set<Term> seen;
  for (std::size_t i = 0; i < rule.params.size(); ++i) {
    const auto& p = rule.params[i];
    if (!p.is_var()) bad("parameter " + p.name + " is not a variable");
    if (!seen.insert(p).second) bad("parameter " + p.name + " repeated");
    if (i < prof->size() && p.sort != (*prof)[i]) bad("parameter " + p.name + " has the wrong sort");
  }
  for (const auto& a : rule.body.spatial) {
    if (a.root().sort != kLoc) bad("root of " + to_string(a) + " is not a location");
    if (!a.is_predicate()) continue;
    const auto* q = sig.profile(a.pred);
    if (!q) {
      bad("undeclared predicate " + a.pred);
      continue;
    }
    if (q->size() != a.args.size()) {
      bad("arity mismatch in " + to_string(a));
      continue;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (a.args[i].sort != (*q)[i]) bad("sort mismatch in " + to_string(a));
  }
  for (const auto& a : rule.body.pure)
    if (a.lhs.sort != a.rhs.sort) bad("sort mismatch in " + to_string(a));
}

}  // namespace

std::vector<RuleViolation> validate_prule(const Signature& sig, const InductiveRule& rule,
                                          std::size_t index) {
  using K = RuleViolation::Kind;
  std::vector<RuleViolation> out;
  check_sorts(sig, rule, index, out);

  std::size_t pts = std::count_if(rule.body.spatial.begin(), rule.body.spatial.end(),
                                  [](const SpatialAtom& a) { return a.is_points_to(); });
  if (pts == 0) {
    out.push_back({K::NoPointsTo, index, "the body allocates nothing"});
    return out;
  }
  if (pts > 1) {
    out.push_back({K::MultiplePointsTo, index, "the body allocates more than one cell"});
    return out;
  }
  const SpatialAtom& cell = *rule.points_to();
  if (rule.params.empty() || cell.root() != rule.params.front()) {
    out.push_back({K::WrongRoot, index, "root " + cell.root().name});
    return out;
  }

  std::set<Term> params(rule.params.begin(), rule.params.end());
  std::set<Term> tuple(cell.tuple().begin(), cell.tuple().end());
  std::set<Term> fresh;
  for (const auto& t : tuple)
    if (t.is_var() && !params.count(t)) fresh.insert(t);
  auto in_scope = [&](const Term& t) { return params.count(t) || tuple.count(t); };

  for (const auto& a : rule.body.pure) {
    if (a.is_eq()) {
      out.push_back({K::EquationInBody, index, to_string(a)});
      continue;
    }
    if (a.is_false()) {
      out.push_back({K::UnsatisfiableBody, index, to_string(a)});
      continue;
    }
    bool ok = (in_scope(a.lhs) && fresh.count(a.rhs)) || (in_scope(a.rhs) && fresh.count(a.lhs));
    if (!ok) out.push_back({K::Condition1, index, to_string(a)});
  }

  std::set<Term> fresh_locs;
  for (const auto& t : fresh)
    if (t.sort == kLoc) fresh_locs.insert(t);
  std::multiset<Term> roots;
  for (const auto& a : rule.body.spatial)
    if (a.is_predicate()) roots.insert(a.root());
  std::set<Term> root_set(roots.begin(), roots.end());
  if (root_set.size() != roots.size()) {
    out.push_back({K::Condition2, index, "predicate roots are not pairwise distinct"});
  } else if (root_set != fresh_locs) {
    std::string d;
    for (const auto& t : fresh_locs)
      if (!root_set.count(t)) d += t.name + " is not the root of a predicate atom; ";
    for (const auto& t : root_set)
      if (!fresh_locs.count(t)) d += t.name + " is not a fresh location of the tuple; ";
    if (!d.empty()) d.resize(d.size() - 2);
    out.push_back({K::Condition2, index, d});
  }

  for (const auto& a : rule.body.spatial) {
    if (!a.is_predicate()) continue;
    for (const auto& t : a.args) {
      if (t.is_constant() || in_scope(t)) continue;
      out.push_back({K::Condition3, index, t.name + " in " + to_string(a)});
    }
  }
  return out;
}

std::set<std::string> compute_productive(const std::vector<InductiveRule>& rules) {
  std::set<std::string> prod;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules) {
      if (prod.count(r.head)) continue;
      bool all = std::all_of(r.body.spatial.begin(), r.body.spatial.end(), [&](const SpatialAtom& a) {
        return a.is_points_to() || prod.count(a.pred);
      });
      if (all) {
        prod.insert(r.head);
        changed = true;
      }
    }
  }
  return prod;
}

OutParams compute_out_params(const Signature& sig, const std::vector<InductiveRule>& rules) {
  OutParams out;
  for (const auto& name : sig.predicate_order()) out[name];
  for (const auto& r : rules) out[r.head];
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules) {
      auto& mine = out[r.head];
      for (std::size_t i = 0; i < r.params.size(); ++i) {
        const Term& x = r.params[i];
        if (x.sort != kLoc || mine.count(i)) continue;
        bool hit = false;
        for (const auto& a : r.body.spatial) {
          if (a.is_points_to()) {
            hit = std::find(a.tuple().begin(), a.tuple().end(), x) != a.tuple().end();
          } else {
            for (std::size_t j : out[a.pred])
              if (j < a.args.size() && a.args[j] == x) hit = true;
          }
          if (hit) break;
        }
        if (hit) {
          mine.insert(i);
          changed = true;
        }
      }
    }
  }
  return out;
}

std::vector<UselessParameter> check_assumption2(const Signature& sig, const OutParams& out) {
  std::vector<UselessParameter> v;
  for (const auto& [pred, positions] : out) {
    const auto* prof = sig.profile(pred);
    if (!prof) continue;
    for (std::size_t i = 1; i < prof->size(); ++i)
      if ((*prof)[i] == kLoc && !positions.count(i)) v.push_back({pred, i});
  }
  return v;
}

namespace {

Substitution rename_apart(const InductiveRule& r, const std::string& prefix) {
  Substitution s;
  for (const auto& v : vars_of(r.body)) s.bind(v, Term::var(prefix + v.name, v.sort));
  for (const auto& v : r.params) s.bind(v, Term::var(prefix + v.name, v.sort));
  return s;
}

}  // namespace

std::optional<DeterminismWitness> check_deterministic(const std::vector<InductiveRule>& rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      const auto& r1 = rules[i];
      const auto& r2 = rules[j];
      if (r1.head != r2.head || !r1.points_to() || !r2.points_to()) continue;
      Substitution s1 = rename_apart(r1, "_1_");
      Substitution s2 = rename_apart(r2, "_2_");
      std::vector<Term> x1, x2;
      for (const auto& p : r1.params) x1.push_back(s1.apply(p));
      for (const auto& p : r2.params) x2.push_back(s2.apply(p));
      SpatialAtom c1 = s1.apply(*r1.points_to());
      SpatialAtom c2 = s2.apply(*r2.points_to());
      auto params_eq = vector_equation(x1, x2);
      auto tuple_eq = vector_equation(c1.tuple(), c2.tuple());
      if (!params_eq || !tuple_eq) continue;
      std::vector<PureAtom> all = *params_eq;
      all.insert(all.end(), tuple_eq->begin(), tuple_eq->end());
      for (const auto& a : r1.body.pure) all.push_back(s1.apply(a));
      for (const auto& a : r2.body.pure) all.push_back(s2.apply(a));
      if (auto m = pure_model(all)) return DeterminismWitness{i, j, std::move(*m)};
    }
  }
  return std::nullopt;
}

std::vector<NonLocDisequation> non_loc_disequations(const std::vector<InductiveRule>& rules) {
  std::vector<NonLocDisequation> v;
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (const auto& a : rules[i].body.pure)
      if (a.is_neq() && !(a.lhs.is_loc_var() && a.rhs.is_loc_var())) v.push_back({i, a});
  return v;
}

bool check_loc_deterministic(const std::vector<InductiveRule>& rules) {
  return !check_deterministic(rules) && non_loc_disequations(rules).empty();
}

Measures measures(const Signature& sig, const std::vector<InductiveRule>& rules) {
  Measures m;
  auto arity = [&](const std::string& p, std::size_t fallback) {
    const auto* prof = sig.profile(p);
    return prof ? prof->size() : fallback;
  };
  for (const auto& r : rules) {
    m.ar_max = std::max(m.ar_max, arity(r.head, r.params.size()));
    for (const auto& a : r.body.spatial) {
      if (a.is_points_to())
        m.record_max = std::max(m.record_max, a.args.size() - 1);
      else
        m.ar_max = std::max(m.ar_max, arity(a.pred, a.args.size()));
    }
  }
  m.width = std::max(m.ar_max, m.record_max);
  return m;
}

bool RuleDiagnostics::ok() const {
  return !empty_rule_set && violations.empty() && non_productive.empty() &&
         useless_parameters.empty() && !nondeterminism && non_loc_disequations.empty();
}

std::vector<std::string> RuleDiagnostics::messages(const std::vector<InductiveRule>& rules) const {
  std::vector<std::string> m;
  if (empty_rule_set) m.push_back("error: the rule set is empty");
  for (const auto& v : violations) {
    std::string s = "error: rule " + std::to_string(v.rule + 1) + " `" + to_string(rules[v.rule]) +
                    "`: " + to_string(v.kind);
    if (!v.detail.empty()) s += " (" + v.detail + ")";
    m.push_back(std::move(s));
  }
  for (const auto& p : non_productive) m.push_back("error: predicate " + p + " is not productive");
  for (const auto& u : useless_parameters)
    m.push_back("error: parameter " + std::to_string(u.position + 1) + " of " + u.predicate +
                " is never referenced by the allocated structure");
  if (nondeterminism)
    m.push_back("error: rules " + std::to_string(nondeterminism->first + 1) + " and " +
                std::to_string(nondeterminism->second + 1) + " of " + rules[nondeterminism->first].head +
                " can allocate the same cell (not deterministic)");
  for (const auto& d : non_loc_disequations)
    m.push_back("error: rule " + std::to_string(d.rule + 1) + ": disequation " + to_string(d.atom) +
                " is not between location variables");
  for (const auto& w : warnings) m.push_back("warning: " + w);
  return m;
}

RuleSet::RuleSet(Signature sig, std::vector<InductiveRule> rules)
    : sig_(std::move(sig)), rules_(std::move(rules)) {
  for (auto& r : rules_) r.body = canonicalize(std::move(r.body));
  for (std::size_t i = 0; i < rules_.size(); ++i) by_head_[rules_[i].head].push_back(i);

  diag_.empty_rule_set = rules_.empty();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    auto v = validate_prule(sig_, rules_[i], i);
    diag_.violations.insert(diag_.violations.end(), v.begin(), v.end());
  }
  prule_shaped_ = diag_.violations.empty();

  productive_ = compute_productive(rules_);
  std::set<std::string> used(sig_.predicate_order().begin(), sig_.predicate_order().end());
  for (const auto& r : rules_) {
    used.insert(r.head);
    for (const auto& a : r.body.spatial)
      if (a.is_predicate()) used.insert(a.pred);
  }
  for (const auto& p : used)
    if (!productive_.count(p)) diag_.non_productive.push_back(p);

  out_ = compute_out_params(sig_, rules_);
  diag_.useless_parameters = check_assumption2(sig_, out_);
  diag_.nondeterminism = check_deterministic(rules_);
  diag_.non_loc_disequations = slp::non_loc_disequations(rules_);
  measures_ = slp::measures(sig_, rules_);

  std::set<std::string> mentioned;
  for (const auto& r : rules_) {
    for (const auto& a : r.body.spatial)
      for (const auto& t : a.args)
        if (t.is_constant()) mentioned.insert(t.name);
    for (const auto& a : r.body.pure) {
      if (a.lhs.is_constant()) mentioned.insert(a.lhs.name);
      if (a.rhs.is_constant()) mentioned.insert(a.rhs.name);
    }
  }
  for (const auto& c : sig_.constant_order())
    if (!mentioned.count(c)) diag_.warnings.push_back("constant " + c + " does not occur in any rule");

  // Shallowest unfolding depth, by relaxation.
  for (const auto& p : productive_) rank_[p] = -1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules_) {
      if (!productive_.count(r.head)) continue;
      int depth = 1;
      bool ready = true;
      for (const auto& a : r.body.spatial) {
        if (!a.is_predicate()) continue;
        auto it = rank_.find(a.pred);
        if (it == rank_.end() || it->second < 0) {
          ready = false;
          break;
        }
        depth = std::max(depth, it->second + 1);
      }
      int& cur = rank_[r.head];
      if (ready && (cur < 0 || depth < cur)) {
        cur = depth;
        changed = true;
      }
    }
  }
}

const std::vector<std::size_t>& RuleSet::rules_of(std::string_view pred) const {
  static const std::vector<std::size_t> none;
  auto it = by_head_.find(pred);
  return it == by_head_.end() ? none : it->second;
}

const std::set<std::size_t>& RuleSet::out_params(std::string_view pred) const {
  static const std::set<std::size_t> none;
  auto it = out_.find(std::string(pred));
  return it == out_.end() ? none : it->second;
}

int RuleSet::rank(std::string_view pred) const {
  auto it = rank_.find(pred);
  return it == rank_.end() ? -1 : it->second;
}

}  // namespace slp

#include "slprove/calculus.hpp"

#include <algorithm>
#include <stdexcept>

#include "slprove/analysis.hpp"

namespace slp {

std::string_view to_string(RuleId r) {
  switch (r) {
    case RuleId::W: return "W";
    case RuleId::V: return "V";
    case RuleId::R: return "R";
    case RuleId::E: return "E";
    case RuleId::S: return "S";
    case RuleId::U: return "U";
    case RuleId::C: return "C";
    case RuleId::I: return "I";
  }
  return "?";
}

namespace {

bool contains(const std::vector<Term>& sorted, const Term& t) {
  return std::binary_search(sorted.begin(), sorted.end(), t);
}

std::vector<Term> merge(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

RuleApplication make(RuleId id, std::vector<Sequent> premises, std::string detail) {
  for (auto& p : premises) p = canonicalize(std::move(p));
  return RuleApplication{id, std::move(premises), std::move(detail)};
}

// Variable names not yet taken, derived from `base`.
class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}
  std::string next(const std::string& base) {
    std::string name = base;
    for (int k = 1; used_.count(name); ++k) name = base + std::to_string(k);
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

std::set<std::string> names_of(const Sequent& s) {
  std::set<std::string> out;
  for (const auto& v : vars_of(s)) out.insert(v.name);
  return out;
}

bool single_atom_rhs(const Sequent& s) { return s.rhs.spatial.size() == 1 && s.rhs.pure.empty(); }

}  // namespace

std::vector<RuleApplication> apply_R(const Sequent& s) {
  std::vector<RuleApplication> out;
  for (const auto& a : s.lhs.pure) {
    if (!a.is_eq() || !a.rhs.is_var()) continue;
    Substitution sub;
    sub.bind(a.rhs, a.lhs);
    out.push_back(make(RuleId::R, {sub.apply(s)}, a.rhs.name + " := " + to_string(a.lhs)));
  }
  return out;
}

std::vector<RuleApplication> apply_E(const Sequent& s) {
  PureFormula kept;
  std::string dropped;
  for (const auto& a : s.rhs.pure) {
    if (entails_pure(s.lhs, s.vset, a)) {
      dropped += (dropped.empty() ? "" : ", ") + to_string(a);
    } else {
      kept.push_back(a);
    }
  }
  if (dropped.empty()) return {};
  Sequent p = s;
  p.rhs.pure = std::move(kept);
  return {make(RuleId::E, {std::move(p)}, "drop " + dropped)};
}

std::vector<RuleApplication> apply_W(const Sequent& s) {
  const SymbolicHeap spatial_only{s.lhs.spatial, {}};
  std::set<PureAtom> drop;
  for (const auto& a : s.lhs.pure)
    if (a.is_neq() && !a.is_false() && entails_pure(spatial_only, s.vset, a)) drop.insert(a);

  std::set<Term> elsewhere = vars_of(s.lhs.spatial);
  collect_vars(s.rhs, elsewhere);
  for (const auto& x : vars_of(s.lhs.pure)) {
    if (elsewhere.count(x)) continue;
    bool only_diseqs = true;
    std::vector<PureAtom> mine;
    for (const auto& a : s.lhs.pure) {
      if (!a.mentions(x)) continue;
      if (!a.is_neq() || a.lhs == a.rhs) only_diseqs = false;
      mine.push_back(a);
    }
    if (only_diseqs) drop.insert(mine.begin(), mine.end());
  }
  if (drop.empty()) return {};
  Sequent p = s;
  p.lhs.pure.clear();
  std::string detail;
  for (const auto& a : s.lhs.pure) {
    if (drop.count(a))
      detail += (detail.empty() ? "" : ", ") + to_string(a);
    else
      p.lhs.pure.push_back(a);
  }
  return {make(RuleId::W, {std::move(p)}, "drop " + detail)};
}

std::vector<RuleApplication> apply_V(const Sequent& s) {
  std::set<Term> used = vars_of(s.lhs);
  collect_vars(s.rhs, used);
  std::vector<RuleApplication> out;
  for (std::size_t i = 0; i < s.vset.size(); ++i) {
    const Term& x = s.vset[i];
    if (used.count(x) || (i > 0 && s.vset[i - 1] == x)) continue;
    Sequent p = s;
    p.vset.erase(p.vset.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(make(RuleId::V, {std::move(p)}, "remove " + x.name));
  }
  return out;
}

std::vector<RuleApplication> apply_S(const RuleSet& rs, const Sequent& s, const ValidityOracle* oracle) {
  if (s.rhs.spatial.size() < 2 || !s.rhs.pure.empty() || s.lhs.spatial.size() < 2) return {};
  const SpatialAtom& psi1 = s.rhs.spatial.front();
  SpatialFormula psi2(s.rhs.spatial.begin() + 1, s.rhs.spatial.end());
  const Term& y0 = psi1.root();
  const auto& phi = s.lhs.spatial;

  std::set<Term> v_psi1 = vars_of(psi1);
  // Atoms whose side is a free choice: rooted at a variable of psi1 other
  // than its root. Everything else follows by reachability from y0.
  std::vector<std::size_t> choice;
  bool rooted_y0 = false;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i].root() == y0) rooted_y0 = true;
    else if (v_psi1.count(phi[i].root())) choice.push_back(i);
  }
  if (!rooted_y0) return {};

  bool narrow = is_narrow(rs, s);
  if (!narrow && !oracle) throw std::logic_error("S on a non-narrow sequent needs a validity oracle");

  PathRelation paths(rs, phi);
  std::set<std::vector<bool>> seen;
  std::vector<RuleApplication> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << choice.size()); ++mask) {
    std::set<Term> blocked;
    for (const auto& v : v_psi1) blocked.insert(v);
    blocked.erase(y0);
    for (std::size_t k = 0; k < choice.size(); ++k)
      if (mask & (std::size_t{1} << k)) blocked.erase(phi[choice[k]].root());
    auto reach = paths.reachable_avoiding(y0, blocked);

    std::vector<bool> side(phi.size());
    SpatialFormula phi1, phi2;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      side[i] = reach.count(phi[i].root()) > 0;
      (side[i] ? phi1 : phi2).push_back(phi[i]);
    }
    if (phi1.empty() || phi2.empty() || !seen.insert(side).second) continue;

    Sequent left{SymbolicHeap{phi1, s.lhs.pure}, merge(s.vset, alloc(phi2)), SymbolicHeap{{psi1}, {}}};
    Sequent right{SymbolicHeap{phi2, s.lhs.pure}, merge(s.vset, alloc(phi1)), SymbolicHeap{psi2, {}}};
    left = canonicalize(std::move(left));
    right = canonicalize(std::move(right));
    if (is_anti_axiom(rs, left) || is_anti_axiom(rs, right)) continue;
    if (!narrow && !(*oracle)(left)) continue;
    out.push_back(make(RuleId::S, {std::move(left), std::move(right)},
                       to_string(phi1) + " |- " + to_string(psi1)));
  }
  return out;
}

std::vector<RuleApplication> apply_U(const RuleSet& rs, const Sequent& s) {
  if (!single_atom_rhs(s)) return {};
  const Term& x1 = s.rhs.spatial.front().root();
  std::vector<RuleApplication> out;
  for (std::size_t i = 0; i < s.lhs.spatial.size(); ++i) {
    const SpatialAtom& atom = s.lhs.spatial[i];
    if (!atom.is_predicate() || atom.root() != x1) continue;
    SpatialFormula rest = s.lhs.spatial;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    std::vector<Sequent> premises;
    FreshNames fresh(names_of(s));
    for (std::size_t idx : rs.rules_of(atom.pred)) {
      const InductiveRule& r = rs.rules()[idx];
      Substitution sub;
      for (std::size_t k = 0; k < r.params.size(); ++k) sub.bind(r.params[k], atom.args[k]);
      for (const auto& e : r.existentials()) sub.bind(e, Term::var(fresh.next(e.name), e.sort));
      SymbolicHeap body = sub.apply(r.body);
      Sequent p = s;
      p.lhs.spatial = rest;
      p.lhs.spatial.insert(p.lhs.spatial.end(), body.spatial.begin(), body.spatial.end());
      p.lhs.pure.insert(p.lhs.pure.end(), body.pure.begin(), body.pure.end());
      premises.push_back(std::move(p));
    }
    out.push_back(make(RuleId::U, std::move(premises), "unfold " + to_string(atom)));
  }
  return out;
}

std::vector<RuleApplication> apply_I(const RuleSet& rs, const Sequent& s) {
  if (!single_atom_rhs(s) || !s.rhs.spatial.front().is_predicate()) return {};
  const SpatialAtom& goal = s.rhs.spatial.front();
  const SpatialAtom* cell = nullptr;
  for (const auto& a : s.lhs.spatial)
    if (a.is_points_to() && a.root() == goal.root()) cell = &a;
  if (!cell) return {};
  auto ys = cell->tuple();

  std::vector<RuleApplication> out;
  const auto& candidates = rs.rules_of(goal.pred);
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    const InductiveRule& r = rs.rules()[candidates[n]];
    const SpatialAtom* pt = r.points_to();
    if (!pt || pt->tuple().size() != ys.size() || r.params.size() != goal.args.size()) continue;
    Substitution inst;
    for (std::size_t k = 0; k < r.params.size(); ++k) inst.bind(r.params[k], goal.args[k]);
    std::set<Term> params(r.params.begin(), r.params.end());
    Substitution sigma;
    bool ok = true;
    for (std::size_t k = 0; k < ys.size() && ok; ++k) {
      const Term& u = pt->tuple()[k];
      if (u.is_var() && !params.count(u)) {
        if (u.sort != ys[k].sort) ok = false;
        else if (const Term* prev = sigma.find(u)) ok = *prev == ys[k];
        else sigma.bind(u, ys[k]);
      } else {
        ok = inst.apply(u) == ys[k];
      }
    }
    if (!ok) continue;
    for (const auto& [from, to] : inst.bindings()) sigma.bind(from, to);
    PureFormula zeta = sigma.apply(r.body.pure);
    if (!entails_pure(s.lhs, s.vset, zeta)) continue;
    Sequent p = s;
    p.rhs.spatial = {*cell};
    for (const auto& a : r.body.spatial)
      if (a.is_predicate()) p.rhs.spatial.push_back(sigma.apply(a));
    out.push_back(make(RuleId::I, {std::move(p)}, "rule " + std::to_string(n + 1) + " of " + goal.pred));
  }
  return out;
}

std::vector<RuleApplication> apply_C(const Sequent& s) {
  if (!single_atom_rhs(s) || !s.rhs.spatial.front().is_predicate()) return {};
  auto allocated = alloc(s.lhs.spatial);
  std::vector<RuleApplication> out;
  for (const auto& y : vars_of(s.rhs)) {
    if (!y.is_loc_var() || contains(allocated, y) || contains(s.vset, y)) continue;
    for (std::size_t i = 0; i < allocated.size(); ++i) {
      const Term& x = allocated[i];
      if (!x.is_loc_var() || (i > 0 && allocated[i - 1] == x)) continue;
      PureAtom d = PureAtom::neq(x, y);
      if (std::binary_search(s.lhs.pure.begin(), s.lhs.pure.end(), d)) continue;
      Substitution sub;
      sub.bind(x, y);
      Sequent merged = sub.apply(s);
      Sequent apart = s;
      apart.lhs.pure.push_back(d);
      out.push_back(make(RuleId::C, {std::move(merged), std::move(apart)}, x.name + " vs " + y.name));
    }
  }
  return out;
}

std::vector<RuleApplication> enumerate_admissible(const RuleSet& rs, const Sequent& s,
                                                  const ValidityOracle* oracle) {
  if (is_axiom(s) || is_anti_axiom(rs, s)) return {};
  auto admissible = [&](const RuleApplication& a) {
    return std::none_of(a.premises.begin(), a.premises.end(),
                        [&](const Sequent& p) { return is_anti_axiom(rs, p); });
  };
  for (RuleId id : kPriority) {
    std::vector<RuleApplication> cands;
    switch (id) {
      case RuleId::W: cands = apply_W(s); break;
      case RuleId::V: cands = apply_V(s); break;
      case RuleId::R: cands = apply_R(s); break;
      case RuleId::E: cands = apply_E(s); break;
      case RuleId::S: cands = apply_S(rs, s, oracle); break;
      case RuleId::U: cands = apply_U(rs, s); break;
      case RuleId::C: cands = apply_C(s); break;
      case RuleId::I: cands = apply_I(rs, s); break;
    }
    if (cands.empty()) continue;
    cands.erase(std::remove_if(cands.begin(), cands.end(), [&](const auto& a) { return !admissible(a); }),
                cands.end());
    // An enabled invertible rule blocks the lower priorities even when all
    // of its applications lead to anti-axioms.
    if (cands.empty()) {
      if (id == RuleId::S) continue;
      return {};
    }
    std::sort(cands.begin(), cands.end());
    if (id == RuleId::S && is_narrow(rs, s)) return cands;
    cands.resize(1);
    return cands;
  }
  return {};
}

}  // namespace slp

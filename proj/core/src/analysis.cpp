#include "slprove/analysis.hpp"

#include <algorithm>
#include <deque>

namespace slp {

std::vector<Term> alloc(const SpatialFormula& f) {
  std::vector<Term> roots;
  roots.reserve(f.size());
  for (const auto& a : f) roots.push_back(a.root());
  std::sort(roots.begin(), roots.end());
  return roots;
}

bool heap_satisfiable(const SpatialFormula& f) {
  auto roots = alloc(f);
  return std::adjacent_find(roots.begin(), roots.end()) == roots.end();
}

PathRelation::PathRelation(const RuleSet& rs, const SpatialFormula& f) {
  for (const auto& a : f) {
    const Term& x = a.root();
    if (a.is_points_to()) {
      for (const auto& y : a.tuple())
        if (y.is_loc_var()) edges_.emplace(x, y);
    } else {
      for (std::size_t i : rs.out_params(a.pred))
        if (i < a.args.size() && a.args[i].is_loc_var()) edges_.emplace(x, a.args[i]);
    }
  }
  for (const auto& [x, y] : edges_) succ_[x].push_back(y);
}

std::set<Term> PathRelation::reachable_avoiding(const Term& from, const std::set<Term>& blocked) const {
  std::set<Term> seen{from};
  std::deque<Term> todo{from};
  while (!todo.empty()) {
    Term x = todo.front();
    todo.pop_front();
    auto it = succ_.find(x);
    if (it == succ_.end()) continue;
    for (const auto& y : it->second) {
      if (blocked.count(y) || !seen.insert(y).second) continue;
      todo.push_back(y);
    }
  }
  return seen;
}

std::set<Term> PathRelation::reachable_from(const Term& from) const {
  return reachable_avoiding(from, {});
}

bool PathRelation::reaches(const Term& from, const Term& to) const {
  return reachable_from(from).count(to) > 0;
}

namespace {

std::size_t count_in(std::span<const Term> ms, const Term& t) {
  return static_cast<std::size_t>(std::count(ms.begin(), ms.end(), t));
}

}  // namespace

bool entails_pure(const SymbolicHeap& lambda, std::span<const Term> vset, const PureAtom& atom) {
  if (std::binary_search(lambda.pure.begin(), lambda.pure.end(), atom)) return true;
  if (atom.is_trivial()) return true;
  if (atom.is_neq() && atom.lhs.is_constant() && atom.rhs.is_constant() && atom.lhs != atom.rhs)
    return true;
  if (!atom.is_neq() || !atom.lhs.is_var() || !atom.rhs.is_var()) return false;
  auto roots = alloc(lambda.spatial);
  auto occurrences = [&](const Term& t) { return count_in(roots, t) + count_in(vset, t); };
  if (atom.lhs == atom.rhs) return occurrences(atom.lhs) >= 2;
  return occurrences(atom.lhs) >= 1 && occurrences(atom.rhs) >= 1;
}

bool entails_pure(const SymbolicHeap& lambda, std::span<const Term> vset,
                  std::span<const PureAtom> xi) {
  return std::all_of(xi.begin(), xi.end(),
                     [&](const PureAtom& a) { return entails_pure(lambda, vset, a); });
}

std::optional<int> axiom_form(const Sequent& s) {
  if (s.lhs.spatial == s.rhs.spatial &&
      std::includes(s.lhs.pure.begin(), s.lhs.pure.end(), s.rhs.pure.begin(), s.rhs.pure.end()))
    return 1;
  if (std::any_of(s.lhs.pure.begin(), s.lhs.pure.end(), [](const PureAtom& a) { return a.is_false(); }))
    return 2;
  if (!heap_satisfiable(s.lhs.spatial)) return 3;
  if (std::adjacent_find(s.vset.begin(), s.vset.end()) != s.vset.end()) return 4;
  for (const auto& x : alloc(s.lhs.spatial))
    if (std::binary_search(s.vset.begin(), s.vset.end(), x)) return 4;
  return std::nullopt;
}

std::optional<int> anti_axiom_condition(const RuleSet& rs, const Sequent& s) {
  if (is_axiom(s) || !s.rhs.pure.empty()) return std::nullopt;
  if (std::any_of(s.lhs.pure.begin(), s.lhs.pure.end(), [](const PureAtom& a) { return a.is_eq(); }))
    return std::nullopt;

  const auto& phi = s.lhs.spatial;
  const auto& psi = s.rhs.spatial;
  auto alloc_phi = alloc(phi);
  auto alloc_psi = alloc(psi);
  if (!std::includes(alloc_phi.begin(), alloc_phi.end(), alloc_psi.begin(), alloc_psi.end())) return 1;
  if (psi.empty() && !phi.empty()) return 2;

  PathRelation paths(rs, phi);
  std::set<Term> reached;
  for (const auto& y : alloc_psi) {
    auto r = paths.reachable_from(y);
    reached.insert(r.begin(), r.end());
  }
  for (const auto& x : alloc_phi)
    if (!std::binary_search(alloc_psi.begin(), alloc_psi.end(), x) && !reached.count(x)) return 3;

  std::set<Term> vphi = vars_of(phi);
  std::set<Term> vpsi = vars_of(psi);
  for (const auto& v : s.vset)
    if (vphi.count(v) && !vpsi.count(v)) return 4;
  for (const auto& v : vphi)
    if (v.is_loc_var() && !vpsi.count(v) && !std::binary_search(alloc_phi.begin(), alloc_phi.end(), v))
      return 5;
  return std::nullopt;
}

bool equality_free(const Sequent& s) {
  auto has_eq = [](const PureFormula& f) {
    return std::any_of(f.begin(), f.end(), [](const PureAtom& a) { return a.is_eq(); });
  };
  return !has_eq(s.lhs.pure) && !has_eq(s.rhs.pure);
}

namespace {

std::set<Term> rhs_loc_vars_outside(const Sequent& s, const std::vector<Term>& allocated) {
  std::set<Term> out;
  for (const auto& v : vars_of(s.rhs)) {
    if (!v.is_loc_var()) continue;
    if (std::binary_search(s.vset.begin(), s.vset.end(), v)) continue;
    if (std::binary_search(allocated.begin(), allocated.end(), v)) continue;
    out.insert(v);
  }
  return out;
}

}  // namespace

std::set<Term> narrow_vars(const Sequent& s) { return rhs_loc_vars_outside(s, alloc(s.rhs.spatial)); }

bool is_narrow(const RuleSet& rs, const Sequent& s) {
  return equality_free(s) && narrow_vars(s).size() <= rs.measures().width;
}

std::set<Term> spec_vars(const Sequent& s) { return rhs_loc_vars_outside(s, alloc(s.lhs.spatial)); }

}  // namespace slp

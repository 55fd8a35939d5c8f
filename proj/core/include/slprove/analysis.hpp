#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp {

// Roots of the spatial atoms, with multiplicity, sorted.
std::vector<Term> alloc(const SpatialFormula& f);
inline std::vector<Term> alloc(const SymbolicHeap& h) { return alloc(h.spatial); }

// No variable is allocated twice.
bool heap_satisfiable(const SpatialFormula& f);
inline bool heap_satisfiable(const SymbolicHeap& h) { return heap_satisfiable(h.spatial); }

// Syntactic points-to/out-parameter edges between loc variables.
class PathRelation {
 public:
  PathRelation(const RuleSet& rs, const SpatialFormula& f);

  const std::set<std::pair<Term, Term>>& edges() const { return edges_; }
  // Reflexive-transitive closure.
  bool reaches(const Term& from, const Term& to) const;
  std::set<Term> reachable_from(const Term& from) const;
  // Reachability that never enters a variable of `blocked` (the start is
  // exempt).
  std::set<Term> reachable_avoiding(const Term& from, const std::set<Term>& blocked) const;

 private:
  std::set<std::pair<Term, Term>> edges_;
  std::map<Term, std::vector<Term>> succ_;
};

// The relation lambda |>_V atom.
bool entails_pure(const SymbolicHeap& lambda, std::span<const Term> vset, const PureAtom& atom);
bool entails_pure(const SymbolicHeap& lambda, std::span<const Term> vset, std::span<const PureAtom> xi);

// Axiom form 1..4, or nullopt.
std::optional<int> axiom_form(const Sequent& s);
inline bool is_axiom(const Sequent& s) { return axiom_form(s).has_value(); }

// Anti-axiom condition 1..5, or nullopt. Only meaningful for sequents that
// are not axioms, have an equation-free lhs and a pure-free rhs.
std::optional<int> anti_axiom_condition(const RuleSet& rs, const Sequent& s);
inline bool is_anti_axiom(const RuleSet& rs, const Sequent& s) {
  return anti_axiom_condition(rs, s).has_value();
}

bool equality_free(const Sequent& s);
// Loc variables of the rhs outside V and alloc(rhs).
std::set<Term> narrow_vars(const Sequent& s);
bool is_narrow(const RuleSet& rs, const Sequent& s);
// Loc variables of the rhs outside V and alloc(lhs).
std::set<Term> spec_vars(const Sequent& s);

}  // namespace slp

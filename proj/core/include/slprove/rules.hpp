#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slprove/syntax.hpp"

namespace slp {

// head(params) <= body
struct InductiveRule {
  std::string head;
  std::vector<Term> params;
  SymbolicHeap body;

  // The unique points-to atom of a P-rule, or nullptr.
  const SpatialAtom* points_to() const;
  // Body variables that are not parameters.
  std::set<Term> existentials() const;

  friend bool operator==(const InductiveRule&, const InductiveRule&) = default;
};

std::string to_string(const InductiveRule& r);

struct RuleViolation {
  enum class Kind {
    IllSorted,
    NoPointsTo,
    MultiplePointsTo,
    WrongRoot,
    EquationInBody,
    UnsatisfiableBody,
    Condition1,
    Condition2,
    Condition3,
  };
  Kind kind;
  std::size_t rule = 0;
  std::string detail;

  // 1, 2 or 3 for the numbered P-rule conditions, 0 otherwise.
  int condition() const;
};

std::string to_string(RuleViolation::Kind k);

std::vector<RuleViolation> validate_prule(const Signature& sig, const InductiveRule& rule,
                                          std::size_t index = 0);

std::set<std::string> compute_productive(const std::vector<InductiveRule>& rules);

// Argument positions are 0-based: position 0 is the root.
using OutParams = std::map<std::string, std::set<std::size_t>>;
OutParams compute_out_params(const Signature& sig, const std::vector<InductiveRule>& rules);

struct UselessParameter {
  std::string predicate;
  std::size_t position;  // 0-based
};
std::vector<UselessParameter> check_assumption2(const Signature& sig, const OutParams& out);

struct DeterminismWitness {
  std::size_t first;
  std::size_t second;
  // Equivalence classes of a store satisfying the unified constraint over
  // the renamed-apart variables.
  std::map<Term, int> assignment;
};
std::optional<DeterminismWitness> check_deterministic(const std::vector<InductiveRule>& rules);

struct NonLocDisequation {
  std::size_t rule;
  PureAtom atom;
};
std::vector<NonLocDisequation> non_loc_disequations(const std::vector<InductiveRule>& rules);
bool check_loc_deterministic(const std::vector<InductiveRule>& rules);

struct Measures {
  std::size_t ar_max = 0;
  std::size_t record_max = 0;
  std::size_t width = 0;
};
Measures measures(const Signature& sig, const std::vector<InductiveRule>& rules);

struct RuleDiagnostics {
  bool empty_rule_set = false;
  std::vector<RuleViolation> violations;
  std::vector<std::string> non_productive;
  std::vector<UselessParameter> useless_parameters;
  std::optional<DeterminismWitness> nondeterminism;
  std::vector<NonLocDisequation> non_loc_disequations;
  std::vector<std::string> warnings;

  bool ok() const;
  std::vector<std::string> messages(const std::vector<InductiveRule>& rules) const;
};

// An immutable rule set with its static analyses.
class RuleSet {
 public:
  RuleSet() = default;
  RuleSet(Signature sig, std::vector<InductiveRule> rules);

  const Signature& signature() const { return sig_; }
  const std::vector<InductiveRule>& rules() const { return rules_; }
  const std::vector<std::size_t>& rules_of(std::string_view pred) const;

  const std::set<std::string>& productive() const { return productive_; }
  const OutParams& out_params() const { return out_; }
  const std::set<std::size_t>& out_params(std::string_view pred) const;
  // Depth of the shallowest complete unfolding; -1 for unproductive.
  int rank(std::string_view pred) const;
  const Measures& measures() const { return measures_; }
  bool deterministic() const { return !diag_.nondeterminism.has_value() && prule_shaped_; }
  bool loc_deterministic() const { return deterministic() && diag_.non_loc_disequations.empty(); }

  // Every rule is a well-sorted P-rule; enough for the semantics.
  bool prule_shaped() const { return prule_shaped_; }
  const RuleDiagnostics& diagnostics() const { return diag_; }
  // All checks pass; required by the prover.
  bool valid() const { return diag_.ok(); }

 private:
  Signature sig_;
  std::vector<InductiveRule> rules_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_head_;
  std::set<std::string> productive_;
  OutParams out_;
  std::map<std::string, int, std::less<>> rank_;
  Measures measures_;
  bool prule_shaped_ = false;
  RuleDiagnostics diag_;
};

}  // namespace slp

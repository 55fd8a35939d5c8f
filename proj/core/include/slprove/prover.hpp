#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slprove/calculus.hpp"
#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp {

struct NormalizedSequent {
  Sequent sequent;
  // Original variable -> reserved name.
  std::map<Term, Term> renaming;
  std::string key;
};

// Canonical renaming of every variable into the reserved namespace (`_1`,
// `_2`, ... for loc, `_s<id>_1`, ... for the sort with that id). Sequents equal up to
// renaming normalize identically, barring highly symmetric inputs that
// exhaust the search budget, where the result is still a faithful
// renaming.
NormalizedSequent normalize(const Sequent& s);

struct ProverOptions {
  std::size_t max_sequents = 200000;
};

struct ProverStats {
  std::size_t sequents = 0;
  std::size_t narrow_sequents = 0;
  std::size_t oracle_queries = 0;
  std::map<RuleId, std::size_t> applications;
};

class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& msg, ProverStats stats)
      : std::runtime_error(msg), stats_(std::move(stats)) {}
  const ProverStats& stats() const { return stats_; }

 private:
  ProverStats stats_;
};

inline constexpr std::size_t kNoStep = std::numeric_limits<std::size_t>::max();

struct ProofStep {
  enum class Kind { Axiom, Inference, BackEdge };
  Kind kind = Kind::Axiom;
  Sequent sequent;  // in display names
  int axiom_form = 0;
  RuleId rule = RuleId::W;
  std::string detail;
  std::vector<std::size_t> children;
  std::size_t back_edge_to = kNoStep;
};

// A rational proof tree; steps[0] is the root.
struct Proof {
  std::vector<ProofStep> steps;
  std::size_t back_edges() const;
};

struct RefutationStep {
  Sequent sequent;  // in display names
  RuleId via = RuleId::W;  // rule leading here from the previous step
  std::string detail;
};

struct Refutation {
  enum class Leaf { AntiAxiom, Stuck };
  std::vector<RefutationStep> path;  // root first
  Leaf leaf = Leaf::Stuck;
  int anti_axiom_condition = 0;
};

struct Verdict {
  bool valid = false;
  std::optional<Proof> proof;
  std::optional<Refutation> refutation;
  ProverStats stats;
};

// Decides lhs |-^V rhs for a fully validated rule set. Throws
// std::invalid_argument for an invalid rule set and ResourceError when the
// sequent graph outgrows the cap.
Verdict prove(const RuleSet& rs, const Sequent& root, const ProverOptions& opts = {});

std::string to_string(const Proof& p);
std::string to_string(const Refutation& r);

}  // namespace slp

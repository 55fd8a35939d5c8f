#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp {

enum class RuleId : std::uint8_t { W, V, R, E, S, U, C, I };

// Strategy priority order, highest first.
inline constexpr RuleId kPriority[] = {RuleId::W, RuleId::V, RuleId::R, RuleId::E,
                                       RuleId::S, RuleId::U, RuleId::C, RuleId::I};

std::string_view to_string(RuleId r);

struct RuleApplication {
  RuleId rule = RuleId::W;
  std::vector<Sequent> premises;
  std::string detail;  // human-readable instantiation, not part of the order

  friend bool operator==(const RuleApplication& a, const RuleApplication& b) {
    return a.rule == b.rule && a.premises == b.premises;
  }
  friend auto operator<=>(const RuleApplication& a, const RuleApplication& b) {
    if (auto c = a.rule <=> b.rule; c != 0) return c;
    return a.premises <=> b.premises;
  }
};

// Answers whether a narrow sequent is valid.
using ValidityOracle = std::function<bool(const Sequent&)>;

// Each apply_* returns every instance allowed by the rule and its strategy
// side conditions, before anti-axiom filtering and selection. E and W drop
// every eligible atom at once.
std::vector<RuleApplication> apply_R(const Sequent& s);
std::vector<RuleApplication> apply_E(const Sequent& s);
std::vector<RuleApplication> apply_W(const Sequent& s);
std::vector<RuleApplication> apply_V(const Sequent& s);
// Splits whose premises are anti-axioms are already discarded. When the
// sequent is not narrow only splits with an oracle-confirmed left premise
// are kept; a missing oracle is then an error (std::logic_error).
std::vector<RuleApplication> apply_S(const RuleSet& rs, const Sequent& s,
                                     const ValidityOracle* oracle = nullptr);
std::vector<RuleApplication> apply_U(const RuleSet& rs, const Sequent& s);
std::vector<RuleApplication> apply_I(const RuleSet& rs, const Sequent& s);
std::vector<RuleApplication> apply_C(const Sequent& s);

// Admissible applications under the strategy: empty for axioms and
// anti-axioms; otherwise the selected application of the highest-priority
// applicable rule, or every admissible split when that rule is S on a
// narrow sequent. A rule other than S whose applications all have an
// anti-axiom premise leaves the sequent without applications.
std::vector<RuleApplication> enumerate_admissible(const RuleSet& rs, const Sequent& s,
                                                  const ValidityOracle* oracle = nullptr);

}  // namespace slp

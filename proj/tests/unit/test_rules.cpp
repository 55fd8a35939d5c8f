#include <gtest/gtest.h>

#include "helpers.hpp"
#include "slprove/rules.hpp"

namespace slp {
namespace {

std::vector<RuleViolation::Kind> kinds(const ProblemFile& p, std::size_t i) {
  std::vector<RuleViolation::Kind> out;
  for (const auto& v : validate_prule(p.signature, p.rules[i], i)) out.push_back(v.kind);
  return out;
}

bool has_condition(const ProblemFile& p, std::size_t i, int c) {
  for (const auto& v : validate_prule(p.signature, p.rules[i], i))
    if (v.condition() == c) return true;
  return false;
}

using K = RuleViolation::Kind;

TEST(ValidatePRule, IntroductionRulesArePRules) {
  ProblemFile p = parse_problem(
      "rule ls(x, y) <= x -> (y); rule ls(x, y) <= x -> (z) * ls(z, y);"
      "rule tree(x) <= x -> (); rule tree(x) <= x -> (y, z) * tree(y) * tree(z);");
  for (std::size_t i = 0; i < p.rules.size(); ++i) EXPECT_TRUE(kinds(p, i).empty()) << i;
}

TEST(ValidatePRule, NonPRuleLabels) {
  ProblemFile p = parse_problem(
      "rule ls(x, y) <= x -> (y);"
      "rule p(x) <= x -> (z);"
      "rule p(x) <= ls(x, z) * p(z);"
      "rule q(x, y) <= x -> (z) /\\ y = z;"
      "rule als(x, y) <= x -> (z) * als(z, y) /\\ x != y;");
  EXPECT_TRUE(has_condition(p, 1, 2));
  EXPECT_EQ(kinds(p, 2), std::vector<K>{K::NoPointsTo});
  EXPECT_TRUE(has_condition(p, 3, 2));
  EXPECT_NE(std::find(kinds(p, 3).begin(), kinds(p, 3).end(), K::EquationInBody), kinds(p, 3).end());
  EXPECT_TRUE(has_condition(p, 4, 1));
}

TEST(ValidatePRule, StructuralFailures) {
  ProblemFile p = parse_problem(
      "rule p(x) <= x -> () * y -> ();"
      "rule q(x, y) <= y -> (x);"
      "rule r(x) <= x -> (z, w) * r(z) * s(z, w);"
      "rule s(x, y) <= x -> (z) * s(z, v);"
      "rule t(x) <= x -> (z) * t(z) /\\ z != z;");
  EXPECT_EQ(kinds(p, 0), std::vector<K>{K::MultiplePointsTo});
  EXPECT_EQ(kinds(p, 1), std::vector<K>{K::WrongRoot});
  EXPECT_TRUE(has_condition(p, 2, 2));
  EXPECT_TRUE(has_condition(p, 3, 3));
  EXPECT_EQ(kinds(p, 4), std::vector<K>{K::UnsatisfiableBody});
}

TEST(Productive, MutualRecursionWithoutBaseCase) {
  Term x = Term::var("x"), y = Term::var("y");
  std::vector<InductiveRule> rules = {
      {"p", {x}, {{SpatialAtom::predicate("q", {x})}, {}}},
      {"q", {x}, {{SpatialAtom::predicate("p", {x})}, {}}},
      {"r", {x}, {{SpatialAtom::points_to(x, {y}), SpatialAtom::predicate("p", {y})}, {}}},
  };
  EXPECT_TRUE(compute_productive(rules).empty());
  rules.push_back({"q", {x}, {{SpatialAtom::points_to(x, {})}, {}}});
  EXPECT_EQ(compute_productive(rules), (std::set<std::string>{"p", "q", "r"}));
}

TEST(OutParams, LeastFixpointIncludesIndirectReference) {
  ProblemFile p = parse_problem(
      "rule p(x, y, z) <= x -> (x, y);"
      "rule p(x, y, z) <= x -> (x, u) * q(u, z, z);"
      "rule q(x, y, z) <= x -> (y);");
  OutParams out = compute_out_params(p.signature, p.rules);
  // Positions are 0-based; q references its second parameter, so z flows
  // into p's out-parameters through q(u, z, z).
  EXPECT_EQ(out["q"], (std::set<std::size_t>{1}));
  EXPECT_EQ(out["p"], (std::set<std::size_t>{0, 1, 2}));
}

TEST(UselessParameters, ReportsUnusedArgument) {
  ProblemFile p = parse_problem("rule p(x, y) <= x -> ();");
  auto useless = check_assumption2(p.signature, compute_out_params(p.signature, p.rules));
  ASSERT_EQ(useless.size(), 1u);
  EXPECT_EQ(useless[0].predicate, "p");
  EXPECT_EQ(useless[0].position, 1u);
}

TEST(Determinism, IntroListIsNotDeterministic) {
  ProblemFile p = parse_problem("rule ls(x, y) <= x -> (y); rule ls(x, y) <= x -> (z) * ls(z, y);");
  auto w = check_deterministic(p.rules);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->first, 0u);
  EXPECT_EQ(w->second, 1u);
}

TEST(Determinism, ConstructorTagsSeparateRules) {
  ProblemFile p = parse_problem(
      "sort tag; const list, node, loop : tag; pred P(loc, loc);"
      "rule P(x, y) <= x -> (list, u) * P(u, y);"
      "rule P(x, y) <= x -> (node, u1, u2) * P(u1, y) * P(u2, y);"
      "rule P(x, y) <= x -> (loop, y);"
      "rule P(x, y) <= x -> ();");
  EXPECT_FALSE(check_deterministic(p.rules).has_value());
  ProblemFile overlap = parse_problem(
      "sort tag; const list, loop : tag; pred P(loc, loc);"
      "rule P(x, y) <= x -> (list, u) * P(u, y);"
      "rule P(x, y) <= x -> (list, y);");
  EXPECT_TRUE(check_deterministic(overlap.rules).has_value());
}

TEST(Determinism, DisequationSeparatesAcyclicList) {
  ProblemFile p = parse_problem(
      "rule als(x, y) <= x -> (z) * als(z, y) /\\ y != z; rule als(x, y) <= x -> (y);");
  EXPECT_FALSE(check_deterministic(p.rules).has_value());
  EXPECT_TRUE(check_loc_deterministic(p.rules));
}

TEST(Determinism, DataDisequationIsNotLocDeterministic) {
  ProblemFile p = parse_problem(
      "sort d; pred p(loc, d); rule p(x, u) <= x -> (v) /\\ v != u; rule p(x, u) <= x -> (u);");
  EXPECT_FALSE(check_deterministic(p.rules).has_value());
  EXPECT_EQ(non_loc_disequations(p.rules).size(), 1u);
  EXPECT_FALSE(check_loc_deterministic(p.rules));
}

TEST(Measures, WidthIsMaxOfArityAndRecord) {
  ProblemFile p = parse_problem(
      "rule tptr(x, y, z) <= x -> (u, v, y, z) * tptr(u, v, x) * tptr(v, u, x); rule tptr(x, y, z) <= x -> ();");
  Measures m = measures(p.signature, p.rules);
  EXPECT_EQ(m.ar_max, 3u);
  EXPECT_EQ(m.record_max, 4u);
  EXPECT_EQ(m.width, 4u);
}

TEST(RuleSet, ValidSetExposesAnalyses) {
  ProblemFile p = parse_problem("rule ls(x) <= x -> (z) * ls(z); rule ls(x) <= x -> ();");
  RuleSet rs = p.rule_set();
  EXPECT_TRUE(rs.valid());
  EXPECT_EQ(rs.rules_of("ls").size(), 2u);
  EXPECT_EQ(rs.rank("ls"), 1);
  EXPECT_TRUE(rs.loc_deterministic());
}

TEST(RuleSet, DiagnosticsNameTheProblems) {
  ProblemFile p = parse_problem("rule p(x) <= x -> (y) * q(y); rule q(x) <= x -> (z) * q(z);");
  RuleSet rs = p.rule_set();
  EXPECT_FALSE(rs.valid());
  auto msgs = rs.diagnostics().messages(rs.rules());
  bool named = std::any_of(msgs.begin(), msgs.end(),
                           [](const std::string& m) { return m.find("q is not productive") != std::string::npos; });
  EXPECT_TRUE(named);
  EXPECT_TRUE(RuleSet().valid());
}

}  // namespace
}  // namespace slp

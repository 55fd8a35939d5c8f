#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "helpers.hpp"
#include "slprove/analysis.hpp"
#include "slprove/semantics.hpp"

namespace slp {
namespace {

using testing::loc;
using testing::seq;

ProblemFile anti_rules() {
  return parse_problem("rule p(x, y) <= x -> (y); rule q(x, y) <= x -> (y); rule r(x) <= x -> ();");
}

TEST(Alloc, RootsWithMultiplicity) {
  ProblemFile p = anti_rules();
  Sequent s = seq(p, "p(x, y) * x -> () * r(z) |- emp");
  EXPECT_EQ(alloc(s.lhs), (std::vector<Term>{loc("x"), loc("x"), loc("z")}));
  EXPECT_FALSE(heap_satisfiable(s.lhs));
  EXPECT_TRUE(heap_satisfiable(seq(p, "p(x, y) * r(y) |- emp").lhs));
}

TEST(PathRelation, FollowsTuplesAndOutParameters) {
  ProblemFile p = parse_problem("rule ls(x, y) <= x -> (z) * ls(z, y); rule ls(x, y) <= x -> (y); rule t(x) <= x -> ();");
  RuleSet rs = p.rule_set();
  Sequent s = seq(p, "a -> (b) * ls(b, c) * t(d) |- emp");
  PathRelation paths(rs, s.lhs.spatial);
  EXPECT_TRUE(paths.reaches(loc("a"), loc("c")));
  EXPECT_FALSE(paths.reaches(loc("c"), loc("a")));
  EXPECT_FALSE(paths.reaches(loc("a"), loc("d")));
  EXPECT_TRUE(paths.reaches(loc("d"), loc("d")));
  EXPECT_EQ(paths.reachable_avoiding(loc("a"), {loc("b")}), (std::set<Term>{loc("a")}));
}

TEST(EntailsPure, UsesAllocationAndV) {
  ProblemFile p = anti_rules();
  Sequent s = seq(p, "[V: v] x -> () * r(y) |- emp");
  EXPECT_TRUE(entails_pure(s.lhs, s.vset, PureAtom::neq(loc("x"), loc("y"))));
  EXPECT_TRUE(entails_pure(s.lhs, s.vset, PureAtom::neq(loc("x"), loc("v"))));
  EXPECT_FALSE(entails_pure(s.lhs, s.vset, PureAtom::neq(loc("x"), loc("w"))));
  Sequent t = seq(p, "x -> () /\\ x != w |- emp");
  EXPECT_TRUE(entails_pure(t.lhs, t.vset, PureAtom::neq(loc("w"), loc("x"))));
}

TEST(Axiom, FourForms) {
  ProblemFile p = anti_rules();
  EXPECT_EQ(axiom_form(seq(p, "x -> () /\\ x != y |- x -> () /\\ x != y")), 1);
  EXPECT_EQ(axiom_form(seq(p, "x -> () |- x -> ()")), 1);
  Sequent s = seq(p, "x -> () |- emp");
  s.lhs.pure.push_back(PureAtom::falsum(loc("y")));
  EXPECT_EQ(axiom_form(canonicalize(s)), 2);
  EXPECT_EQ(axiom_form(seq(p, "x -> () * r(x) |- emp")), 3);
  EXPECT_EQ(axiom_form(seq(p, "[V: y, y] x -> () |- emp")), 4);
  EXPECT_EQ(axiom_form(seq(p, "[V: x] x -> () |- emp")), 4);
  EXPECT_FALSE(axiom_form(seq(p, "x -> () |- r(x)")).has_value());
}

TEST(AntiAxiom, FiveConditions) {
  ProblemFile p = anti_rules();
  RuleSet rs = p.rule_set();
  EXPECT_EQ(anti_axiom_condition(rs, seq(p, "p(x, y) |- p(y, x)")), 1);
  EXPECT_EQ(anti_axiom_condition(rs, seq(p, "p(x, y) |- emp")), 2);
  EXPECT_EQ(anti_axiom_condition(rs, seq(p, "p(x, y) * p(z, y) |- q(x, y)")), 3);
  EXPECT_EQ(anti_axiom_condition(rs, seq(p, "[V: y] p(x, y) |- r(x)")), 4);
  EXPECT_EQ(anti_axiom_condition(rs, seq(p, "p(x, y) |- r(x)")), 5);
  EXPECT_FALSE(anti_axiom_condition(rs, seq(p, "p(x, y) |- q(x, y)")).has_value());
  EXPECT_FALSE(anti_axiom_condition(rs, seq(p, "p(x, y) /\\ x = y |- emp")).has_value());
}

TEST(Narrow, CountsFreeRhsLocations) {
  ProblemFile p = anti_rules();
  RuleSet rs = p.rule_set();
  Sequent s = seq(p, "x -> (y) * z -> (w) |- q(x, y) * q(z, w)");
  EXPECT_EQ(narrow_vars(s), (std::set<Term>{loc("w"), loc("y")}));
  EXPECT_TRUE(is_narrow(rs, s));
  Sequent wide = seq(p, "x -> (y) * z -> (w) * u -> (v) |- q(x, y) * q(z, w) * q(u, v)");
  EXPECT_FALSE(is_narrow(rs, wide));
  EXPECT_FALSE(is_narrow(rs, seq(p, "x -> (y) /\\ x = y |- q(x, y)")));
  EXPECT_EQ(spec_vars(seq(p, "x -> (y) |- q(y, x)")), (std::set<Term>{loc("y")}));
}

// Axioms are valid and anti-axioms are refutable, checked by the bounded
// oracle on random sequents. With linear rules over two predicates every
// atom has a model of at most two cells.
TEST(AxiomsAndAntiAxioms, AgreeWithOracle) {
  std::mt19937 rng(31);
  const testing::CorpusShape shape{2, 2, 2, 1};
  int axioms = 0, antis = 0;
  for (int i = 0; i < 400; ++i) {
    RuleSet rs = testing::random_rule_set(rng, shape);
    Sequent s = testing::random_sequent(rng, rs, 2);
    if (is_axiom(s)) {
      ++axioms;
      EXPECT_FALSE(find_countermodel(rs, s, Bounds{3, 5, -1}).has_value()) << to_string(s);
    } else if (auto c = anti_axiom_condition(rs, s)) {
      ++antis;
      EXPECT_TRUE(find_countermodel(rs, s, Bounds{5, 6, -1}).has_value()) << "condition " << *c << ": " << to_string(s);
    }
  }
  EXPECT_GT(axioms, 10);
  EXPECT_GT(antis, 10);
}

}  // namespace
}  // namespace slp

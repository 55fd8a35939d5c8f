#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "helpers.hpp"
#include "slprove/syntax.hpp"

namespace slp {
namespace {

using testing::loc;

TEST(Signature, LocIsBuiltinAndCarriesNoConstants) {
  Signature sig;
  EXPECT_EQ(sig.find_sort("loc"), kLoc);
  EXPECT_THROW(sig.add_constant("nil", kLoc), SortError);
  SortId d = sig.add_sort("d");
  sig.add_constant("a", d);
  EXPECT_EQ(sig.constant_sort("a"), d);
  EXPECT_EQ(sig.constant_index("a"), 0u);
  EXPECT_THROW(sig.add_predicate("p", {d}), SortError);
}

TEST(Term, ConstantsOrderBeforeVariables) {
  Term c = Term::constant("zz", 1);
  Term v = Term::var("a", 1);
  EXPECT_LT(c, v);
  EXPECT_LT(Term::var("y"), Term::var("a", 1));
}

TEST(Canonicalize, DropsTrivialEquationsAndOrientsAtoms) {
  SymbolicHeap h{{SpatialAtom::points_to(loc("y"), {}), SpatialAtom::points_to(loc("x"), {loc("y")})},
                 {PureAtom::eq(loc("x"), loc("x")), PureAtom{PureAtom::Kind::Neq, loc("y"), loc("x")}}};
  SymbolicHeap c = canonicalize(h);
  ASSERT_EQ(c.pure.size(), 1u);
  EXPECT_EQ(c.pure[0].lhs, loc("x"));
  EXPECT_EQ(c.spatial[0].root(), loc("x"));
}

TEST(Canonicalize, EquationBetweenDistinctConstantsIsFalse) {
  Term a = Term::constant("a", 1), b = Term::constant("b", 1);
  PureFormula f = canonicalize(PureFormula{PureAtom::eq(a, b)});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_TRUE(f[0].is_false());
  EXPECT_FALSE(pure_satisfiable(f));
}

TEST(Canonicalize, IdempotentOnRandomSequents) {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    RuleSet rs = testing::random_rule_set(rng);
    Sequent s = testing::random_sequent(rng, rs);
    EXPECT_EQ(canonicalize(s), s);
  }
}

TEST(Substitution, RejectsSortMismatchAndConstants) {
  Substitution sub;
  EXPECT_THROW(sub.bind(loc("x"), Term::var("u", 1)), SortError);
  EXPECT_THROW(sub.bind(Term::constant("a", 1), Term::var("u", 1)), SortError);
  sub.bind(loc("x"), loc("x"));
  EXPECT_TRUE(sub.empty());
}

TEST(Substitution, IsSimultaneous) {
  Substitution sub;
  sub.bind(loc("x"), loc("y"));
  sub.bind(loc("y"), loc("x"));
  SpatialAtom a = sub.apply(SpatialAtom::points_to(loc("x"), {loc("y")}));
  EXPECT_EQ(a.root(), loc("y"));
  EXPECT_EQ(a.args[1], loc("x"));
}

TEST(Substitution, CanonicalizesResults) {
  Substitution sub;
  sub.bind(loc("y"), loc("x"));
  PureFormula f = sub.apply(PureFormula{PureAtom::eq(loc("x"), loc("y"))});
  EXPECT_TRUE(f.empty());
}

// Reference satisfiability by trying every assignment into a small range.
bool brute_force_sat(const std::vector<PureAtom>& atoms, const std::vector<Term>& vars) {
  std::vector<int> val(vars.size(), 0);
  const int range = static_cast<int>(vars.size()) + 2;
  auto value = [&](const Term& t) {
    if (t.is_constant()) return 100 + (t.name == "a" ? 0 : 1);
    auto it = std::find(vars.begin(), vars.end(), t);
    int v = val[static_cast<std::size_t>(it - vars.begin())];
    // Data variables may also take the constants' values.
    return (t.sort != kLoc && v >= range - 2) ? 100 + (v - (range - 2)) : v;
  };
  for (;;) {
    bool ok = std::all_of(atoms.begin(), atoms.end(),
                          [&](const PureAtom& a) { return (value(a.lhs) == value(a.rhs)) == a.is_eq(); });
    if (ok) return true;
    std::size_t i = 0;
    while (i < val.size() && ++val[i] == range) val[i++] = 0;
    if (i == val.size()) return false;
  }
}

TEST(PureSatisfiable, AgreesWithBruteForce) {
  std::mt19937 rng(11);
  std::vector<Term> terms = {loc("x"), loc("y"), loc("z"), Term::var("u", 1), Term::var("v", 1),
                             Term::constant("a", 1), Term::constant("b", 1)};
  std::vector<Term> vars(terms.begin(), terms.begin() + 5);
  for (int round = 0; round < 2000; ++round) {
    std::vector<PureAtom> atoms;
    int n = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int i = 0; i < n; ++i) {
      bool data = rng() % 2;
      auto pick = [&]() -> Term {
        if (!data) return terms[rng() % 3];
        return terms[3 + rng() % 4];
      };
      Term l = pick(), r = pick();
      atoms.push_back(rng() % 2 ? PureAtom::eq(l, r) : PureAtom::neq(l, r));
    }
    auto c = canonicalize(PureFormula(atoms));
    EXPECT_EQ(pure_satisfiable(c), brute_force_sat(c, vars)) << to_string(c);
    auto model = pure_model(c);
    EXPECT_EQ(model.has_value(), pure_satisfiable(c));
  }
}

TEST(VectorEquation, ComponentwiseOrFalse) {
  std::vector<Term> a = {loc("x"), Term::constant("a", 1)};
  std::vector<Term> b = {loc("y"), Term::constant("b", 1)};
  auto clash = vector_equation(a, b);
  ASSERT_TRUE(clash.has_value());
  EXPECT_FALSE(pure_satisfiable(*clash));
  EXPECT_FALSE(vector_equation(a, std::vector<Term>{loc("y")}).has_value());
  EXPECT_FALSE(vector_equation(a, std::vector<Term>{loc("y"), loc("z")}).has_value());
  std::vector<Term> c = {loc("y"), Term::var("u", 1)};
  auto eqs = vector_equation(a, c);
  ASSERT_TRUE(eqs.has_value());
  EXPECT_EQ(eqs->size(), 2u);
}

TEST(Printing, SequentForm) {
  Sequent s{{{SpatialAtom::points_to(loc("x"), {loc("y")})}, {PureAtom::neq(loc("x"), loc("y"))}},
            {loc("y")},
            {{SpatialAtom::predicate("p", {loc("x"), loc("y")})}, {}}};
  EXPECT_EQ(to_string(s), "x -> (y) /\\ x != y |-{y} p(x, y)");
  EXPECT_EQ(to_string(SymbolicHeap{}), "emp");
}

TEST(Vars, LocVarsFiltersSort) {
  std::set<Term> vs = {loc("x"), Term::var("u", 1)};
  EXPECT_EQ(loc_vars(vs), std::set<Term>{loc("x")});
}

}  // namespace
}  // namespace slp

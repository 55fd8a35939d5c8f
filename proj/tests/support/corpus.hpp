#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp::testing {

struct CorpusShape {
  int max_predicates = 3;
  int max_rules = 3;
  int max_arity = 2;
  int max_record = 2;
};

// A signature with sort d and constants a, b : d.
Signature data_signature();

// Random loc-deterministic rule set over all-loc predicates, found by
// rejection sampling. Every predicate has at least one rule.
RuleSet random_rule_set(std::mt19937& rng, const CorpusShape& shape = {});

// Random sequent with at most `max_lhs` spatial atoms on the left. Half the
// time the lhs is an unfolding of the rhs atom, possibly perturbed.
Sequent random_sequent(std::mt19937& rng, const RuleSet& rs, int max_lhs = 3);

// x1 -> (x2) * ... * xn -> () |- head(x1) where head is a list predicate.
Sequent chain_sequent(int n, const std::string& head);
RuleSet list_rule_set();

}  // namespace slp::testing

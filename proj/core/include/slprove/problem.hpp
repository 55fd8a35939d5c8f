#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Query {
  Sequent sequent;
  int line = 0;
};

struct ProblemFile {
  Signature signature;
  std::vector<InductiveRule> rules;
  std::vector<Query> queries;

  RuleSet rule_set() const { return RuleSet(signature, rules); }
};

// Structural equality; source positions are ignored.
bool same_problem(const ProblemFile& a, const ProblemFile& b);

// Grammar, one statement per `;`, `%` starts a comment:
//   sort d;            const a, b : d;        pred p(loc, d);
//   rule p(x, y) <= x -> (a, y, z) * p(z, y) /\ y != z;
//   entail [V: u] p(x, y) * q(z) /\ x != y |- q(x, y);
// Variables take their sort from predicate profiles, equations with
// constants or an explicit `name:sort` annotation, and default to loc.
// Undeclared predicates are declared on first use with an all-loc profile.
ProblemFile parse_problem(std::string_view text);

// Parses the text of a sequent (without `entail` and `;`) against `sig`,
// which may gain implicit predicate declarations.
Sequent parse_sequent(Signature& sig, std::string_view text);

std::string print_problem(const ProblemFile& p);
// A sequent in input syntax, non-loc variables annotated with their sort.
std::string print_sequent(const Signature& sig, const Sequent& s);
std::string print_rule(const Signature& sig, const InductiveRule& r);

}  // namespace slp

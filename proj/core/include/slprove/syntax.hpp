#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slp {

using SortId = std::uint32_t;
inline constexpr SortId kLoc = 0;

class SortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sorts, constants and predicate profiles. The sort `loc` always has id 0
// and carries no constants.
class Signature {
 public:
  Signature();

  SortId add_sort(const std::string& name);
  std::optional<SortId> find_sort(std::string_view name) const;
  const std::string& sort_name(SortId id) const;
  std::size_t sort_count() const { return sorts_.size(); }

  void add_constant(const std::string& name, SortId sort);
  std::optional<SortId> constant_sort(std::string_view name) const;
  // Position of the constant among the constants of its sort.
  std::size_t constant_index(std::string_view name) const;
  const std::vector<std::string>& constants_of(SortId sort) const;
  const std::vector<std::string>& constant_order() const { return constant_order_; }

  void add_predicate(const std::string& name, std::vector<SortId> profile);
  const std::vector<SortId>* profile(std::string_view name) const;
  const std::vector<std::string>& predicate_order() const { return predicate_order_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::string> sorts_;
  std::map<std::string, SortId, std::less<>> sort_ids_;
  std::vector<std::vector<std::string>> constants_by_sort_;
  std::map<std::string, std::pair<SortId, std::size_t>, std::less<>> constants_;
  std::vector<std::string> constant_order_;
  std::map<std::string, std::vector<SortId>, std::less<>> predicates_;
  std::vector<std::string> predicate_order_;
};

// Constants sort before variables; ties broken by sort then name.
struct Term {
  enum class Kind : std::uint8_t { Constant, Variable };

  Kind kind = Kind::Variable;
  SortId sort = kLoc;
  std::string name;

  static Term var(std::string name, SortId sort = kLoc) {
    return Term{Kind::Variable, sort, std::move(name)};
  }
  static Term constant(std::string name, SortId sort) {
    return Term{Kind::Constant, sort, std::move(name)};
  }

  bool is_var() const { return kind == Kind::Variable; }
  bool is_constant() const { return kind == Kind::Constant; }
  bool is_loc_var() const { return is_var() && sort == kLoc; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

// Stored oriented: lhs <= rhs.
struct PureAtom {
  enum class Kind : std::uint8_t { Eq, Neq };

  Kind kind = Kind::Eq;
  Term lhs;
  Term rhs;

  static PureAtom eq(Term a, Term b);
  static PureAtom neq(Term a, Term b);
  // The canonical false atom used when an equation between distinct
  // constants is encountered.
  static PureAtom falsum(const Term& c) { return neq(c, c); }

  bool is_eq() const { return kind == Kind::Eq; }
  bool is_neq() const { return kind == Kind::Neq; }
  bool is_false() const { return is_neq() && lhs == rhs; }
  bool is_trivial() const { return is_eq() && lhs == rhs; }
  bool mentions(const Term& t) const { return lhs == t || rhs == t; }

  friend auto operator<=>(const PureAtom&, const PureAtom&) = default;
  friend bool operator==(const PureAtom&, const PureAtom&) = default;
};

// args[0] is the root. For points-to atoms the rest of args is the tuple.
struct SpatialAtom {
  enum class Kind : std::uint8_t { PointsTo, Predicate };

  Kind kind = Kind::PointsTo;
  std::string pred;
  std::vector<Term> args;

  static SpatialAtom points_to(Term root, std::vector<Term> tuple);
  static SpatialAtom predicate(std::string name, std::vector<Term> args);

  bool is_points_to() const { return kind == Kind::PointsTo; }
  bool is_predicate() const { return kind == Kind::Predicate; }
  const Term& root() const { return args.front(); }
  std::span<const Term> tuple() const { return std::span<const Term>(args).subspan(1); }

  friend auto operator<=>(const SpatialAtom&, const SpatialAtom&) = default;
  friend bool operator==(const SpatialAtom&, const SpatialAtom&) = default;
};

using SpatialFormula = std::vector<SpatialAtom>;  // sorted multiset
using PureFormula = std::vector<PureAtom>;        // sorted set

struct SymbolicHeap {
  SpatialFormula spatial;
  PureFormula pure;

  bool is_emp() const { return spatial.empty(); }

  friend auto operator<=>(const SymbolicHeap&, const SymbolicHeap&) = default;
  friend bool operator==(const SymbolicHeap&, const SymbolicHeap&) = default;
};

// lhs |-^vset rhs. vset is a sorted multiset of loc variables.
struct Sequent {
  SymbolicHeap lhs;
  std::vector<Term> vset;
  SymbolicHeap rhs;

  friend auto operator<=>(const Sequent&, const Sequent&) = default;
  friend bool operator==(const Sequent&, const Sequent&) = default;
};

SpatialFormula canonicalize(SpatialFormula f);
PureFormula canonicalize(PureFormula f);
SymbolicHeap canonicalize(SymbolicHeap h);
Sequent canonicalize(Sequent s);

// Simultaneous, sort-preserving replacement of variables.
class Substitution {
 public:
  Substitution() = default;

  // Throws SortError when sorts differ or `from` is not a variable.
  void bind(const Term& from, const Term& to);
  const Term* find(const Term& v) const;
  bool empty() const { return map_.empty(); }
  const std::map<Term, Term>& bindings() const { return map_; }

  Term apply(const Term& t) const;
  PureAtom apply(const PureAtom& a) const;
  SpatialAtom apply(const SpatialAtom& a) const;
  SpatialFormula apply(const SpatialFormula& f) const;
  PureFormula apply(const PureFormula& f) const;
  SymbolicHeap apply(const SymbolicHeap& h) const;
  Sequent apply(const Sequent& s) const;

 private:
  std::map<Term, Term> map_;
};

void collect_vars(const SpatialAtom& a, std::set<Term>& out);
void collect_vars(const SpatialFormula& f, std::set<Term>& out);
void collect_vars(const PureFormula& f, std::set<Term>& out);
void collect_vars(const SymbolicHeap& h, std::set<Term>& out);
void collect_vars(const Sequent& s, std::set<Term>& out);

template <class T>
std::set<Term> vars_of(const T& x) {
  std::set<Term> out;
  collect_vars(x, out);
  return out;
}

std::set<Term> loc_vars(const std::set<Term>& vs);

// Union-find over terms; distinct constants are distinct.
bool pure_satisfiable(std::span<const PureAtom> atoms);

// Equivalence classes of a satisfying assignment: term -> class id. Empty
// optional when unsatisfiable.
std::optional<std::map<Term, int>> pure_model(std::span<const PureAtom> atoms);

// Pointwise expansion of a vector equation; nullopt stands for false
// (arity or sort mismatch).
std::optional<std::vector<PureAtom>> vector_equation(std::span<const Term> a,
                                                     std::span<const Term> b);

std::string to_string(const Term& t);
std::string to_string(const PureAtom& a);
std::string to_string(const SpatialAtom& a);
std::string to_string(const SpatialFormula& f);
std::string to_string(const PureFormula& f);
std::string to_string(const SymbolicHeap& h);
// Display form: `lhs |-{v1,v2} rhs`.
std::string to_string(const Sequent& s);

}  // namespace slp

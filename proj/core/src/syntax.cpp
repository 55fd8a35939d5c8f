#include "slprove/syntax.hpp"

#include <algorithm>
#include <numeric>

namespace slp {

Signature::Signature() {
  sorts_.push_back("loc");
  sort_ids_.emplace("loc", kLoc);
  constants_by_sort_.emplace_back();
}

SortId Signature::add_sort(const std::string& name) {
  if (sort_ids_.count(name)) throw SortError("sort '" + name + "' declared twice");
  auto id = static_cast<SortId>(sorts_.size());
  sorts_.push_back(name);
  sort_ids_.emplace(name, id);
  constants_by_sort_.emplace_back();
  return id;
}

std::optional<SortId> Signature::find_sort(std::string_view name) const {
  auto it = sort_ids_.find(name);
  if (it == sort_ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Signature::sort_name(SortId id) const { return sorts_.at(id); }

void Signature::add_constant(const std::string& name, SortId sort) {
  if (sort == kLoc) throw SortError("constant '" + name + "' cannot have sort loc");
  if (sort >= sorts_.size()) throw SortError("unknown sort for constant '" + name + "'");
  if (constants_.count(name)) throw SortError("constant '" + name + "' declared twice");
  constants_.emplace(name, std::make_pair(sort, constants_by_sort_[sort].size()));
  constants_by_sort_[sort].push_back(name);
  constant_order_.push_back(name);
}

std::optional<SortId> Signature::constant_sort(std::string_view name) const {
  auto it = constants_.find(name);
  if (it == constants_.end()) return std::nullopt;
  return it->second.first;
}

std::size_t Signature::constant_index(std::string_view name) const {
  auto it = constants_.find(name);
  if (it == constants_.end()) throw SortError("unknown constant '" + std::string(name) + "'");
  return it->second.second;
}

const std::vector<std::string>& Signature::constants_of(SortId sort) const {
  return constants_by_sort_.at(sort);
}

void Signature::add_predicate(const std::string& name, std::vector<SortId> profile) {
  if (predicates_.count(name)) throw SortError("predicate '" + name + "' declared twice");
  if (profile.empty() || profile.front() != kLoc)
    throw SortError("predicate '" + name + "' must take a loc first argument");
  for (SortId s : profile)
    if (s >= sorts_.size()) throw SortError("unknown sort in profile of '" + name + "'");
  predicates_.emplace(name, std::move(profile));
  predicate_order_.push_back(name);
}

const std::vector<SortId>* Signature::profile(std::string_view name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second;
}

PureAtom PureAtom::eq(Term a, Term b) {
  if (b < a) std::swap(a, b);
  return PureAtom{Kind::Eq, std::move(a), std::move(b)};
}

PureAtom PureAtom::neq(Term a, Term b) {
  if (b < a) std::swap(a, b);
  return PureAtom{Kind::Neq, std::move(a), std::move(b)};
}

SpatialAtom SpatialAtom::points_to(Term root, std::vector<Term> tuple) {
  SpatialAtom a;
  a.kind = Kind::PointsTo;
  a.args.reserve(tuple.size() + 1);
  a.args.push_back(std::move(root));
  for (auto& t : tuple) a.args.push_back(std::move(t));
  return a;
}

SpatialAtom SpatialAtom::predicate(std::string name, std::vector<Term> args) {
  return SpatialAtom{Kind::Predicate, std::move(name), std::move(args)};
}

SpatialFormula canonicalize(SpatialFormula f) {
  std::sort(f.begin(), f.end());
  return f;
}

PureFormula canonicalize(PureFormula f) {
  PureFormula out;
  out.reserve(f.size());
  for (auto& a : f) {
    if (a.rhs < a.lhs) std::swap(a.lhs, a.rhs);
    if (a.is_trivial()) continue;
    if (a.is_eq() && a.lhs.is_constant() && a.rhs.is_constant()) {
      out.push_back(PureAtom::falsum(a.lhs));
      continue;
    }
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SymbolicHeap canonicalize(SymbolicHeap h) {
  h.spatial = canonicalize(std::move(h.spatial));
  h.pure = canonicalize(std::move(h.pure));
  return h;
}

Sequent canonicalize(Sequent s) {
  s.lhs = canonicalize(std::move(s.lhs));
  s.rhs = canonicalize(std::move(s.rhs));
  std::sort(s.vset.begin(), s.vset.end());
  return s;
}

void Substitution::bind(const Term& from, const Term& to) {
  if (!from.is_var()) throw SortError("cannot substitute constant '" + from.name + "'");
  if (from.sort != to.sort)
    throw SortError("sort mismatch substituting '" + from.name + "' by '" + to.name + "'");
  if (from == to) {
    map_.erase(from);
    return;
  }
  map_[from] = to;
}

const Term* Substitution::find(const Term& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  const Term* r = find(t);
  return r ? *r : t;
}

PureAtom Substitution::apply(const PureAtom& a) const {
  return a.is_eq() ? PureAtom::eq(apply(a.lhs), apply(a.rhs))
                   : PureAtom::neq(apply(a.lhs), apply(a.rhs));
}

SpatialAtom Substitution::apply(const SpatialAtom& a) const {
  SpatialAtom r = a;
  for (auto& t : r.args) t = apply(t);
  return r;
}

SpatialFormula Substitution::apply(const SpatialFormula& f) const {
  SpatialFormula r;
  r.reserve(f.size());
  for (const auto& a : f) r.push_back(apply(a));
  return canonicalize(std::move(r));
}

PureFormula Substitution::apply(const PureFormula& f) const {
  PureFormula r;
  r.reserve(f.size());
  for (const auto& a : f) r.push_back(apply(a));
  return canonicalize(std::move(r));
}

SymbolicHeap Substitution::apply(const SymbolicHeap& h) const {
  return SymbolicHeap{apply(h.spatial), apply(h.pure)};
}

Sequent Substitution::apply(const Sequent& s) const {
  Sequent r{apply(s.lhs), {}, apply(s.rhs)};
  r.vset.reserve(s.vset.size());
  for (const auto& v : s.vset) r.vset.push_back(apply(v));
  std::sort(r.vset.begin(), r.vset.end());
  return r;
}

void collect_vars(const SpatialAtom& a, std::set<Term>& out) {
  for (const auto& t : a.args)
    if (t.is_var()) out.insert(t);
}

void collect_vars(const SpatialFormula& f, std::set<Term>& out) {
  for (const auto& a : f) collect_vars(a, out);
}

void collect_vars(const PureFormula& f, std::set<Term>& out) {
  for (const auto& a : f) {
    if (a.lhs.is_var()) out.insert(a.lhs);
    if (a.rhs.is_var()) out.insert(a.rhs);
  }
}

void collect_vars(const SymbolicHeap& h, std::set<Term>& out) {
  collect_vars(h.spatial, out);
  collect_vars(h.pure, out);
}

void collect_vars(const Sequent& s, std::set<Term>& out) {
  collect_vars(s.lhs, out);
  collect_vars(s.rhs, out);
  for (const auto& v : s.vset) out.insert(v);
}

std::set<Term> loc_vars(const std::set<Term>& vs) {
  std::set<Term> out;
  for (const auto& v : vs)
    if (v.is_loc_var()) out.insert(v);
  return out;
}

namespace {

class UnionFind {
 public:
  int add(const Term& t) {
    auto [it, fresh] = ids_.emplace(t, static_cast<int>(parent_.size()));
    if (fresh) parent_.push_back(it->second);
    return it->second;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  const std::map<Term, int>& ids() const { return ids_; }

 private:
  std::map<Term, int> ids_;
  std::vector<int> parent_;
};

}  // namespace

std::optional<std::map<Term, int>> pure_model(std::span<const PureAtom> atoms) {
  UnionFind uf;
  for (const auto& a : atoms) {
    int l = uf.add(a.lhs);
    int r = uf.add(a.rhs);
    if (a.is_eq()) uf.unite(l, r);
  }
  std::map<int, const Term*> constant_of_class;
  for (const auto& [t, id] : uf.ids()) {
    if (!t.is_constant()) continue;
    auto [it, fresh] = constant_of_class.emplace(uf.find(id), &t);
    if (!fresh && *it->second != t) return std::nullopt;
  }
  for (const auto& a : atoms) {
    if (a.is_neq() && uf.find(uf.ids().at(a.lhs)) == uf.find(uf.ids().at(a.rhs)))
      return std::nullopt;
  }
  std::map<Term, int> model;
  for (const auto& [t, id] : uf.ids()) model.emplace(t, uf.find(id));
  return model;
}

bool pure_satisfiable(std::span<const PureAtom> atoms) { return pure_model(atoms).has_value(); }

std::optional<std::vector<PureAtom>> vector_equation(std::span<const Term> a,
                                                     std::span<const Term> b) {
  if (a.size() != b.size()) return std::nullopt;
  std::vector<PureAtom> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].sort != b[i].sort) return std::nullopt;
    out.push_back(PureAtom::eq(a[i], b[i]));
  }
  return out;
}

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const PureAtom& a) {
  return to_string(a.lhs) + (a.is_eq() ? " = " : " != ") + to_string(a.rhs);
}

namespace {

std::string join_terms(std::span<const Term> ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ", ";
    s += to_string(ts[i]);
  }
  return s;
}

}  // namespace

std::string to_string(const SpatialAtom& a) {
  if (a.is_points_to()) return to_string(a.root()) + " -> (" + join_terms(a.tuple()) + ")";
  return a.pred + "(" + join_terms(a.args) + ")";
}

std::string to_string(const SpatialFormula& f) {
  if (f.empty()) return "emp";
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += " * ";
    s += to_string(f[i]);
  }
  return s;
}

std::string to_string(const PureFormula& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += " /\\ ";
    s += to_string(f[i]);
  }
  return s;
}

std::string to_string(const SymbolicHeap& h) {
  std::string s = to_string(h.spatial);
  if (!h.pure.empty()) s += " /\\ " + to_string(h.pure);
  return s;
}

std::string to_string(const Sequent& s) {
  return to_string(s.lhs) + " |-{" + join_terms(s.vset) + "} " + to_string(s.rhs);
}

}  // namespace slp

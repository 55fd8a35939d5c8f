#include "slprove/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <tuple>

#include "slprove/analysis.hpp"

namespace slp {

Value constant_value(const Signature& sig, const Term& c) {
  return Value{c.sort, static_cast<int>(sig.constant_index(c.name))};
}

Value eval(const Signature& sig, const Store& s, const Term& t) {
  if (t.is_constant()) return constant_value(sig, t);
  auto it = s.find(t);
  if (it == s.end()) throw std::out_of_range("unbound variable " + t.name);
  return it->second;
}

namespace {

using Mask = std::uint64_t;
using Binding = std::map<Term, Value>;

struct Ground {
  bool points_to = false;
  std::string pred;
  std::vector<Value> args;  // root first; for cells the tuple follows
};

Ground ground(const Signature& sig, const Binding& b, const SpatialAtom& a) {
  Ground g{a.is_points_to(), a.pred, {}};
  g.args.reserve(a.args.size());
  for (const auto& t : a.args) g.args.push_back(eval(sig, b, t));
  return g;
}

bool holds(const Signature& sig, const Binding& b, const PureAtom& a) {
  bool same = eval(sig, b, a.lhs) == eval(sig, b, a.rhs);
  return a.is_eq() ? same : !same;
}

void require_prules(const RuleSet& rs) {
  if (!rs.prule_shaped()) throw std::invalid_argument("the rule set does not consist of P-rules");
}

// Subheaps of a fixed heap satisfying ground atoms, as bitmasks over cells.
class Matcher {
 public:
  Matcher(const RuleSet& rs, const Heap& h) : rs_(rs), sig_(rs.signature()) {
    if (h.size() > 64) throw std::invalid_argument("heap too large for the model checker");
    for (const auto& [l, t] : h) {
      index_.emplace(l, static_cast<int>(cells_.size()));
      cells_.push_back(&t);
      locs_.push_back(l);
    }
  }

  Mask full() const { return cells_.size() == 64 ? ~Mask{0} : (Mask{1} << cells_.size()) - 1; }

  Heap to_heap(Mask m) const {
    Heap h;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (m & (Mask{1} << i)) h.emplace(locs_[i], *cells_[i]);
    return h;
  }

  std::vector<Mask> models(const Ground& g, Mask avail) {
    if (g.points_to) return cell_models(g, avail);
    return pred_models(g.pred, g.args, avail);
  }

  std::vector<Mask> combine(const std::vector<Ground>& atoms, Mask avail) {
    std::vector<Mask> acc{0};
    for (const auto& g : atoms) {
      std::vector<Mask> next;
      auto ms = models(g, avail);
      for (Mask m : acc)
        for (Mask mm : ms)
          if (!(m & mm)) next.push_back(m | mm);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      acc = std::move(next);
      if (acc.empty()) break;
    }
    return acc;
  }

 private:
  std::optional<int> cell_of(const Value& root, Mask avail) const {
    if (root.sort != kLoc) return std::nullopt;
    auto it = index_.find(root.id);
    if (it == index_.end() || !(avail & (Mask{1} << it->second))) return std::nullopt;
    return it->second;
  }

  std::vector<Mask> cell_models(const Ground& g, Mask avail) const {
    auto c = cell_of(g.args[0], avail);
    if (!c) return {};
    const auto& t = *cells_[*c];
    if (!std::equal(t.begin(), t.end(), g.args.begin() + 1, g.args.end())) return {};
    return {Mask{1} << *c};
  }

  std::vector<Mask> pred_models(const std::string& pred, const std::vector<Value>& args, Mask avail) {
    auto key = std::make_tuple(pred, args, avail);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Mask> out;
    auto c = cell_of(args[0], avail);
    if (c) {
      const Mask bit = Mask{1} << *c;
      const auto& cell = *cells_[*c];
      for (std::size_t idx : rs_.rules_of(pred)) {
        const auto& r = rs_.rules()[idx];
        const SpatialAtom* pt = r.points_to();
        if (!pt || pt->tuple().size() != cell.size() || r.params.size() != args.size()) continue;
        Binding b;
        for (std::size_t i = 0; i < args.size(); ++i) b.emplace(r.params[i], args[i]);
        if (!match_tuple(pt->tuple(), cell, b)) continue;
        if (!std::all_of(r.body.pure.begin(), r.body.pure.end(),
                         [&](const PureAtom& a) { return holds(sig_, b, a); }))
          continue;
        std::vector<Ground> body;
        for (const auto& a : r.body.spatial)
          if (a.is_predicate()) body.push_back(ground(sig_, b, a));
        for (Mask m : combine(body, avail & ~bit)) out.push_back(m | bit);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    memo_.emplace(std::move(key), out);
    return out;
  }

  bool match_tuple(std::span<const Term> terms, const std::vector<Value>& vals, Binding& b) const {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const Term& u = terms[j];
      if (u.is_constant()) {
        if (constant_value(sig_, u) != vals[j]) return false;
      } else if (auto it = b.find(u); it != b.end()) {
        if (it->second != vals[j]) return false;
      } else {
        if (u.sort != vals[j].sort) return false;
        b.emplace(u, vals[j]);
      }
    }
    return true;
  }

  const RuleSet& rs_;
  const Signature& sig_;
  std::vector<const std::vector<Value>*> cells_;
  std::vector<int> locs_;
  std::map<int, int> index_;
  std::map<std::tuple<std::string, std::vector<Value>, Mask>, std::vector<Mask>> memo_;
};

bool satisfies_spatial(const RuleSet& rs, const Structure& st, const SpatialFormula& f) {
  Matcher m(rs, st.heap);
  std::vector<Ground> gs;
  for (const auto& a : f) gs.push_back(ground(rs.signature(), st.store, a));
  auto ms = m.combine(gs, m.full());
  return std::binary_search(ms.begin(), ms.end(), m.full());
}

}  // namespace

bool satisfies(const RuleSet& rs, const Structure& st, const PureAtom& a) {
  return holds(rs.signature(), st.store, a);
}

bool satisfies(const RuleSet& rs, const Structure& st, const SymbolicHeap& h) {
  require_prules(rs);
  for (const auto& a : h.pure)
    if (!holds(rs.signature(), st.store, a)) return false;
  return satisfies_spatial(rs, st, h.spatial);
}

std::vector<Heap> satisfying_subheaps(const RuleSet& rs, const Structure& st, const SpatialAtom& atom) {
  require_prules(rs);
  Matcher m(rs, st.heap);
  std::vector<Heap> out;
  for (Mask mask : m.models(ground(rs.signature(), st.store, atom), m.full()))
    out.push_back(m.to_heap(mask));
  return out;
}

namespace {

class CountermodelSearch {
 public:
  CountermodelSearch(const RuleSet& rs, const Sequent& s, Bounds b)
      : rs_(rs), sig_(rs.signature()), seq_(s), bounds_(b), limit_(b.max_cells) {
    std::set<Term> vs = vars_of(s);
    vars_.assign(vs.begin(), vs.end());
    std::vector<int> var_count(sig_.sort_count(), 0);
    for (const auto& v : vars_) ++var_count[v.sort];
    universe_.resize(sig_.sort_count());
    for (SortId srt = 1; srt < sig_.sort_count(); ++srt) {
      int extras = b.data_extras >= 0 ? b.data_extras : var_count[srt] + 1;
      universe_[srt] = static_cast<int>(sig_.constants_of(srt).size()) + extras;
    }
  }

  std::optional<Structure> run() {
    assign(0, -1, std::vector<int>(sig_.sort_count(), -1));
    return best_;
  }

 private:
  // Restricted growth: a variable may take any value already used or the
  // next unused one, which is enough up to renaming of elements.
  void assign(std::size_t i, int max_loc, std::vector<int> max_extra) {
    if (i == vars_.size()) {
      on_store();
      return;
    }
    const Term& v = vars_[i];
    if (v.sort == kLoc) {
      int top = std::min(max_loc + 1, bounds_.max_locs - 1);
      for (int l = 0; l <= top; ++l) {
        store_[v] = Value::loc(l);
        assign(i + 1, std::max(max_loc, l), max_extra);
      }
    } else {
      int nconst = static_cast<int>(sig_.constants_of(v.sort).size());
      int used = max_extra[v.sort];
      int top = std::min(std::max(used, nconst - 1) + 1, universe_[v.sort] - 1);
      for (int d = 0; d <= top; ++d) {
        store_[v] = Value{v.sort, d};
        auto next = max_extra;
        next[v.sort] = std::max(used, d);
        assign(i + 1, max_loc, next);
      }
    }
    store_.erase(v);
  }

  void on_store() {
    vimage_.clear();
    for (const auto& v : seq_.vset)
      if (!vimage_.insert(store_.at(v).id).second) return;
    for (const auto& a : seq_.lhs.pure)
      if (!holds(sig_, store_, a)) return;
    heap_.clear();
    pending_.clear();
    for (const auto& a : seq_.lhs.spatial) pending_.push_back(ground(sig_, store_, a));
    generate();
  }

  bool fits(std::size_t extra) const { return heap_.size() + pending_.size() + extra <= static_cast<std::size_t>(limit_); }

  bool allocatable(const Value& root) const {
    return root.sort == kLoc && !heap_.count(root.id) && !vimage_.count(root.id);
  }

  void generate() {
    if (!fits(0)) return;
    if (pending_.empty()) {
      on_heap();
      return;
    }
    Ground g = std::move(pending_.back());
    pending_.pop_back();
    if (g.points_to) {
      if (allocatable(g.args[0])) {
        heap_.emplace(g.args[0].id, std::vector<Value>(g.args.begin() + 1, g.args.end()));
        generate();
        heap_.erase(g.args[0].id);
      }
    } else if (allocatable(g.args[0])) {
      for (std::size_t idx : rs_.rules_of(g.pred)) unfold(rs_.rules()[idx], g);
    }
    pending_.push_back(std::move(g));
  }

  void unfold(const InductiveRule& r, const Ground& g) {
    const SpatialAtom* pt = r.points_to();
    if (!pt || r.params.size() != g.args.size()) return;
    Binding b;
    for (std::size_t i = 0; i < g.args.size(); ++i) b.emplace(r.params[i], g.args[i]);
    std::vector<Term> open;
    for (const auto& t : pt->tuple())
      if (t.is_var() && !b.count(t) && std::find(open.begin(), open.end(), t) == open.end())
        open.push_back(t);
    bind_existentials(r, *pt, b, open, 0);
  }

  void bind_existentials(const InductiveRule& r, const SpatialAtom& pt, Binding& b,
                         const std::vector<Term>& open, std::size_t k) {
    if (k == open.size()) {
      for (const auto& a : r.body.pure)
        if (!holds(sig_, b, a)) return;
      std::size_t before = pending_.size();
      for (const auto& a : r.body.spatial) pending_.push_back(ground(sig_, b, a));
      generate();
      pending_.resize(before);
      return;
    }
    const Term& u = open[k];
    for (const Value& v : candidates(u.sort, b)) {
      b[u] = v;
      bind_existentials(r, pt, b, open, k + 1);
    }
    b.erase(u);
  }

  std::vector<Value> candidates(SortId sort, const Binding& b) const {
    std::vector<Value> out;
    if (sort != kLoc) {
      for (int d = 0; d < universe_[sort]; ++d) out.push_back(Value{sort, d});
      return out;
    }
    std::set<int> seen;
    for (const auto& [t, v] : store_)
      if (v.sort == kLoc) seen.insert(v.id);
    for (const auto& [l, tuple] : heap_) {
      seen.insert(l);
      for (const auto& v : tuple)
        if (v.sort == kLoc) seen.insert(v.id);
    }
    for (const auto& g : pending_)
      for (const auto& v : g.args)
        if (v.sort == kLoc) seen.insert(v.id);
    for (const auto& [t, v] : b)
      if (v.sort == kLoc) seen.insert(v.id);
    bool fresh_taken = false;
    for (int l = 0; l < bounds_.max_locs; ++l) {
      if (seen.count(l)) {
        out.push_back(Value::loc(l));
      } else if (!fresh_taken) {
        out.push_back(Value::loc(l));
        fresh_taken = true;
      }
    }
    return out;
  }

  void on_heap() {
    if (best_) {
      auto key = std::tie(best_->heap, best_->store);
      if (heap_.size() > best_->heap.size()) return;
      if (heap_.size() == best_->heap.size() && !(std::tie(heap_, store_) < key)) return;
    }
    Structure st{store_, heap_};
    for (const auto& a : seq_.rhs.pure) {
      if (!holds(sig_, store_, a)) {
        record(std::move(st));
        return;
      }
    }
    if (!satisfies_spatial(rs_, st, seq_.rhs.spatial)) record(std::move(st));
  }

  void record(Structure st) {
    limit_ = static_cast<int>(st.heap.size());
    best_ = std::move(st);
  }

  const RuleSet& rs_;
  const Signature& sig_;
  const Sequent& seq_;
  Bounds bounds_;
  int limit_;
  std::vector<Term> vars_;
  std::vector<int> universe_;
  Store store_;
  std::set<int> vimage_;
  Heap heap_;
  std::vector<Ground> pending_;
  std::optional<Structure> best_;
};

}  // namespace

std::optional<Structure> find_countermodel(const RuleSet& rs, const Sequent& s, Bounds b) {
  if (b.max_cells <= 0 || b.max_locs <= 0) throw std::invalid_argument("bounds must be positive");
  require_prules(rs);
  return CountermodelSearch(rs, s, b).run();
}

Heap construct_model(const RuleSet& rs, const SpatialFormula& phi, const Store& s,
                     const std::vector<int>& fresh_pool) {
  require_prules(rs);
  const Signature& sig = rs.signature();
  if (!heap_satisfiable(phi)) throw std::invalid_argument("heap-unsatisfiable formula");
  std::set<int> roots;
  for (const auto& x : alloc(phi))
    if (!roots.insert(eval(sig, s, x).id).second)
      throw std::invalid_argument("store is not injective on allocated variables");

  std::vector<int> next_data(sig.sort_count(), 0);
  for (SortId srt = 1; srt < sig.sort_count(); ++srt)
    next_data[srt] = static_cast<int>(sig.constants_of(srt).size());
  for (const auto& [t, v] : s)
    if (v.sort != kLoc) next_data[v.sort] = std::max(next_data[v.sort], v.id + 1);

  std::size_t pool_pos = 0;
  Heap h;
  std::function<void(const SpatialAtom&, const Binding&)> build = [&](const SpatialAtom& a,
                                                                     const Binding& b) {
    Ground g = ground(sig, b, a);
    if (g.args[0].sort != kLoc || h.count(g.args[0].id))
      throw std::invalid_argument("location allocated twice while building a model");
    if (g.points_to) {
      h.emplace(g.args[0].id, std::vector<Value>(g.args.begin() + 1, g.args.end()));
      return;
    }
    const InductiveRule* chosen = nullptr;
    std::size_t chosen_preds = 0;
    int rank = rs.rank(g.pred);
    for (std::size_t idx : rs.rules_of(g.pred)) {
      const auto& r = rs.rules()[idx];
      std::size_t preds = 0;
      bool shallower = true;
      for (const auto& q : r.body.spatial) {
        if (!q.is_predicate()) continue;
        ++preds;
        int qr = rs.rank(q.pred);
        if (qr < 0 || qr >= rank) shallower = false;
      }
      if (!shallower) continue;
      if (!chosen || preds < chosen_preds) {
        chosen = &r;
        chosen_preds = preds;
      }
    }
    if (!chosen) throw std::invalid_argument("predicate " + g.pred + " is not productive");
    Binding inner;
    for (std::size_t i = 0; i < g.args.size(); ++i) inner.emplace(chosen->params[i], g.args[i]);
    for (const auto& e : chosen->existentials()) {
      if (e.sort == kLoc) {
        if (pool_pos >= fresh_pool.size()) throw std::invalid_argument("fresh location pool exhausted");
        inner.emplace(e, Value::loc(fresh_pool[pool_pos++]));
      } else {
        inner.emplace(e, Value{e.sort, next_data[e.sort]++});
      }
    }
    for (const auto& q : chosen->body.spatial) build(q, inner);
  };
  for (const auto& a : phi) build(a, s);
  return h;
}

bool is_path_compatible(const RuleSet& rs, const Structure& st, const SymbolicHeap& h) {
  if (!satisfies(rs, st, h)) throw std::invalid_argument("structure is not a model of the formula");
  auto heap_reach = [&](int from) {
    std::set<int> seen{from};
    std::vector<int> todo{from};
    while (!todo.empty()) {
      int l = todo.back();
      todo.pop_back();
      auto it = st.heap.find(l);
      if (it == st.heap.end()) continue;
      for (const auto& v : it->second)
        if (v.sort == kLoc && seen.insert(v.id).second) todo.push_back(v.id);
    }
    return seen;
  };
  PathRelation paths(rs, h.spatial);
  auto locs = loc_vars(vars_of(h));
  for (const auto& x : locs) {
    auto reach = heap_reach(st.store.at(x).id);
    auto syn = paths.reachable_from(x);
    for (const auto& y : locs)
      if (reach.count(st.store.at(y).id) && !syn.count(y)) return false;
  }
  return true;
}

std::string to_string(const Signature& sig, const Value& v) {
  if (v.sort == kLoc) return "l" + std::to_string(v.id);
  const auto& cs = sig.constants_of(v.sort);
  if (v.id < static_cast<int>(cs.size())) return cs[v.id];
  return sig.sort_name(v.sort) + "#" + std::to_string(v.id - static_cast<int>(cs.size()));
}

std::string to_string(const Signature& sig, const Structure& st) {
  std::string s = "store:";
  bool first = true;
  for (const auto& [t, v] : st.store) {
    s += first ? " " : ", ";
    first = false;
    s += t.name + " = " + to_string(sig, v);
  }
  s += "\nheap:";
  if (st.heap.empty()) s += " emp";
  first = true;
  for (const auto& [l, tuple] : st.heap) {
    s += first ? " " : ", ";
    first = false;
    s += "l" + std::to_string(l) + " -> (";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) s += ", ";
      s += to_string(sig, tuple[i]);
    }
    s += ")";
  }
  return s;
}

}  // namespace slp

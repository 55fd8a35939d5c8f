#include <algorithm>
#include <numeric>

#include "slprove/prover.hpp"

namespace slp {

namespace {

// Canonical labeling by colour refinement plus individualization.
class Canonizer {
 public:
  explicit Canonizer(const Sequent& s) : seq_(s) {
    std::set<Term> vs = vars_of(s);
    vars_.assign(vs.begin(), vs.end());
    for (std::size_t i = 0; i < vars_.size(); ++i) idx_.emplace(vars_[i], static_cast<int>(i));
    where_.resize(vars_.size());
    for (const auto& a : s.lhs.spatial) add_spatial("L", a);
    for (const auto& a : s.rhs.spatial) add_spatial("R", a);
    for (const auto& a : s.lhs.pure) add_pure(a.is_eq() ? "l=" : "l!", a);
    for (const auto& a : s.rhs.pure) add_pure(a.is_eq() ? "r=" : "r!", a);
  }

  NormalizedSequent run() {
    std::vector<std::string> init(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto mult = std::count(seq_.vset.begin(), seq_.vset.end(), vars_[i]);
      init[i] = "s" + std::to_string(vars_[i].sort) + "m" + std::to_string(mult);
    }
    search(ranks(init));
    return std::move(*best_);
  }

 private:
  struct Occ {
    std::string tag;
    bool symmetric = false;
    std::vector<int> args;  // variable index, or -1 for a constant
    std::vector<std::string> constants;
  };

  void add_spatial(const std::string& side, const SpatialAtom& a) {
    add(Occ{side + (a.is_points_to() ? "->" : a.pred), false, {}, {}}, a.args);
  }
  void add_pure(const std::string& tag, const PureAtom& a) { add(Occ{tag, true, {}, {}}, {a.lhs, a.rhs}); }

  void add(Occ o, const std::vector<Term>& args) {
    std::size_t id = occs_.size();
    for (std::size_t p = 0; p < args.size(); ++p) {
      if (args[p].is_var()) {
        int v = idx_.at(args[p]);
        o.args.push_back(v);
        o.constants.emplace_back();
        where_[v].emplace_back(id, p);
      } else {
        o.args.push_back(-1);
        o.constants.push_back(args[p].name);
      }
    }
    occs_.push_back(std::move(o));
  }

  static std::vector<int> ranks(const std::vector<std::string>& sigs) {
    std::vector<std::string> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i)
      out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) - sorted.begin());
    return out;
  }

  static std::size_t classes(const std::vector<int>& c) {
    return std::set<int>(c.begin(), c.end()).size();
  }

  std::vector<int> refine(std::vector<int> colors) const {
    std::size_t n = classes(colors);
    for (;;) {
      std::vector<std::string> sigs(vars_.size());
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        std::vector<std::string> descs;
        for (const auto& [o, pos] : where_[v]) {
          const Occ& occ = occs_[o];
          std::vector<std::string> codes;
          for (std::size_t k = 0; k < occ.args.size(); ++k) {
            if (occ.args[k] < 0) codes.push_back("c" + occ.constants[k]);
            else if (occ.args[k] == static_cast<int>(v)) codes.push_back("*");
            else codes.push_back("v" + std::to_string(colors[occ.args[k]]));
          }
          std::string d = occ.tag;
          if (occ.symmetric) std::sort(codes.begin(), codes.end());
          else d += "@" + std::to_string(pos);
          d += "(";
          for (const auto& c : codes) d += c + ",";
          descs.push_back(d + ")");
        }
        std::sort(descs.begin(), descs.end());
        std::string sig = std::to_string(colors[v]) + "|";
        for (const auto& d : descs) sig += d + ";";
        sigs[v] = std::move(sig);
      }
      colors = ranks(sigs);
      std::size_t m = classes(colors);
      if (m == n) return colors;
      n = m;
    }
  }

  void search(std::vector<int> colors) {
    if (leaves_ >= kLeafBudget && best_) return;
    colors = refine(std::move(colors));
    if (classes(colors) == vars_.size()) {
      ++leaves_;
      leaf(colors);
      return;
    }
    int target = -1;
    std::map<int, int> size;
    for (int c : colors) ++size[c];
    for (const auto& [c, k] : size)
      if (k > 1) {
        target = c;
        break;
      }
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (colors[v] != target) continue;
      std::vector<int> next(colors.size());
      for (std::size_t u = 0; u < colors.size(); ++u) next[u] = 2 * colors[u] + (u == v ? 1 : 0);
      search(std::move(next));
      if (leaves_ >= kLeafBudget) return;
    }
  }

  void leaf(const std::vector<int>& colors) {
    std::vector<std::size_t> order(vars_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return colors[a] < colors[b]; });
    std::map<SortId, int> counter;
    Substitution sub;
    std::map<Term, Term> renaming;
    for (std::size_t i : order) {
      const Term& v = vars_[i];
      int k = ++counter[v.sort];
      std::string name = v.sort == kLoc ? "_" + std::to_string(k)
                                        : "_s" + std::to_string(v.sort) + "_" + std::to_string(k);
      Term to = Term::var(name, v.sort);
      sub.bind(v, to);
      renaming.emplace(v, to);
    }
    Sequent renamed = sub.apply(seq_);
    std::string key = to_string(renamed);
    if (!best_ || key < best_->key) best_ = NormalizedSequent{std::move(renamed), std::move(renaming), std::move(key)};
  }

  static constexpr int kLeafBudget = 64;

  const Sequent& seq_;
  std::vector<Term> vars_;
  std::map<Term, int> idx_;
  std::vector<Occ> occs_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> where_;
  int leaves_ = 0;
  std::optional<NormalizedSequent> best_;
};

}  // namespace

NormalizedSequent normalize(const Sequent& s) { return Canonizer(canonicalize(s)).run(); }

}  // namespace slp

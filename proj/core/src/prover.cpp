#include "slprove/prover.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "slprove/analysis.hpp"

namespace slp {

namespace {

enum class Mark : std::uint8_t { Pending, Provable, NonProvable };

struct Edge {
  RuleId rule;
  std::string detail;
  std::vector<std::size_t> children;
  // Premise variable -> child's reserved variable.
  std::vector<std::map<Term, Term>> renamings;
  std::vector<Sequent> premises;
};

struct Node {
  Sequent seq;
  bool narrow = false;
  std::optional<int> axiom;
  std::optional<int> anti;
  bool expanded = false;
  std::vector<Edge> edges;
  Mark mark = Mark::Pending;
  std::size_t np_rank = 0;
};

class Prover {
 public:
  Prover(const RuleSet& rs, const ProverOptions& opts) : rs_(rs), opts_(opts) {}

  Verdict run(const Sequent& root) {
    auto [id, renaming] = intern(root);
    if (nodes_[id].narrow) {
      decide_narrow(id);
    } else {
      decide_wide(id);
    }
    Verdict v;
    v.valid = nodes_[id].mark == Mark::Provable;
    std::map<Term, Term> display;
    for (const auto& [orig, reserved] : renaming) display.emplace(reserved, orig);
    if (v.valid) v.proof = extract_proof(id, display);
    else v.refutation = refute(id, display);
    v.stats = stats();
    return v;
  }

 private:
  std::pair<std::size_t, std::map<Term, Term>> intern(const Sequent& s) {
    NormalizedSequent n = normalize(s);
    if (auto it = index_.find(n.key); it != index_.end()) return {it->second, std::move(n.renaming)};
    if (nodes_.size() >= opts_.max_sequents)
      throw ResourceError("sequent graph exceeds " + std::to_string(opts_.max_sequents) + " normalized sequents",
                          stats());
    Node node;
    node.seq = std::move(n.sequent);
    node.narrow = is_narrow(rs_, node.seq);
    node.axiom = axiom_form(node.seq);
    if (!node.axiom) node.anti = anti_axiom_condition(rs_, node.seq);
    std::size_t id = nodes_.size();
    nodes_.push_back(std::move(node));
    index_.emplace(std::move(n.key), id);
    return {id, std::move(n.renaming)};
  }

  void expand(std::size_t id, const ValidityOracle* oracle) {
    Sequent seq = nodes_[id].seq;
    std::vector<RuleApplication> apps = enumerate_admissible(rs_, seq, oracle);
    std::vector<Edge> edges;
    for (auto& app : apps) {
      Edge e{app.rule, std::move(app.detail), {}, {}, {}};
      for (auto& p : app.premises) {
        auto [child, renaming] = intern(p);
        e.children.push_back(child);
        e.renamings.push_back(std::move(renaming));
        e.premises.push_back(std::move(p));
      }
      ++applications_[e.rule];
      edges.push_back(std::move(e));
    }
    nodes_[id].edges = std::move(edges);
    nodes_[id].expanded = true;
  }

  // Least fixpoint of non-provability over the pending nodes of `region`.
  void fixpoint(const std::vector<std::size_t>& region) {
    std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> parents;
    std::unordered_map<std::size_t, std::size_t> live;
    std::set<std::pair<std::size_t, std::size_t>> dead;
    std::deque<std::size_t> work;
    auto kill = [&](std::size_t n, std::size_t e) {
      if (!dead.emplace(n, e).second) return;
      if (--live[n] == 0 && !nodes_[n].axiom) work.push_back(n);
    };
    for (std::size_t n : region) {
      const Node& node = nodes_[n];
      if (node.mark != Mark::Pending) continue;
      live[n] = node.edges.size();
      if (node.edges.empty() && !node.axiom) work.push_back(n);
    }
    for (std::size_t n : region) {
      if (nodes_[n].mark != Mark::Pending) continue;
      for (std::size_t e = 0; e < nodes_[n].edges.size(); ++e)
        for (std::size_t c : nodes_[n].edges[e].children) {
          if (nodes_[c].mark == Mark::NonProvable) kill(n, e);
          else if (nodes_[c].mark == Mark::Pending) parents[c].emplace_back(n, e);
        }
    }
    while (!work.empty()) {
      std::size_t n = work.front();
      work.pop_front();
      if (nodes_[n].mark != Mark::Pending) continue;
      nodes_[n].mark = Mark::NonProvable;
      nodes_[n].np_rank = ++np_counter_;
      if (auto it = parents.find(n); it != parents.end())
        for (const auto& [p, e] : it->second) kill(p, e);
    }
    for (std::size_t n : region)
      if (nodes_[n].mark == Mark::Pending) nodes_[n].mark = Mark::Provable;
  }

  void decide_narrow(std::size_t start) {
    if (nodes_[start].mark != Mark::Pending) return;
    std::vector<std::size_t> region{start};
    std::set<std::size_t> seen{start};
    for (std::size_t i = 0; i < region.size(); ++i) {
      std::size_t n = region[i];
      if (!nodes_[n].narrow) throw std::logic_error("narrow region reached a sequent that is not narrow");
      if (!nodes_[n].expanded) expand(n, nullptr);
      for (const auto& e : nodes_[n].edges)
        for (std::size_t c : e.children)
          if (nodes_[c].mark == Mark::Pending && seen.insert(c).second) region.push_back(c);
    }
    fixpoint(region);
  }

  void decide_wide(std::size_t start) {
    ValidityOracle oracle = [this](const Sequent& s) {
      ++oracle_queries_;
      std::size_t id = intern(s).first;
      if (!nodes_[id].narrow)
        throw std::logic_error("validity oracle queried on a sequent that is not narrow: " + to_string(s));
      decide_narrow(id);
      return nodes_[id].mark == Mark::Provable;
    };
    std::vector<std::size_t> region{start};
    std::set<std::size_t> seen{start};
    for (std::size_t i = 0; i < region.size(); ++i) {
      std::size_t n = region[i];
      if (!nodes_[n].expanded) expand(n, &oracle);
      for (std::size_t e = 0; e < nodes_[n].edges.size(); ++e)
        for (std::size_t k = 0; k < nodes_[n].edges[e].children.size(); ++k) {
          std::size_t c = nodes_[n].edges[e].children[k];
          if (nodes_[c].narrow) decide_narrow(c);
          else if (nodes_[c].mark == Mark::Pending && seen.insert(c).second) region.push_back(c);
        }
    }
    fixpoint(region);
  }

  ProverStats stats() const {
    ProverStats s;
    s.sequents = nodes_.size();
    s.narrow_sequents = static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.narrow; }));
    s.oracle_queries = oracle_queries_;
    s.applications = applications_;
    return s;
  }

  // Display names for the premise variables of an edge, then transported
  // onto the child's reserved names.
  static std::map<Term, Term> child_display(const std::map<Term, Term>& parent, const Sequent& premise,
                                            const std::map<Term, Term>& renaming) {
    std::set<std::string> taken;
    for (const auto& [r, d] : parent) taken.insert(d.name);
    std::map<Term, Term> premise_display;
    std::vector<Term> fresh;
    for (const auto& v : vars_of(premise)) {
      if (auto it = parent.find(v); it != parent.end()) premise_display.emplace(v, it->second);
      else fresh.push_back(v);
    }
    for (const auto& v : fresh) {
      std::string base = v.name;
      while (!base.empty() && base.front() == '_') base.erase(base.begin());
      if (base.empty()) base = "v";
      std::string name = base;
      for (int k = 1; taken.count(name); ++k) name = base + std::to_string(k);
      taken.insert(name);
      premise_display.emplace(v, Term::var(name, v.sort));
    }
    std::map<Term, Term> out;
    for (const auto& [v, d] : premise_display) {
      auto it = renaming.find(v);
      out.emplace(it == renaming.end() ? v : it->second, d);
    }
    return out;
  }

  static Sequent show(const Sequent& s, const std::map<Term, Term>& display) {
    Substitution sub;
    for (const auto& [r, d] : display)
      if (r != d) sub.bind(r, d);
    return sub.apply(s);
  }

  // Rewrites reserved identifiers occurring in a rule's detail text.
  static std::string show(const std::string& text, const std::map<Term, Term>& display) {
    std::map<std::string, std::string> names;
    for (const auto& [r, d] : display) names.emplace(r.name, d.name);
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
      auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
      if (!ident(text[i])) {
        out += text[i++];
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && ident(text[j])) ++j;
      std::string tok = text.substr(i, j - i);
      auto it = names.find(tok);
      out += it == names.end() ? tok : it->second;
      i = j;
    }
    return out;
  }

  std::optional<std::size_t> provable_edge(std::size_t n) const {
    const auto& edges = nodes_[n].edges;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (std::all_of(edges[e].children.begin(), edges[e].children.end(),
                      [&](std::size_t c) { return nodes_[c].mark == Mark::Provable; }))
        return e;
    return std::nullopt;
  }

  Proof extract_proof(std::size_t root, const std::map<Term, Term>& display) const {
    Proof proof;
    std::map<std::size_t, std::size_t> on_path;  // node -> step
    build(root, display, proof, on_path);
    return proof;
  }

  std::size_t build(std::size_t n, const std::map<Term, Term>& display, Proof& proof,
                    std::map<std::size_t, std::size_t>& on_path) const {
    std::size_t step = proof.steps.size();
    proof.steps.emplace_back();
    proof.steps[step].sequent = show(nodes_[n].seq, display);
    if (auto it = on_path.find(n); it != on_path.end()) {
      proof.steps[step].kind = ProofStep::Kind::BackEdge;
      proof.steps[step].back_edge_to = it->second;
      return step;
    }
    if (nodes_[n].axiom) {
      proof.steps[step].kind = ProofStep::Kind::Axiom;
      proof.steps[step].axiom_form = *nodes_[n].axiom;
      return step;
    }
    auto e = provable_edge(n);
    if (!e) throw std::logic_error("provable sequent without a provable application");
    const Edge& edge = nodes_[n].edges[*e];
    proof.steps[step].kind = ProofStep::Kind::Inference;
    proof.steps[step].rule = edge.rule;
    proof.steps[step].detail = show(edge.detail, display);
    on_path.emplace(n, step);
    std::vector<std::size_t> children;
    for (std::size_t k = 0; k < edge.children.size(); ++k) {
      auto d = child_display(display, edge.premises[k], edge.renamings[k]);
      children.push_back(build(edge.children[k], d, proof, on_path));
    }
    on_path.erase(n);
    proof.steps[step].children = std::move(children);
    return step;
  }

  Refutation refute(std::size_t root, std::map<Term, Term> display) const {
    Refutation r;
    std::size_t n = root;
    r.path.push_back(RefutationStep{show(nodes_[n].seq, display), RuleId::W, {}});
    while (!nodes_[n].edges.empty()) {
      const Edge& edge = nodes_[n].edges.front();
      std::size_t best = 0;
      for (std::size_t k = 1; k < edge.children.size(); ++k) {
        const Node& a = nodes_[edge.children[k]];
        const Node& b = nodes_[edge.children[best]];
        if (a.mark == Mark::NonProvable && (b.mark != Mark::NonProvable || a.np_rank < b.np_rank)) best = k;
      }
      std::size_t c = edge.children[best];
      if (nodes_[c].mark != Mark::NonProvable || nodes_[c].np_rank >= nodes_[n].np_rank)
        throw std::logic_error("refutation trace lost its non-provable successor");
      std::string detail = show(edge.detail, display);
      display = child_display(display, edge.premises[best], edge.renamings[best]);
      r.path.push_back(RefutationStep{show(nodes_[c].seq, display), edge.rule, std::move(detail)});
      n = c;
    }
    if (nodes_[n].anti) {
      r.leaf = Refutation::Leaf::AntiAxiom;
      r.anti_axiom_condition = *nodes_[n].anti;
    }
    return r;
  }

  const RuleSet& rs_;
  ProverOptions opts_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<RuleId, std::size_t> applications_;
  std::size_t oracle_queries_ = 0;
  std::size_t np_counter_ = 0;
};

void print_proof(const Proof& p, std::size_t step, int depth, std::ostringstream& os) {
  const ProofStep& s = p.steps[step];
  os << std::string(2 * depth, ' ') << '[' << step << "] " << to_string(s.sequent) << "   ";
  switch (s.kind) {
    case ProofStep::Kind::Axiom:
      os << "(axiom " << s.axiom_form << ")\n";
      return;
    case ProofStep::Kind::BackEdge:
      os << "(back-edge to [" << s.back_edge_to << "])\n";
      return;
    case ProofStep::Kind::Inference:
      os << '(' << to_string(s.rule);
      if (!s.detail.empty()) os << ": " << s.detail;
      os << ")\n";
      for (std::size_t c : s.children) print_proof(p, c, depth + 1, os);
  }
}

}  // namespace

std::size_t Proof::back_edges() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const ProofStep& s) { return s.kind == ProofStep::Kind::BackEdge; }));
}

Verdict prove(const RuleSet& rs, const Sequent& root, const ProverOptions& opts) {
  if (!rs.valid()) throw std::invalid_argument("rule set is not a validated loc-deterministic P-rule set");
  return Prover(rs, opts).run(canonicalize(root));
}

std::string to_string(const Proof& p) {
  std::ostringstream os;
  if (!p.steps.empty()) print_proof(p, 0, 0, os);
  return os.str();
}

std::string to_string(const Refutation& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    if (i > 0) {
      os << "  by " << to_string(r.path[i].via);
      if (!r.path[i].detail.empty()) os << ": " << r.path[i].detail;
      os << '\n';
    }
    os << to_string(r.path[i].sequent) << '\n';
  }
  if (r.leaf == Refutation::Leaf::AntiAxiom) os << "anti-axiom (condition " << r.anti_axiom_condition << ")\n";
  else os << "stuck: no admissible rule application\n";
  return os.str();
}

}  // namespace slp

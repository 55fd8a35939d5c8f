#include "slprove/problem.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace slp {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Arrow, Le, Turnstile, And, Neq, Eq, Star, LParen, RParen, LBracket, RBracket, Comma, Semi, Colon, End };

struct Pos {
  int line = 1;
  int col = 1;
};

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

std::string describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Arrow: return "'->'";
    case Tok::Le: return "'<='";
    case Tok::Turnstile: return "'|-'";
    case Tok::And: return "'/\\'";
    case Tok::Neq: return "'!='";
    case Tok::Eq: return "'='";
    case Tok::Star: return "'*'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  Pos p;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++p.line;
        p.col = 1;
      } else {
        ++p.col;
      }
    }
  };
  static const std::pair<std::string_view, Tok> symbols[] = {
      {"->", Tok::Arrow}, {"<=", Tok::Le},     {"|-", Tok::Turnstile}, {"/\\", Tok::And},
      {"!=", Tok::Neq},   {"=", Tok::Eq},      {"*", Tok::Star},       {"(", Tok::LParen},
      {")", Tok::RParen}, {"[", Tok::LBracket}, {"]", Tok::RBracket},  {",", Tok::Comma},
      {";", Tok::Semi},   {":", Tok::Colon}};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word(src.substr(i, j - i));
      if (word.front() == '_') throw ParseError(p.line, p.col, "identifiers starting with '_' are reserved");
      out.push_back({Tok::Ident, word, p});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& [text, kind] : symbols) {
      if (src.substr(i, text.size()) == text) {
        out.push_back({kind, std::string(text), p});
        advance(text.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(p.line, p.col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", p});
  return out;
}

struct RawTerm {
  std::string name;
  std::optional<std::string> sort;
  Pos pos;
};

struct RawAtom {
  bool points_to = false;
  std::string pred;
  std::vector<RawTerm> args;
  Pos pos;
};

struct RawPure {
  bool eq = true;
  RawTerm lhs, rhs;
};

struct RawHeap {
  std::vector<RawAtom> spatial;
  std::vector<RawPure> pure;
};

// Sorts of the variables of one rule or query, by unification.
class SortScope {
 public:
  SortScope(const Signature& sig) : sig_(sig) {}

  void constrain(const RawTerm& t, SortId s) {
    if (sig_.constant_sort(t.name)) {
      if (*sig_.constant_sort(t.name) != s)
        fail(t.pos, "constant " + t.name + " has sort " + sig_.sort_name(*sig_.constant_sort(t.name)) +
                        ", expected " + sig_.sort_name(s));
      return;
    }
    int n = node(t);
    int r = find(n);
    if (!sort_[r]) {
      sort_[r] = s;
    } else if (*sort_[r] != s) {
      fail(t.pos, "variable " + t.name + " used with sorts " + sig_.sort_name(*sort_[r]) + " and " +
                      sig_.sort_name(s));
    }
  }

  void same(const RawTerm& a, const RawTerm& b) {
    auto ca = sig_.constant_sort(a.name);
    auto cb = sig_.constant_sort(b.name);
    if (ca && cb) {
      if (*ca != *cb) fail(b.pos, "constants " + a.name + " and " + b.name + " have different sorts");
      return;
    }
    if (ca) return constrain(b, *ca);
    if (cb) return constrain(a, *cb);
    int ra = find(node(a));
    int rb = find(node(b));
    if (ra == rb) return;
    if (sort_[ra] && sort_[rb] && *sort_[ra] != *sort_[rb])
      fail(b.pos, "variables " + a.name + " and " + b.name + " have different sorts");
    if (!sort_[ra]) sort_[ra] = sort_[rb];
    parent_[rb] = ra;
  }

  void see(const RawTerm& t) {
    if (t.sort) {
      auto s = sig_.find_sort(*t.sort);
      if (!s) fail(t.pos, "unknown sort " + *t.sort);
      if (sig_.constant_sort(t.name)) {
        constrain(t, *s);
        return;
      }
      constrain(t, *s);
    } else if (!sig_.constant_sort(t.name)) {
      node(t);
    }
  }

  Term term(const RawTerm& t) {
    if (auto c = sig_.constant_sort(t.name)) return Term::constant(t.name, *c);
    auto s = sort_[find(node(t))];
    return Term::var(t.name, s ? *s : kLoc);
  }

  [[noreturn]] static void fail(Pos p, const std::string& msg) { throw ParseError(p.line, p.col, msg); }

 private:
  int node(const RawTerm& t) {
    auto [it, fresh] = ids_.emplace(t.name, static_cast<int>(parent_.size()));
    if (fresh) {
      parent_.push_back(it->second);
      sort_.emplace_back();
    }
    return it->second;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  const Signature& sig_;
  std::map<std::string, int> ids_;
  std::vector<int> parent_;
  std::vector<std::optional<SortId>> sort_;
};

class Parser {
 public:
  Parser(std::string_view text, Signature& sig) : toks_(lex(text)), sig_(sig) {}

  ProblemFile file() {
    ProblemFile pf;
    while (peek().kind != Tok::End) {
      const Token& kw = expect(Tok::Ident);
      if (kw.text == "sort") {
        const Token& name = expect(Tok::Ident);
        if (sig_.find_sort(name.text)) SortScope::fail(name.pos, "sort " + name.text + " declared twice");
        sig_.add_sort(name.text);
      } else if (kw.text == "const") {
        std::vector<Token> names{expect(Tok::Ident)};
        while (accept(Tok::Comma)) names.push_back(expect(Tok::Ident));
        expect(Tok::Colon);
        const Token& sort = expect(Tok::Ident);
        auto s = sig_.find_sort(sort.text);
        if (!s) SortScope::fail(sort.pos, "unknown sort " + sort.text);
        if (*s == kLoc) SortScope::fail(sort.pos, "constants of sort loc are not supported");
        for (const auto& n : names) {
          if (sig_.constant_sort(n.text) || sig_.profile(n.text))
            SortScope::fail(n.pos, "name " + n.text + " declared twice");
          sig_.add_constant(n.text, *s);
        }
      } else if (kw.text == "pred") {
        const Token& name = expect(Tok::Ident);
        expect(Tok::LParen);
        std::vector<SortId> prof;
        do {
          const Token& sort = expect(Tok::Ident);
          auto s = sig_.find_sort(sort.text);
          if (!s) SortScope::fail(sort.pos, "unknown sort " + sort.text);
          prof.push_back(*s);
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        if (sig_.profile(name.text)) SortScope::fail(name.pos, "predicate " + name.text + " declared twice");
        if (prof.front() != kLoc) SortScope::fail(name.pos, "the first argument of a predicate must be loc");
        sig_.add_predicate(name.text, prof);
      } else if (kw.text == "rule") {
        pf.rules.push_back(rule());
      } else if (kw.text == "entail") {
        int line = kw.pos.line;
        pf.queries.push_back(Query{sequent(), line});
      } else {
        SortScope::fail(kw.pos, "expected sort, const, pred, rule or entail, found '" + kw.text + "'");
      }
      expect(Tok::Semi);
    }
    pf.signature = sig_;
    return pf;
  }

  Sequent sequent_only() {
    Sequent s = sequent();
    accept(Tok::Semi);
    expect(Tok::End);
    return s;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k) {
    const Token& t = peek();
    if (t.kind != k) {
      std::string found = t.kind == Tok::Ident ? "'" + t.text + "'" : describe(t.kind);
      SortScope::fail(t.pos, "expected " + describe(k) + ", found " + found);
    }
    ++pos_;
    return t;
  }

  RawTerm raw_term() {
    const Token& id = expect(Tok::Ident);
    RawTerm t{id.text, std::nullopt, id.pos};
    if (peek().kind == Tok::Colon && peek(1).kind == Tok::Ident) {
      ++pos_;
      t.sort = expect(Tok::Ident).text;
    }
    return t;
  }

  std::vector<RawTerm> term_list() {
    std::vector<RawTerm> ts;
    expect(Tok::LParen);
    if (accept(Tok::RParen)) return ts;
    do ts.push_back(raw_term());
    while (accept(Tok::Comma));
    expect(Tok::RParen);
    return ts;
  }

  RawAtom spatial_atom() {
    const Token& id = peek();
    if (id.kind == Tok::Ident && peek(1).kind == Tok::LParen) {
      ++pos_;
      RawAtom a{false, id.text, term_list(), id.pos};
      if (a.args.empty()) SortScope::fail(id.pos, "predicate atom without arguments");
      return a;
    }
    RawTerm root = raw_term();
    expect(Tok::Arrow);
    RawAtom a{true, "", {root}, root.pos};
    if (peek().kind == Tok::LParen) {
      for (auto& t : term_list()) a.args.push_back(std::move(t));
    } else {
      a.args.push_back(raw_term());
    }
    return a;
  }

  bool starts_pure() const {
    return peek().kind == Tok::Ident && peek().text != "emp" &&
           (peek(1).kind == Tok::Eq || peek(1).kind == Tok::Neq ||
            (peek(1).kind == Tok::Colon && (peek(3).kind == Tok::Eq || peek(3).kind == Tok::Neq)));
  }

  void spatial(RawHeap& h) {
    if (peek().kind == Tok::LParen) {
      ++pos_;
      spatial(h);
      expect(Tok::RParen);
      return;
    }
    if (peek().kind == Tok::Ident && peek().text == "emp") {
      ++pos_;
      return;
    }
    h.spatial.push_back(spatial_atom());
    while (accept(Tok::Star)) h.spatial.push_back(spatial_atom());
  }

  void pure(RawHeap& h) {
    if (peek().kind == Tok::LParen) {
      ++pos_;
      pure(h);
      expect(Tok::RParen);
      return;
    }
    do {
      RawPure p;
      p.lhs = raw_term();
      if (accept(Tok::Eq)) {
        p.eq = true;
      } else {
        expect(Tok::Neq);
        p.eq = false;
      }
      p.rhs = raw_term();
      h.pure.push_back(std::move(p));
    } while (accept(Tok::And));
  }

  RawHeap heap() {
    RawHeap h;
    if (starts_pure()) {
      pure(h);
      return h;
    }
    spatial(h);
    if (accept(Tok::And)) pure(h);
    return h;
  }

  const std::vector<SortId>& profile_for(const RawAtom& a) {
    if (!sig_.profile(a.pred)) {
      if (sig_.constant_sort(a.pred)) SortScope::fail(a.pos, a.pred + " is a constant, not a predicate");
      sig_.add_predicate(a.pred, std::vector<SortId>(a.args.size(), kLoc));
    }
    const auto& prof = *sig_.profile(a.pred);
    if (prof.size() != a.args.size())
      SortScope::fail(a.pos, "predicate " + a.pred + " expects " + std::to_string(prof.size()) + " arguments");
    return prof;
  }

  void constrain_heap(SortScope& scope, const RawHeap& h) {
    for (const auto& a : h.spatial) {
      for (const auto& t : a.args) scope.see(t);
      if (a.points_to) {
        scope.constrain(a.args[0], kLoc);
      } else {
        const auto& prof = profile_for(a);
        for (std::size_t i = 0; i < a.args.size(); ++i) scope.constrain(a.args[i], prof[i]);
      }
    }
    for (const auto& p : h.pure) {
      scope.see(p.lhs);
      scope.see(p.rhs);
      scope.same(p.lhs, p.rhs);
    }
  }

  SymbolicHeap build(SortScope& scope, const RawHeap& h) {
    SymbolicHeap out;
    for (const auto& a : h.spatial) {
      std::vector<Term> args;
      for (const auto& t : a.args) args.push_back(scope.term(t));
      if (a.points_to) {
        Term root = args.front();
        args.erase(args.begin());
        out.spatial.push_back(SpatialAtom::points_to(root, std::move(args)));
      } else {
        out.spatial.push_back(SpatialAtom::predicate(a.pred, std::move(args)));
      }
    }
    for (const auto& p : h.pure) {
      Term l = scope.term(p.lhs);
      Term r = scope.term(p.rhs);
      out.pure.push_back(p.eq ? PureAtom::eq(l, r) : PureAtom::neq(l, r));
    }
    return canonicalize(std::move(out));
  }

  InductiveRule rule() {
    const Token& head = expect(Tok::Ident);
    std::vector<RawTerm> params = term_list();
    RawAtom head_atom{false, head.text, params, head.pos};
    if (params.empty()) SortScope::fail(head.pos, "rule head without parameters");
    expect(Tok::Le);
    RawHeap body = heap();

    SortScope scope(sig_);
    const auto& prof = profile_for(head_atom);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (sig_.constant_sort(params[i].name))
        SortScope::fail(params[i].pos, "rule parameter " + params[i].name + " is a constant");
      scope.see(params[i]);
      scope.constrain(params[i], prof[i]);
    }
    constrain_heap(scope, body);
    InductiveRule r;
    r.head = head.text;
    for (const auto& p : params) r.params.push_back(scope.term(p));
    r.body = build(scope, body);
    return r;
  }

  Sequent sequent() {
    std::vector<RawTerm> vs;
    bool bracket = accept(Tok::LBracket);
    if ((bracket || peek(1).kind == Tok::Colon) && peek().kind == Tok::Ident && peek().text == "V" &&
        peek(1).kind == Tok::Colon) {
      pos_ += 2;
      do vs.push_back(raw_term());
      while (accept(Tok::Comma));
    } else if (bracket) {
      SortScope::fail(peek().pos, "expected 'V:' after '['");
    }
    if (bracket) expect(Tok::RBracket);
    RawHeap lhs = heap();
    expect(Tok::Turnstile);
    RawHeap rhs = heap();

    SortScope scope(sig_);
    for (const auto& v : vs) {
      if (sig_.constant_sort(v.name)) SortScope::fail(v.pos, "constant " + v.name + " in V");
      scope.see(v);
      scope.constrain(v, kLoc);
    }
    constrain_heap(scope, lhs);
    constrain_heap(scope, rhs);
    Sequent s{build(scope, lhs), {}, build(scope, rhs)};
    for (const auto& v : vs) s.vset.push_back(scope.term(v));
    return canonicalize(std::move(s));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Signature& sig_;
};

std::string term_text(const Signature& sig, const Term& t) {
  if (t.is_var() && t.sort != kLoc) return t.name + ":" + sig.sort_name(t.sort);
  return t.name;
}

std::string terms_text(const Signature& sig, std::span<const Term> ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ", ";
    s += term_text(sig, ts[i]);
  }
  return s;
}

std::string heap_text(const Signature& sig, const SymbolicHeap& h) {
  std::string s;
  if (h.spatial.empty()) s = "emp";
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    const auto& a = h.spatial[i];
    if (i) s += " * ";
    if (a.is_points_to())
      s += term_text(sig, a.root()) + " -> (" + terms_text(sig, a.tuple()) + ")";
    else
      s += a.pred + "(" + terms_text(sig, a.args) + ")";
  }
  for (std::size_t i = 0; i < h.pure.size(); ++i) {
    const auto& a = h.pure[i];
    s += " /\\ " + term_text(sig, a.lhs) + (a.is_eq() ? " = " : " != ") + term_text(sig, a.rhs);
  }
  return s;
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  Signature sig;
  return Parser(text, sig).file();
}

Sequent parse_sequent(Signature& sig, std::string_view text) { return Parser(text, sig).sequent_only(); }

bool same_problem(const ProblemFile& a, const ProblemFile& b) {
  if (!(a.signature == b.signature) || a.rules != b.rules || a.queries.size() != b.queries.size())
    return false;
  for (std::size_t i = 0; i < a.queries.size(); ++i)
    if (a.queries[i].sequent != b.queries[i].sequent) return false;
  return true;
}

std::string print_sequent(const Signature& sig, const Sequent& s) {
  std::string out;
  if (!s.vset.empty()) out = "[V: " + terms_text(sig, s.vset) + "] ";
  return out + heap_text(sig, s.lhs) + " |- " + heap_text(sig, s.rhs);
}

std::string print_rule(const Signature& sig, const InductiveRule& r) {
  return r.head + "(" + terms_text(sig, r.params) + ") <= " + heap_text(sig, r.body);
}

std::string print_problem(const ProblemFile& p) {
  const Signature& sig = p.signature;
  std::string out;
  for (SortId s = 1; s < sig.sort_count(); ++s) out += "sort " + sig.sort_name(s) + ";\n";
  for (const auto& c : sig.constant_order())
    out += "const " + c + " : " + sig.sort_name(*sig.constant_sort(c)) + ";\n";
  for (const auto& name : sig.predicate_order()) {
    out += "pred " + name + "(";
    const auto& prof = *sig.profile(name);
    for (std::size_t i = 0; i < prof.size(); ++i) {
      if (i) out += ", ";
      out += sig.sort_name(prof[i]);
    }
    out += ");\n";
  }
  for (const auto& r : p.rules) out += "rule " + print_rule(sig, r) + ";\n";
  for (const auto& q : p.queries) out += "entail " + print_sequent(sig, q.sequent) + ";\n";
  return out;
}

}  // namespace slp

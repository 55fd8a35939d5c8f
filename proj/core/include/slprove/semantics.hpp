#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slprove/rules.hpp"
#include "slprove/syntax.hpp"

namespace slp {

// Element of the carrier of `sort`. For a non-loc sort, ids below the
// number of constants of that sort are the constants' images.
struct Value {
  SortId sort = kLoc;
  int id = 0;

  static Value loc(int id) { return Value{kLoc, id}; }

  friend auto operator<=>(const Value&, const Value&) = default;
  friend bool operator==(const Value&, const Value&) = default;
};

using Store = std::map<Term, Value>;
using Heap = std::map<int, std::vector<Value>>;

struct Structure {
  Store store;
  Heap heap;

  friend bool operator==(const Structure&, const Structure&) = default;
};

Value constant_value(const Signature& sig, const Term& c);
// Throws std::out_of_range for an unbound variable.
Value eval(const Signature& sig, const Store& s, const Term& t);

bool satisfies(const RuleSet& rs, const Structure& st, const PureAtom& a);
bool satisfies(const RuleSet& rs, const Structure& st, const SymbolicHeap& h);

// Every subheap of st.heap on which `atom` holds under st.store.
std::vector<Heap> satisfying_subheaps(const RuleSet& rs, const Structure& st, const SpatialAtom& atom);

struct Bounds {
  int max_cells = 4;
  int max_locs = 5;
  // Extra elements per data sort beyond its constants; negative means one
  // more than the number of variables of that sort.
  int data_extras = -1;
};

// Minimal counter-model by (cell count, heap, store), exhaustive up to the
// bounds. Throws std::invalid_argument for non-positive bounds.
std::optional<Structure> find_countermodel(const RuleSet& rs, const Sequent& s, Bounds b);

// A model of `phi` extending the store on existentials, built with
// shallowest rules first.
Heap construct_model(const RuleSet& rs, const SpatialFormula& phi, const Store& s,
                     const std::vector<int>& fresh_pool);

bool is_path_compatible(const RuleSet& rs, const Structure& st, const SymbolicHeap& h);

std::string to_string(const Signature& sig, const Value& v);
std::string to_string(const Signature& sig, const Structure& st);

}  // namespace slp

#pragma once

#include <string_view>

#include "slprove/problem.hpp"

namespace slp::testing {

inline Sequent seq(ProblemFile& p, std::string_view text) { return parse_sequent(p.signature, text); }

inline Term loc(const char* name) { return Term::var(name); }

}  // namespace slp::testing

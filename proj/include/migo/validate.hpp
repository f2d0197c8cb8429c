#pragma once

#include <string>
#include <vector>

#include "migo/ast.hpp"

namespace migo {

struct Diagnostic {
  std::string message;
};

// Checks the Program invariants: fn(D) = empty and fv(P) within parameters
// for every definition, closed main, call arity/kind agreement, mark
// uniqueness, no runtime constructs in source positions, non-empty selects.
// An empty result means the program is well formed.
std::vector<Diagnostic> validate(const Program& p);

} // namespace migo

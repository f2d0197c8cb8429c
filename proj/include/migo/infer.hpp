#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "migo/ast.hpp"
#include "migo/types.hpp"

namespace migo {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Infers the system of behavioural type equations of a validated program:
// one equation t_X per definition X, entry t0 for main. Value parameters are
// erased; conditionals become binary internal choice; select becomes
// external choice; new carries its buffer bound.
TypeSystem infer(const Program& p);

// Runtime typing: types a runtime state (restrictions and buffers allowed)
// and returns the set of unrestricted live buffer names. Throws on duplicate
// buffers for the same name.
struct RuntimeTyping {
  TypePtr type;
  std::set<Name> buffers;
};
RuntimeTyping infer_runtime(const Program& prog, const ProcPtr& state);

} // namespace migo

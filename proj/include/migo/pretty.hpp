#pragma once

#include <string>

#include "migo/ast.hpp"
#include "migo/types.hpp"

namespace migo {

// Emit the same surface syntax the parsers accept. Runtime constructs
// (restriction, buffers) print in a display-only form.
std::string pretty(const ExprPtr& e);
std::string pretty(const Prefix& pi);
std::string pretty(const ProcPtr& p);
std::string pretty(const Program& p);
std::string pretty(const TAction& k);
std::string pretty(const TypePtr& t);
std::string pretty(const TypeSystem& sys);

} // namespace migo

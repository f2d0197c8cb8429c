#pragma once

#include <optional>
#include <string>
#include <vector>

#include "migo/types.hpp"

namespace migo {

// The strict-decrease relation on name sequences: u < x iff x = x1..xn,
// u = x_{k+1}..xn . a1..ak with k >= 1 and every a_j fresh with respect to x.
// Order-sensitive, as defined.
bool prec(const std::vector<Name>& u, const std::vector<Name>& x);

struct FenceFailure {
  Name equation;                     // the equation under check
  std::vector<Name> call_args;       // the failing axiom instance u~
  std::vector<Name> z_env;           // and its z~ environment
  std::vector<std::string> judgement_path; // from the root judgement down
};

struct FenceResult {
  bool ok = true;
  std::optional<FenceFailure> failure;
  // argument sequences recorded at axiom instances, for the chain property
  std::vector<std::vector<Name>> axiom_args;
};

// Derivability of  G=eps |- x~ ; eps |- T  for the equation t(x~)=T.
FenceResult check_equation(const Name& t, const TypeSystem& sys);

struct FenceVerdict {
  bool fenced = true;
  Name failing_equation;
  std::optional<FenceFailure> failure;
};

// A system is fenced when every equation with parameters passes
// check_equation; parameterless equations pass vacuously.
FenceVerdict is_fenced(const TypeSystem& sys);

// Size measure with a seen-set cutting repeated type variables to 0.
long long ty_size(const TypePtr& t, const TypeSystem& sys);

// The k-th unfolding of T with respect to the name set a~: every type
// variable carries budget k; a call unfolds only while its budget is
// positive and its arguments meet a~.
TypePtr limited_unfold(int k, const std::set<Name>& names, const TypePtr& t,
                       const TypeSystem& sys);

// Occurrences of variable t in T: sums across parallel, max across choices,
// no unfolding of other variables.
long long occurrences(const TypePtr& term, const Name& t);

} // namespace migo

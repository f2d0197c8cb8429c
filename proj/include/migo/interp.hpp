#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "migo/ast.hpp"
#include "migo/barb.hpp"

// Reference semantics of MiGo: expression evaluation, one-step reduction
// under structural congruence, and barbs.

namespace migo {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Value eval_expr(const ExprPtr& e, const std::map<Name, Value>& env);

// Transition labels of the marked reduction semantics:
// eps, if(n,L), if(n,R).
struct ActionLabel {
  enum class Kind { Eps, IfL, IfR };
  Kind kind = Kind::Eps;
  int mark = -1;

  static ActionLabel eps() { return {}; }
  static ActionLabel if_left(int n) { return {Kind::IfL, n}; }
  static ActionLabel if_right(int n) { return {Kind::IfR, n}; }

  bool operator==(const ActionLabel& o) const { return kind == o.kind && mark == o.mark; }
  bool operator<(const ActionLabel& o) const {
    if (kind != o.kind) return kind < o.kind;
    return mark < o.mark;
  }
};

std::string show_label(const ActionLabel& l);

// A runtime state: a process term (runtime constructors allowed) plus the
// ambient definitions of the program it came from.
struct RuntimeState {
  ProcPtr process;
};

// Normal form used by the exploration engine: restrictions hoisted to a
// prefix in creation order, parallel components flattened and sorted, dead
// restrictions and buffers collected, inert 0 dropped. Names are renamed
// deterministically from their source base names.
ProcPtr normalize_state(const ProcPtr& p);

// Full structural-congruence canonical form (also quotients restriction
// reordering); used to compare states up to the congruence axioms.
ProcPtr canon_process(const ProcPtr& p);

// The exact one-step successor set (rule str closure via normal forms).
// A stuck state yields the empty set.
std::vector<std::pair<ActionLabel, ProcPtr>> step(const Program& prog, const ProcPtr& state);

// Barbs of the state's body under its restriction prefix.
BarbSet barbs(const Program& prog, const ProcPtr& state);

// True if the state is structurally the terminated process.
bool is_terminated(const ProcPtr& state);

} // namespace migo

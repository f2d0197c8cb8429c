#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "migo/barb.hpp"
#include "migo/types.hpp"

namespace migo {

// Labels of the type LTS.
struct Label {
  enum class Kind {
    Send,        // a!
    Recv,        // a?
    Tau,
    Sync,        // [a]
    CloseReq,    // end a
    CloseAccept, // dual of end a (buffer side)
    ClosedSend,  // send from a closed channel
    BufPush,     // enqueue into a non-full buffer
    BufPop,      // dequeue from a non-empty buffer
  };
  Kind kind = Kind::Tau;
  Name chan;

  bool is_tau() const { return kind == Kind::Tau; }
  bool operator==(const Label& o) const { return kind == o.kind && chan == o.chan; }
  bool operator<(const Label& o) const {
    if (kind != o.kind) return kind < o.kind;
    return chan < o.chan;
  }
};

std::string show_label(const Label& l);

// Engine normal form: restrictions hoisted to a prefix in creation order,
// parallel components flattened and sorted, dead restrictions and buffers
// collected.
TypePtr normalize_type_state(const TypePtr& t);

// Full structural-congruence canonical form, additionally quotienting
// restriction reordering and alpha-renaming; idempotent.
TypePtr canonicalize(const TypePtr& t);

// A symbolic state: the tracked-name set N, the term, and the bound k.
struct SymbolicState {
  std::set<Name> tracked;
  TypePtr term;
  int bound = 0;

  std::string key() const;
};

// Concrete type LTS (Fig.-5-style rules plus asynchronous buffers); calls
// unfold transparently with no restriction.
std::vector<std::pair<Label, TypePtr>> type_step(const TypeSystem& sys, const TypePtr& t);

// Symbolic semantics: a call unfolds only if it has no parameters or one of
// its arguments is tracked; a restriction's name is tracked only while
// |N| < k.
std::vector<std::pair<Label, SymbolicState>> sym_step(const SymbolicState& s,
                                                      const TypeSystem& sys);

// Names of the state's restriction prefix that the bound admits into N.
std::set<Name> tracked_names(const SymbolicState& s);

BarbSet type_barbs(const TypeSystem& sys, const TypePtr& t);

struct TypeNode {
  SymbolicState state;
  BarbSet barb_set;
  std::vector<std::pair<Label, int>> edges; // tau-closure edges
  int parent = -1;
  Label parent_label;
};

struct TypeGraph {
  std::vector<TypeNode> nodes;
  std::map<std::string, int> index;
  bool budget_exceeded = false;
  std::size_t transition_count() const;
};

// All canonical symbolic states reachable from {} |- t0<> by tau steps.
// Precondition: the system is fenced (finite control); a safety budget
// aborts loudly otherwise.
TypeGraph reachable(const TypeSystem& sys, int k, std::size_t state_budget = 500000);

} // namespace migo

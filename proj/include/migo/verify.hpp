#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "migo/fencing.hpp"
#include "migo/typesem.hpp"

namespace migo {

// Union of barbs observable within the bounded weak-barb search
// (n = k + |fn(T)| silent steps of the symbolic semantics).
BarbSet weak_barbs(const TypeSystem& sys, const TypePtr& state, int k);

bool weak_barb_k(const TypeSystem& sys, const TypePtr& state, const Barb& barb, int k);

struct CheckViolation {
  int node = -1;
  std::string barb;    // the unmatched (liveness) or offending (safety) barb
  std::string reason;
};

struct CheckOutcome {
  bool ok = true;
  std::optional<CheckViolation> violation;
};

CheckOutcome check_k_liveness_on(const TypeSystem& sys, const TypeGraph& g, int k);
CheckOutcome check_k_safety_on(const TypeSystem& sys, const TypeGraph& g, int k);

// Standalone deciders; each builds the reachable graph at bound k.
CheckOutcome check_k_liveness(const TypeSystem& sys, int k);
CheckOutcome check_k_safety(const TypeSystem& sys, int k);

// Heuristic bound: distinct newchan binder names across all equations plus
// the maximum channel-parameter arity, floored at 2.
int heuristic_k(const TypeSystem& sys);

struct VerificationConfig {
  std::optional<int> k;          // explicit bound; unset = auto
  bool emit_witness = true;
  std::size_t state_budget = 500000;
};

struct VerificationReport {
  bool fenced = true;
  std::string fence_detail;

  int k_used = 0;
  bool k_auto = false;
  std::optional<bool> live, safe; // unset when not fenced
  std::string live_detail, safe_detail;

  std::vector<std::string> witness; // pretty states + labels, initial first
  std::vector<std::pair<Label, SymbolicState>> witness_states; // replayable
  SymbolicState initial_state;

  std::size_t states = 0, transitions = 0;
  long long millis = 0;

  // auto mode sweeps k = 1..heuristic and flags every bound that fails
  std::vector<std::pair<int, std::string>> sweep_flags;

  int exit_code() const {
    if (!fenced) return 2;
    if ((live && !*live) || (safe && !*safe)) return 1;
    return 0;
  }
};

VerificationReport verify(const TypeSystem& sys, const VerificationConfig& cfg);

std::string report_to_json(const VerificationReport& r);
std::string report_to_text(const VerificationReport& r, bool show_witness);

} // namespace migo

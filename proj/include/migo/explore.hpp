#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "migo/interp.hpp"

namespace migo {

struct StateEdge {
  ActionLabel label;
  int target = -1;
};

struct StateNode {
  ProcPtr state;
  bool frontier = false; // reached but not expanded
  std::vector<StateEdge> edges;
  BarbSet barb_set;
  int parent = -1; // BFS tree parent, for witness paths
  ActionLabel parent_label;
};

struct StateGraph {
  std::vector<StateNode> nodes;
  std::map<std::string, int> index; // serial -> node
  bool budget_exceeded = false;
  bool complete() const;
  std::size_t transition_count() const;
};

// Bounded exhaustive exploration: all canonical states reachable in at most
// `depth` steps, with a hard cap on the number of stored states. Exceeding
// the cap is reported loudly, never silently truncated.
StateGraph explore(const Program& prog, int depth, std::size_t state_budget = 200000);

enum class OracleKind { OkUpToDepth, Violation, Inconclusive };

struct OracleVerdict {
  OracleKind kind = OracleKind::OkUpToDepth;
  std::string detail;                 // violated barb / offending state
  std::vector<std::string> witness;   // pretty path from the initial state
  bool explored_completely = false;
};

const char* oracle_kind_name(OracleKind k);

// Process-level liveness: every explored state's input/output barb must find
// a sync barb inside the explored region; searches that touch the frontier
// are inconclusive.
OracleVerdict oracle_liveness(const Program& prog, int depth,
                              std::size_t state_budget = 200000);
OracleVerdict oracle_liveness(const Program& prog, const StateGraph& g);

// Process-level channel safety: a closed-channel barb with a reachable close
// request or send on the same channel is a violation.
OracleVerdict oracle_safety(const Program& prog, int depth,
                            std::size_t state_budget = 200000);
OracleVerdict oracle_safety(const Program& prog, const StateGraph& g);

// Replaces the conditionals carrying the given marks by star-conditionals.
// Marks not present in the program are a precondition error.
Program star_transform(const Program& p, const std::set<int>& marks);
ProcPtr star_process(const ProcPtr& p, const std::set<int>& marks);

enum class MarkStatus { NeverFired, FinitelyObserved, InfiniteSuspect };

struct MarkReport {
  int mark = -1;
  MarkStatus status = MarkStatus::NeverFired;
  std::vector<std::string> cycle_witness; // states on an if-cycle
};

struct ConditionalReport {
  std::vector<MarkReport> marks;
  bool may_converge_evidence = false; // every explored state can reach 0
  bool inf_evidence = false;          // some mark sits on an explored cycle
  bool heuristic = true;              // always: evidence, never proof
  bool explored_completely = false;
};

ConditionalReport classify_conditionals(const Program& prog, int depth,
                                        std::size_t state_budget = 200000);

// Random-scheduler execution trace (rule choice by seeded PRNG).
struct TraceStep {
  ActionLabel label;
  std::string state; // pretty-printed successor
};
std::vector<TraceStep> run_random(const Program& prog, int steps, std::uint64_t seed);

// Graphviz rendering of an explored state graph.
std::string to_dot(const StateGraph& g);

} // namespace migo

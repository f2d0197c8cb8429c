#include "migo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <sstream>

#include <json.hpp>

#include "migo/pretty.hpp"

namespace migo {

namespace {

// fn of the body under the restriction prefix: free names plus the prefix
std::set<Name> body_names(const TypePtr& normalized) {
  std::set<Name> out = free_names(normalized);
  TypePtr t = normalized;
  while (t && t->kind == TypeTerm::Kind::Restrict) {
    out.insert(t->chan);
    t = t->cont;
  }
  return out;
}

} // namespace

BarbSet weak_barbs(const TypeSystem& sys, const TypePtr& state, int k) {
  std::set<Name> n_set = body_names(state);
  int budget = k + static_cast<int>(n_set.size());

  SymbolicState init{n_set, state, k};
  BarbSet acc;
  std::map<std::string, int> depth_seen;
  std::deque<std::pair<SymbolicState, int>> queue;
  queue.emplace_back(init, 0);
  depth_seen[init.key()] = 0;

  while (!queue.empty()) {
    auto [s, d] = queue.front();
    queue.pop_front();
    BarbSet bs = type_barbs(sys, s.term);
    acc.singles.insert(bs.singles.begin(), bs.singles.end());
    acc.multis.insert(bs.multis.begin(), bs.multis.end());
    if (d >= budget) continue;
    for (const auto& [label, succ] : sym_step(s, sys)) {
      if (!label.is_tau()) continue;
      std::string key = succ.key();
      auto it = depth_seen.find(key);
      if (it != depth_seen.end() && it->second <= d + 1) continue;
      depth_seen[key] = d + 1;
      queue.emplace_back(succ, d + 1);
    }
  }
  return acc;
}

bool weak_barb_k(const TypeSystem& sys, const TypePtr& state, const Barb& barb, int k) {
  return weak_barbs(sys, state, k).has(barb);
}

namespace {

struct WeakCache {
  const TypeSystem& sys;
  int k;
  std::map<std::string, BarbSet> memo;

  const BarbSet& get(const TypePtr& state) {
    std::string key = serial(state);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    return memo.emplace(key, weak_barbs(sys, state, k)).first->second;
  }
};

} // namespace

CheckOutcome check_k_liveness_on(const TypeSystem& sys, const TypeGraph& g, int k) {
  WeakCache cache{sys, k};
  for (size_t u = 0; u < g.nodes.size(); ++u) {
    const BarbSet& bs = g.nodes[u].barb_set;
    // (a) single input/output barbs must reach a synchronisation
    for (const auto& b : bs.singles) {
      if (b.kind != Barb::Kind::Input && b.kind != Barb::Kind::Output) continue;
      const BarbSet& weak = cache.get(g.nodes[u].state.term);
      if (!weak.has_sync(b.chan)) {
        CheckOutcome out;
        out.ok = false;
        out.violation = {static_cast<int>(u), show_barb(b),
                         "barb " + show_barb(b) + " has no weak synchronisation within bound"};
        return out;
      }
    }
    // (b) a multi-barb needs some synchronisable member
    for (const auto& multi : bs.multis) {
      const BarbSet& weak = cache.get(g.nodes[u].state.term);
      bool found = false;
      std::string label = "{";
      for (const auto& b : multi) {
        label += show_barb(b) + " ";
        if (weak.has_sync(b.chan)) found = true;
      }
      label += "}";
      if (!found) {
        CheckOutcome out;
        out.ok = false;
        out.violation = {static_cast<int>(u), label,
                         "select barbs " + label + " have no weak synchronisation within bound"};
        return out;
      }
    }
  }
  return {};
}

CheckOutcome check_k_safety_on(const TypeSystem& sys, const TypeGraph& g, int k) {
  WeakCache cache{sys, k};
  for (size_t u = 0; u < g.nodes.size(); ++u) {
    for (const auto& b : g.nodes[u].barb_set.singles) {
      if (b.kind != Barb::Kind::ClosedChan) continue;
      const BarbSet& weak = cache.get(g.nodes[u].state.term);
      if (weak.has({Barb::Kind::CloseReq, b.chan})) {
        CheckOutcome out;
        out.ok = false;
        out.violation = {static_cast<int>(u), show_barb(b),
                         "channel " + b.chan + " can be closed twice"};
        return out;
      }
      if (weak.has({Barb::Kind::Output, b.chan})) {
        CheckOutcome out;
        out.ok = false;
        out.violation = {static_cast<int>(u), show_barb(b),
                         "send on closed channel " + b.chan};
        return out;
      }
    }
  }
  return {};
}

CheckOutcome check_k_liveness(const TypeSystem& sys, int k) {
  TypeGraph g = reachable(sys, k);
  return check_k_liveness_on(sys, g, k);
}

CheckOutcome check_k_safety(const TypeSystem& sys, int k) {
  TypeGraph g = reachable(sys, k);
  return check_k_safety_on(sys, g, k);
}

namespace {

void binder_names(const TypePtr& t, std::set<Name>& out) {
  if (!t) return;
  switch (t->kind) {
    case TypeTerm::Kind::NewChan:
      out.insert(t->chan);
      binder_names(t->cont, out);
      break;
    case TypeTerm::Kind::Restrict:
    case TypeTerm::Kind::Prefix:
    case TypeTerm::Kind::CloseReq:
      binder_names(t->cont, out);
      break;
    case TypeTerm::Kind::Choice:
      for (const auto& c : t->choices) binder_names(c, out);
      break;
    case TypeTerm::Kind::Branch:
      for (const auto& [k, body] : t->branches) binder_names(body, out);
      break;
    case TypeTerm::Kind::Par:
      binder_names(t->left, out);
      binder_names(t->right, out);
      break;
    default:
      break;
  }
}

} // namespace

int heuristic_k(const TypeSystem& sys) {
  std::set<Name> binders;
  std::size_t max_arity = 0;
  for (const auto& [name, eq] : sys.equations) {
    binder_names(eq.body, binders);
    max_arity = std::max(max_arity, eq.params.size());
  }
  int k = static_cast<int>(binders.size() + max_arity);
  return std::max(k, 2);
}

namespace {

std::vector<std::pair<Label, SymbolicState>> graph_path(const TypeGraph& g, int node) {
  std::vector<std::pair<Label, SymbolicState>> out;
  std::vector<int> chain;
  for (int u = node; u >= 0; u = g.nodes[u].parent) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());
  for (size_t i = 0; i < chain.size(); ++i)
    out.emplace_back(i == 0 ? Label{} : g.nodes[chain[i]].parent_label,
                     g.nodes[chain[i]].state);
  return out;
}

std::vector<std::string> pretty_path(const std::vector<std::pair<Label, SymbolicState>>& path) {
  std::vector<std::string> out;
  for (size_t i = 0; i < path.size(); ++i) {
    std::string line;
    if (i > 0) line += show_label(path[i].first) + "  ->  ";
    line += pretty(path[i].second.term);
    out.push_back(line);
  }
  return out;
}

} // namespace

VerificationReport verify(const TypeSystem& sys, const VerificationConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;

  FenceVerdict fv = is_fenced(sys);
  if (!fv.fenced) {
    rep.fenced = false;
    std::ostringstream os;
    os << "equation " << fv.failing_equation << " is not fenced";
    if (fv.failure) {
      os << ": ";
      for (const auto& line : fv.failure->judgement_path) os << "\n    " << line;
    }
    rep.fence_detail = os.str();
    rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    return rep;
  }

  std::vector<int> bounds;
  int primary_k;
  if (cfg.k) {
    primary_k = *cfg.k;
    bounds.push_back(primary_k);
  } else {
    rep.k_auto = true;
    primary_k = heuristic_k(sys);
    for (int k = 1; k <= primary_k; ++k) bounds.push_back(k);
  }

  bool live = true, safe = true;
  bool have_fail_report = false;
  for (int k : bounds) {
    TypeGraph g = reachable(sys, k, cfg.state_budget);
    CheckOutcome lv = check_k_liveness_on(sys, g, k);
    CheckOutcome sf = check_k_safety_on(sys, g, k);
    bool k_ok = lv.ok && sf.ok;
    if (!lv.ok) {
      live = false;
      rep.sweep_flags.emplace_back(k, "liveness: " + lv.violation->reason);
    }
    if (!sf.ok) {
      safe = false;
      rep.sweep_flags.emplace_back(k, "safety: " + sf.violation->reason);
    }
    // report the first failing bound, or the largest bound when all pass
    bool take = (!k_ok && !have_fail_report) || (k == bounds.back() && !have_fail_report);
    if (take) {
      rep.k_used = k;
      rep.states = g.nodes.size();
      rep.transitions = g.transition_count();
      rep.initial_state = g.nodes.empty() ? SymbolicState{} : g.nodes[0].state;
      rep.live_detail.clear();
      rep.safe_detail.clear();
      rep.witness.clear();
      rep.witness_states.clear();
      if (!lv.ok) {
        rep.live_detail = lv.violation->reason;
        if (cfg.emit_witness) {
          rep.witness_states = graph_path(g, lv.violation->node);
          rep.witness = pretty_path(rep.witness_states);
        }
      } else if (!sf.ok) {
        rep.safe_detail = sf.violation->reason;
        if (cfg.emit_witness) {
          rep.witness_states = graph_path(g, sf.violation->node);
          rep.witness = pretty_path(rep.witness_states);
        }
      }
      have_fail_report = !k_ok;
    }
  }
  rep.live = live;
  rep.safe = safe;
  rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return rep;
}

std::string report_to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["fenced"] = r.fenced;
  if (r.fenced) {
    j["k"] = r.k_used;
    j["live"] = r.live ? nlohmann::ordered_json(*r.live) : nlohmann::ordered_json(nullptr);
    j["safe"] = r.safe ? nlohmann::ordered_json(*r.safe) : nlohmann::ordered_json(nullptr);
  } else {
    j["k"] = nullptr;
    j["live"] = nullptr;
    j["safe"] = nullptr;
  }
  j["states"] = r.states;
  j["transitions"] = r.transitions;
  j["witness"] = r.witness;
  j["millis"] = r.millis;
  return j.dump(2) + "\n";
}

std::string report_to_text(const VerificationReport& r, bool show_witness) {
  std::ostringstream os;
  if (!r.fenced) {
    os << "not fenced: " << r.fence_detail << "\n";
    return os.str();
  }
  os << "fenced: yes\n";
  os << "k: " << r.k_used << (r.k_auto ? " (auto)" : "") << "\n";
  os << "live: " << (*r.live ? "yes" : "no");
  if (!r.live_detail.empty()) os << "  (" << r.live_detail << ")";
  os << "\n";
  os << "safe: " << (*r.safe ? "yes" : "no");
  if (!r.safe_detail.empty()) os << "  (" << r.safe_detail << ")";
  os << "\n";
  os << "states: " << r.states << ", transitions: " << r.transitions << ", millis: " << r.millis
     << "\n";
  for (const auto& [k, what] : r.sweep_flags)
    os << "  bound " << k << " fails " << what << "\n";
  if (show_witness && !r.witness.empty()) {
    os << "witness:\n";
    for (const auto& line : r.witness) os << "  " << line << "\n";
  }
  return os.str();
}

} // namespace migo

#include "migo/explore.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

#include "migo/pretty.hpp"

namespace migo {

bool StateGraph::complete() const {
  if (budget_exceeded) return false;
  for (const auto& n : nodes)
    if (n.frontier) return false;
  return true;
}

std::size_t StateGraph::transition_count() const {
  std::size_t c = 0;
  for (const auto& n : nodes) c += n.edges.size();
  return c;
}

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::OkUpToDepth: return "ok-up-to-depth";
    case OracleKind::Violation: return "violation";
    case OracleKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

StateGraph explore(const Program& prog, int depth, std::size_t state_budget) {
  StateGraph g;
  ProcPtr init = normalize_state(prog.main);
  g.nodes.push_back({init});
  g.index[serial(init)] = 0;
  g.nodes[0].barb_set = barbs(prog, init);

  std::deque<std::pair<int, int>> frontier; // node, remaining depth
  frontier.emplace_back(0, depth);
  std::vector<int> best_depth(1, depth);

  while (!frontier.empty()) {
    auto [u, d] = frontier.front();
    frontier.pop_front();
    if (d <= 0) {
      // may already have been expanded via a shorter path
      continue;
    }
    if (!g.nodes[u].frontier && !g.nodes[u].edges.empty()) continue;
    auto succs = step(prog, g.nodes[u].state);
    g.nodes[u].frontier = false;
    for (const auto& [label, sp] : succs) {
      std::string key = serial(sp);
      auto it = g.index.find(key);
      int v;
      if (it == g.index.end()) {
        if (g.nodes.size() >= state_budget) {
          g.budget_exceeded = true;
          g.nodes[u].frontier = true;
          return g;
        }
        v = static_cast<int>(g.nodes.size());
        g.index[key] = v;
        StateNode node;
        node.state = sp;
        node.frontier = true;
        node.barb_set = barbs(prog, sp);
        node.parent = u;
        node.parent_label = label;
        g.nodes.push_back(std::move(node));
        best_depth.push_back(d - 1);
        if (d - 1 > 0) {
          frontier.emplace_back(v, d - 1);
          g.nodes[v].frontier = true;
        }
      } else {
        v = it->second;
        if (d - 1 > best_depth[v]) {
          best_depth[v] = d - 1;
          if (g.nodes[v].frontier && d - 1 > 0) frontier.emplace_back(v, d - 1);
        }
      }
      g.nodes[u].edges.push_back({label, v});
    }
  }
  return g;
}

namespace {

std::vector<std::string> path_to(const StateGraph& g, int node) {
  std::vector<std::string> out;
  std::vector<int> chain;
  for (int u = node; u >= 0; u = g.nodes[u].parent) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());
  for (size_t i = 0; i < chain.size(); ++i) {
    const auto& n = g.nodes[chain[i]];
    std::string line;
    if (i > 0) line += show_label(n.parent_label) + "  ->  ";
    line += pretty(n.state);
    out.push_back(line);
  }
  return out;
}

// reachable region of `u` inside the explored graph
struct Region {
  std::set<Barb> barbs_seen;
  bool touched_frontier = false;
};

Region region_of(const StateGraph& g, int u, std::vector<std::optional<Region>>& cache) {
  if (cache[u]) return *cache[u];
  Region r;
  std::vector<int> stack{u};
  std::set<int> visited{u};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    const auto& node = g.nodes[v];
    for (const auto& b : node.barb_set.singles) r.barbs_seen.insert(b);
    if (node.frontier) r.touched_frontier = true;
    for (const auto& e : node.edges)
      if (visited.insert(e.target).second) stack.push_back(e.target);
  }
  cache[u] = r;
  return r;
}

} // namespace

OracleVerdict oracle_liveness(const Program& prog, const StateGraph& g) {
  OracleVerdict out;
  out.explored_completely = g.complete();
  bool any_inconclusive = g.budget_exceeded;
  std::vector<std::optional<Region>> cache(g.nodes.size());

  for (size_t u = 0; u < g.nodes.size(); ++u) {
    const BarbSet& bs = g.nodes[u].barb_set;
    std::vector<std::pair<std::string, std::vector<Name>>> obligations;
    for (const auto& b : bs.singles) {
      if (b.kind == Barb::Kind::Input || b.kind == Barb::Kind::Output)
        obligations.push_back({show_barb(b), {b.chan}});
    }
    for (const auto& multi : bs.multis) {
      std::vector<Name> subjects;
      std::string label = "{";
      for (const auto& b : multi) {
        subjects.push_back(b.chan);
        label += show_barb(b) + " ";
      }
      label += "}";
      obligations.push_back({label, subjects});
    }
    if (obligations.empty()) continue;
    Region r = region_of(g, static_cast<int>(u), cache);
    for (const auto& [label, subjects] : obligations) {
      bool found = false;
      for (const auto& a : subjects)
        if (r.barbs_seen.count({Barb::Kind::Sync, a})) {
          found = true;
          break;
        }
      if (found) continue;
      if (r.touched_frontier) {
        any_inconclusive = true;
        continue;
      }
      out.kind = OracleKind::Violation;
      out.detail = "barb " + label + " never synchronises";
      out.witness = path_to(g, static_cast<int>(u));
      return out;
    }
  }
  out.kind = any_inconclusive ? OracleKind::Inconclusive : OracleKind::OkUpToDepth;
  return out;
}

OracleVerdict oracle_liveness(const Program& prog, int depth, std::size_t budget) {
  return oracle_liveness(prog, explore(prog, depth, budget));
}

OracleVerdict oracle_safety(const Program& prog, const StateGraph& g) {
  OracleVerdict out;
  out.explored_completely = g.complete();
  std::vector<std::optional<Region>> cache(g.nodes.size());
  for (size_t u = 0; u < g.nodes.size(); ++u) {
    for (const auto& b : g.nodes[u].barb_set.singles) {
      if (b.kind != Barb::Kind::ClosedChan) continue;
      Region r = region_of(g, static_cast<int>(u), cache);
      if (r.barbs_seen.count({Barb::Kind::CloseReq, b.chan})) {
        out.kind = OracleKind::Violation;
        out.detail = "channel " + b.chan + " closed twice";
        out.witness = path_to(g, static_cast<int>(u));
        return out;
      }
      if (r.barbs_seen.count({Barb::Kind::Output, b.chan})) {
        out.kind = OracleKind::Violation;
        out.detail = "send on closed channel " + b.chan;
        out.witness = path_to(g, static_cast<int>(u));
        return out;
      }
    }
  }
  out.kind = OracleKind::OkUpToDepth;
  return out;
}

OracleVerdict oracle_safety(const Program& prog, int depth, std::size_t budget) {
  return oracle_safety(prog, explore(prog, depth, budget));
}

namespace {

ProcPtr star_rec(const ProcPtr& p, const std::set<int>& marks) {
  if (!p) return p;
  switch (p->kind) {
    case Process::Kind::Prefixed:
      return Process::prefixed(p->prefix, star_rec(p->cont, marks));
    case Process::Kind::Close:
      return Process::close(p->chan, star_rec(p->cont, marks));
    case Process::Kind::Select: {
      std::vector<std::pair<Prefix, ProcPtr>> bs;
      for (const auto& [pi, body] : p->branches) bs.emplace_back(pi, star_rec(body, marks));
      return Process::select(std::move(bs));
    }
    case Process::Kind::Cond: {
      bool hit = p->mark && marks.count(*p->mark);
      return Process::cond(hit ? std::nullopt : p->guard, star_rec(p->then_branch, marks),
                           star_rec(p->else_branch, marks), p->mark);
    }
    case Process::Kind::NewChan:
      return Process::newchan(p->chan, p->payload, p->capacity, star_rec(p->cont, marks));
    case Process::Kind::Par:
      return Process::par(star_rec(p->left, marks), star_rec(p->right, marks));
    case Process::Kind::Restrict:
      return Process::restrict(p->chan, star_rec(p->cont, marks));
    default:
      return p;
  }
}

} // namespace

ProcPtr star_process(const ProcPtr& p, const std::set<int>& marks) { return star_rec(p, marks); }

Program star_transform(const Program& p, const std::set<int>& marks) {
  std::vector<int> existing = collect_marks(p);
  std::set<int> have(existing.begin(), existing.end());
  for (int m : marks)
    if (!have.count(m))
      throw std::invalid_argument("mark " + std::to_string(m) + " not present in program");
  Program out;
  out.main = star_rec(p.main, marks);
  for (const auto& [name, def] : p.defs) {
    Definition d = def;
    d.body = star_rec(def.body, marks);
    out.defs.emplace(name, std::move(d));
  }
  return out;
}

ConditionalReport classify_conditionals(const Program& prog, int depth,
                                        std::size_t state_budget) {
  StateGraph g = explore(prog, depth, state_budget);
  ConditionalReport rep;
  rep.explored_completely = g.complete();

  // Tarjan SCC over the explored graph
  int n = static_cast<int>(g.nodes.size());
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stck;
  int counter = 0, ncomp = 0;
  std::function<void(int)> dfs = [&](int u) {
    idx[u] = low[u] = counter++;
    stck.push_back(u);
    on_stack[u] = true;
    for (const auto& e : g.nodes[u].edges) {
      int v = e.target;
      if (idx[v] < 0) {
        dfs(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack[v]) {
        low[u] = std::min(low[u], idx[v]);
      }
    }
    if (low[u] == idx[u]) {
      for (;;) {
        int v = stck.back();
        stck.pop_back();
        on_stack[v] = false;
        comp[v] = ncomp;
        if (v == u) break;
      }
      ++ncomp;
    }
  };
  for (int u = 0; u < n; ++u)
    if (idx[u] < 0) dfs(u);

  // an SCC is cyclic if it has an internal edge
  std::vector<bool> cyclic(ncomp, false);
  for (int u = 0; u < n; ++u)
    for (const auto& e : g.nodes[u].edges)
      if (comp[u] == comp[e.target]) cyclic[comp[u]] = true;

  std::vector<int> marks = collect_marks(prog);
  std::sort(marks.begin(), marks.end());
  for (int m : marks) {
    MarkReport mr;
    mr.mark = m;
    bool fired = false, on_cycle = false, repeats = false;
    int cyc_node = -1;
    std::vector<int> fire_sources, fire_targets;
    for (int u = 0; u < n; ++u) {
      for (const auto& e : g.nodes[u].edges) {
        if (e.label.mark != m) continue;
        if (e.label.kind != ActionLabel::Kind::IfL && e.label.kind != ActionLabel::Kind::IfR)
          continue;
        fired = true;
        fire_sources.push_back(u);
        fire_targets.push_back(e.target);
        if (comp[u] == comp[e.target] && cyclic[comp[u]] && !on_cycle) {
          on_cycle = true;
          cyc_node = u;
        }
      }
    }
    // a second firing reachable from a first one means the conditional sits
    // under recursion; with an unexhausted frontier that is infinity evidence
    if (fired && !rep.explored_completely && !on_cycle) {
      std::set<int> sources(fire_sources.begin(), fire_sources.end());
      for (int t : fire_targets) {
        std::vector<int> stack{t};
        std::set<int> seen{t};
        while (!stack.empty() && !repeats) {
          int v = stack.back();
          stack.pop_back();
          if (sources.count(v)) repeats = true;
          for (const auto& e : g.nodes[v].edges)
            if (seen.insert(e.target).second) stack.push_back(e.target);
        }
        if (repeats) {
          cyc_node = t;
          break;
        }
      }
    }
    if (!fired) {
      mr.status = MarkStatus::NeverFired;
    } else if (on_cycle || repeats) {
      mr.status = MarkStatus::InfiniteSuspect;
      mr.cycle_witness.push_back(pretty(g.nodes[cyc_node].state));
      rep.inf_evidence = true;
    } else {
      mr.status = MarkStatus::FinitelyObserved;
    }
    rep.marks.push_back(std::move(mr));
  }

  // may-converge evidence: every explored state reaches a terminated state
  std::vector<std::vector<int>> rev(n);
  for (int u = 0; u < n; ++u)
    for (const auto& e : g.nodes[u].edges) rev[e.target].push_back(u);
  std::vector<bool> can_halt(n, false);
  std::deque<int> q;
  for (int u = 0; u < n; ++u)
    if (is_terminated(g.nodes[u].state)) {
      can_halt[u] = true;
      q.push_back(u);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : rev[v])
      if (!can_halt[u]) {
        can_halt[u] = true;
        q.push_back(u);
      }
  }
  rep.may_converge_evidence =
      std::all_of(can_halt.begin(), can_halt.end(), [](bool b) { return b; }) && n > 0;
  return rep;
}

std::vector<TraceStep> run_random(const Program& prog, int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TraceStep> out;
  ProcPtr state = normalize_state(prog.main);
  for (int i = 0; i < steps; ++i) {
    auto succs = step(prog, state);
    if (succs.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, succs.size() - 1);
    const auto& [label, next] = succs[pick(rng)];
    out.push_back({label, pretty(next)});
    state = next;
  }
  return out;
}

std::string to_dot(const StateGraph& g) {
  std::ostringstream os;
  os << "digraph states {\n  node [shape=box, fontname=\"monospace\"];\n";
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r.push_back('\\');
      r.push_back(c);
    }
    return r;
  };
  std::hash<std::string> h;
  for (size_t u = 0; u < g.nodes.size(); ++u) {
    std::string label = pretty(g.nodes[u].state);
    os << "  n" << u << " [label=\"" << std::hex << (h(serial(g.nodes[u].state)) & 0xffffff)
       << std::dec << "\\n" << escape(label) << "\"";
    if (g.nodes[u].frontier) os << ", style=dashed";
    os << "];\n";
  }
  for (size_t u = 0; u < g.nodes.size(); ++u)
    for (const auto& e : g.nodes[u].edges)
      os << "  n" << u << " -> n" << e.target << " [label=\"" << escape(show_label(e.label))
         << "\"];\n";
  os << "}\n";
  return os.str();
}

} // namespace migo

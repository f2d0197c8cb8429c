#include "migo/typesem.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "migo/fencing.hpp"

namespace migo {

std::string show_label(const Label& l) {
  switch (l.kind) {
    case Label::Kind::Send: return l.chan + "!";
    case Label::Kind::Recv: return l.chan + "?";
    case Label::Kind::Tau: return "tau";
    case Label::Kind::Sync: return "[" + l.chan + "]";
    case Label::Kind::CloseReq: return "end-" + l.chan;
    case Label::Kind::CloseAccept: return "end*-" + l.chan;
    case Label::Kind::ClosedSend: return "closed-" + l.chan;
    case Label::Kind::BufPush: return "push-" + l.chan;
    case Label::Kind::BufPop: return "pop-" + l.chan;
  }
  return "?";
}

namespace {

std::string base_of(const Name& n) {
  auto pos = n.find('#');
  return pos == std::string::npos ? n : n.substr(0, pos);
}

struct NormType {
  std::vector<Name> prefix;
  std::vector<TypePtr> comps;
};

void hoist(const TypePtr& t, std::map<Name, Name>& renames, int& counter,
           std::vector<std::pair<Name, Name>>& prefix, std::vector<TypePtr>& comps) {
  if (!t) return;
  switch (t->kind) {
    case TypeTerm::Kind::Restrict: {
      Name tmp = "\x01r" + std::to_string(counter++);
      prefix.emplace_back(tmp, base_of(t->chan));
      auto saved = renames;
      renames[t->chan] = tmp;
      hoist(t->cont, renames, counter, prefix, comps);
      renames = saved;
      break;
    }
    case TypeTerm::Kind::Par:
      hoist(t->left, renames, counter, prefix, comps);
      hoist(t->right, renames, counter, prefix, comps);
      break;
    case TypeTerm::Kind::Inact:
      break;
    default:
      comps.push_back(renames.empty() ? t : subst_type(t, renames));
      break;
  }
}

NormType build_normal(const TypePtr& t) {
  std::vector<std::pair<Name, Name>> prefix;
  std::vector<TypePtr> comps;
  std::map<Name, Name> renames;
  int counter = 0;
  hoist(t, renames, counter, prefix, comps);

  for (;;) {
    std::map<Name, std::set<size_t>> users;
    for (size_t i = 0; i < comps.size(); ++i)
      for (const auto& n : free_names(comps[i])) users[n].insert(i);
    bool changed = false;
    std::set<size_t> drop;
    std::vector<std::pair<Name, Name>> keep;
    for (const auto& [tmp, base] : prefix) {
      auto it = users.find(tmp);
      if (it == users.end()) {
        changed = true;
        continue;
      }
      bool only_buffers = true;
      for (size_t i : it->second) {
        const TypePtr& c = comps[i];
        if (!(c->kind == TypeTerm::Kind::Buffer && c->chan == tmp)) {
          only_buffers = false;
          break;
        }
      }
      if (only_buffers) {
        for (size_t i : it->second) drop.insert(i);
        changed = true;
        continue;
      }
      keep.emplace_back(tmp, base);
    }
    if (!changed) break;
    prefix = std::move(keep);
    std::vector<TypePtr> rem;
    for (size_t i = 0; i < comps.size(); ++i)
      if (!drop.count(i)) rem.push_back(comps[i]);
    comps = std::move(rem);
  }

  std::set<Name> taken;
  for (const auto& c : comps)
    for (const auto& n : free_names(c))
      if (n.rfind('\x01', 0) != 0) taken.insert(n);
  std::map<Name, Name> final_names;
  NormType out;
  for (const auto& [tmp, base] : prefix) {
    Name cand = base;
    for (int i = 1; taken.count(cand); ++i) cand = base + "#" + std::to_string(i);
    taken.insert(cand);
    final_names[tmp] = cand;
    out.prefix.push_back(cand);
  }
  for (auto& c : comps) {
    if (!final_names.empty()) c = subst_type(c, final_names);
    c = normalize_component(c, out.prefix, false);
  }
  std::sort(comps.begin(), comps.end(),
            [](const TypePtr& a, const TypePtr& b) { return serial(a) < serial(b); });
  out.comps = std::move(comps);
  return out;
}

// Deterministic renaming of binders nested inside a component, so that
// alpha-variants introduced by capture-avoiding substitution coincide.
// Structural mode names binders _i0, _i1, ... by traversal order; otherwise
// the source base name is kept, suffixed only on clashes.
TypePtr rename_nested(const TypePtr& t, std::map<Name, Name> ren, std::set<Name>& used,
                      bool structural, int& counter) {
  if (!t) return t;
  auto ch = [&](const Name& u) {
    auto it = ren.find(u);
    return it == ren.end() ? u : it->second;
  };
  switch (t->kind) {
    case TypeTerm::Kind::NewChan:
    case TypeTerm::Kind::Restrict: {
      std::set<Name> avoid = used;
      for (const auto& n : free_names(t->cont))
        if (n != t->chan) avoid.insert(ch(n));
      Name chosen;
      if (structural) {
        chosen = "_i" + std::to_string(counter++);
      } else {
        Name base = base_of(t->chan);
        chosen = base;
        for (int i = 1; avoid.count(chosen); ++i) chosen = base + "#" + std::to_string(i);
      }
      used.insert(chosen);
      ren[t->chan] = chosen;
      TypePtr body = rename_nested(t->cont, ren, used, structural, counter);
      if (t->kind == TypeTerm::Kind::NewChan)
        return TypeTerm::newchan(chosen, t->capacity, body);
      return TypeTerm::restrict(chosen, body);
    }
    case TypeTerm::Kind::Prefix: {
      TAction k = t->action;
      if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
      return TypeTerm::prefix(k, rename_nested(t->cont, ren, used, structural, counter));
    }
    case TypeTerm::Kind::CloseReq:
      return TypeTerm::close_req(ch(t->chan),
                                 rename_nested(t->cont, ren, used, structural, counter));
    case TypeTerm::Kind::Choice: {
      std::vector<TypePtr> cs;
      for (const auto& c : t->choices)
        cs.push_back(rename_nested(c, ren, used, structural, counter));
      return TypeTerm::choice(std::move(cs));
    }
    case TypeTerm::Kind::Branch: {
      std::vector<std::pair<TAction, TypePtr>> bs;
      for (const auto& [k0, body] : t->branches) {
        TAction k = k0;
        if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
        bs.emplace_back(k, rename_nested(body, ren, used, structural, counter));
      }
      return TypeTerm::branch(std::move(bs));
    }
    case TypeTerm::Kind::Par:
      return TypeTerm::par(rename_nested(t->left, ren, used, structural, counter),
                           rename_nested(t->right, ren, used, structural, counter));
    case TypeTerm::Kind::Call: {
      std::vector<Name> as;
      for (const auto& a : t->args) as.push_back(ch(a));
      return TypeTerm::call(t->callee, std::move(as));
    }
    case TypeTerm::Kind::Buffer:
      return TypeTerm::buffer(ch(t->chan), t->count, t->capacity, t->closed);
    default:
      return t;
  }
}

TypePtr normalize_component(const TypePtr& comp, const std::vector<Name>& prefix,
                            bool structural) {
  std::set<Name> used(prefix.begin(), prefix.end());
  for (const auto& n : free_names(comp)) used.insert(n);
  int counter = 0;
  return rename_nested(comp, {}, used, structural, counter);
}

TypePtr rebuild(const NormType& n) {
  TypePtr body = nullptr;
  for (const auto& c : n.comps) body = body ? TypeTerm::par(body, c) : c;
  if (!body) body = TypeTerm::inact();
  for (auto it = n.prefix.rbegin(); it != n.prefix.rend(); ++it)
    body = TypeTerm::restrict(*it, body);
  return body;
}

// transparent call expansion under the unfold gate
struct Expander {
  const TypeSystem& sys;
  bool gate;                   // apply the symbolic side condition
  const std::set<Name>* tracked;

  bool may_unfold(const TypePtr& call) const {
    if (!gate) return true;
    if (call->args.empty()) return true; // parameterless calls always unfold
    for (const auto& a : call->args)
      if (tracked->count(a)) return true;
    return false;
  }

  void expand_into(const TypePtr& t, int depth, std::vector<TypePtr>& out) const {
    if (!t) return;
    switch (t->kind) {
      case TypeTerm::Kind::Par:
        expand_into(t->left, depth, out);
        expand_into(t->right, depth, out);
        break;
      case TypeTerm::Kind::Inact:
        break;
      case TypeTerm::Kind::Call: {
        const TypeEquation* eq = sys.find(t->callee);
        if (!eq || eq->params.size() != t->args.size() ||
            depth > static_cast<int>(sys.equations.size()) + 1 || !may_unfold(t)) {
          out.push_back(t);
          return;
        }
        std::map<Name, Name> m;
        for (size_t i = 0; i < eq->params.size(); ++i) m[eq->params[i]] = t->args[i];
        expand_into(subst_type(eq->body, m), depth + 1, out);
        break;
      }
      default:
        out.push_back(t);
        break;
    }
  }

  std::vector<TypePtr> expand(const TypePtr& comp) const {
    std::vector<TypePtr> out;
    expand_into(comp, 0, out);
    return out;
  }
};

struct Offer {
  enum class Kind { Send, Recv, Tau };
  Kind kind;
  Name chan;
  TypePtr advance;
};

std::vector<Offer> offers_of(const TypePtr& agent) {
  std::vector<Offer> out;
  auto from_action = [&](const TAction& k, const TypePtr& cont) {
    switch (k.kind) {
      case TAction::Kind::Send: out.push_back({Offer::Kind::Send, k.chan, cont}); break;
      case TAction::Kind::Recv: out.push_back({Offer::Kind::Recv, k.chan, cont}); break;
      case TAction::Kind::Tau: out.push_back({Offer::Kind::Tau, {}, cont}); break;
    }
  };
  if (agent->kind == TypeTerm::Kind::Prefix) {
    from_action(agent->action, agent->cont);
  } else if (agent->kind == TypeTerm::Kind::Branch) {
    for (const auto& [k, body] : agent->branches) from_action(k, body);
  }
  return out;
}

// The shared transition engine over a normalized state.
struct Stepper {
  const TypeSystem& sys;
  bool symbolic;
  int k;
  std::set<Name> judgement; // N

  struct Result {
    Label label;
    TypePtr term;
  };

  std::vector<Result> run(const TypePtr& state) {
    NormType ns = build_normal(state);
    size_t m = ns.comps.size();

    // names admitted into N along the restriction prefix
    std::set<Name> tracked = judgement;
    std::set<Name> restricted(ns.prefix.begin(), ns.prefix.end());
    if (symbolic) {
      for (const auto& a : ns.prefix) {
        if (tracked.count(a)) continue;
        if (static_cast<int>(tracked.size()) < k) tracked.insert(a);
      }
    }

    Expander ex{sys, symbolic, &tracked};
    std::vector<std::vector<TypePtr>> exp(m);
    for (size_t i = 0; i < m; ++i) exp[i] = ex.expand(ns.comps[i]);

    struct ARef {
      size_t comp, idx;
    };
    std::vector<ARef> agents;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < exp[i].size(); ++j) agents.push_back({i, j});
    auto agent_term = [&](const ARef& a) -> const TypePtr& { return exp[a.comp][a.idx]; };

    std::map<Name, ARef> buffer_at;
    for (const auto& a : agents) {
      const TypePtr& t = agent_term(a);
      if (t->kind == TypeTerm::Kind::Buffer) buffer_at[t->chan] = a;
    }

    std::vector<Result> out;
    std::set<std::string> seen;
    int fresh_counter = 0;

    auto sync_label = [&](const Name& a) {
      // res-2: a synchronisation under the restriction becomes silent
      if (restricted.count(a)) return Label{Label::Kind::Tau, {}};
      return Label{Label::Kind::Sync, a};
    };

    auto emit = [&](Label label, const std::vector<std::pair<ARef, TypePtr>>& repl) {
      std::set<size_t> touched;
      for (const auto& [a, t] : repl) touched.insert(a.comp);
      std::vector<TypePtr> comps;
      for (size_t i = 0; i < m; ++i) {
        if (!touched.count(i)) {
          comps.push_back(ns.comps[i]);
          continue;
        }
        for (size_t j = 0; j < exp[i].size(); ++j) {
          TypePtr t = exp[i][j];
          for (const auto& [a, nt] : repl)
            if (a.comp == i && a.idx == j) t = nt;
          if (t) comps.push_back(t);
        }
      }
      TypePtr body = nullptr;
      for (const auto& c : comps) body = body ? TypeTerm::par(body, c) : c;
      if (!body) body = TypeTerm::inact();
      for (auto it = ns.prefix.rbegin(); it != ns.prefix.rend(); ++it)
        body = TypeTerm::restrict(*it, body);
      TypePtr succ = normalize_type_state(body);
      std::string key = show_label(label) + "\x01" + serial(succ);
      if (seen.insert(key).second) out.push_back({label, succ});
    };

    for (const auto& a : agents) {
      const TypePtr& t = agent_term(a);
      switch (t->kind) {
        case TypeTerm::Kind::Choice:
          for (const auto& c : t->choices) emit({Label::Kind::Tau, {}}, {{a, c}});
          break;
        case TypeTerm::Kind::NewChan: {
          Name fresh = t->chan + "#\x01n" + std::to_string(fresh_counter++);
          TypePtr body = subst_type(t->cont, {{t->chan, fresh}});
          TypePtr spawned = TypeTerm::restrict(
              fresh, TypeTerm::par(body, TypeTerm::buffer(fresh, 0, t->capacity, false)));
          emit({Label::Kind::Tau, {}}, {{a, spawned}});
          break;
        }
        case TypeTerm::Kind::CloseReq: {
          auto it = buffer_at.find(t->chan);
          if (it != buffer_at.end()) {
            const TypePtr& buf = agent_term(it->second);
            if (!buf->closed) {
              // close rule: request meets acceptance, silently
              emit({Label::Kind::Tau, {}},
                   {{a, t->cont}, {it->second, TypeTerm::buffer(buf->chan, 0, 0, true)}});
            }
          }
          if (!restricted.count(t->chan))
            emit({Label::Kind::CloseReq, t->chan}, {{a, t->cont}});
          break;
        }
        case TypeTerm::Kind::Buffer: {
          if (!restricted.count(t->chan)) {
            if (t->closed) {
              emit({Label::Kind::ClosedSend, t->chan}, {{a, t}});
            } else {
              emit({Label::Kind::CloseAccept, t->chan},
                   {{a, TypeTerm::buffer(t->chan, 0, 0, true)}});
              if (t->count < t->capacity)
                emit({Label::Kind::BufPush, t->chan},
                     {{a, TypeTerm::buffer(t->chan, t->count + 1, t->capacity, false)}});
              if (t->count >= 1)
                emit({Label::Kind::BufPop, t->chan},
                     {{a, TypeTerm::buffer(t->chan, t->count - 1, t->capacity, false)}});
            }
          }
          break;
        }
        default:
          break;
      }
    }

    struct ORef {
      ARef agent;
      Offer offer;
    };
    std::vector<ORef> sends, recvs;
    for (const auto& a : agents) {
      for (auto& o : offers_of(agent_term(a))) {
        if (o.kind == Offer::Kind::Tau) {
          emit({Label::Kind::Tau, {}}, {{a, o.advance}});
        } else if (o.kind == Offer::Kind::Send) {
          if (!restricted.count(o.chan)) emit({Label::Kind::Send, o.chan}, {{a, o.advance}});
          sends.push_back({a, o});
        } else {
          if (!restricted.count(o.chan)) emit({Label::Kind::Recv, o.chan}, {{a, o.advance}});
          recvs.push_back({a, o});
        }
      }
    }

    auto same_agent = [](const ARef& x, const ARef& y) {
      return x.comp == y.comp && x.idx == y.idx;
    };

    // com: send with receive
    for (const auto& s : sends)
      for (const auto& r : recvs) {
        if (s.offer.chan != r.offer.chan || same_agent(s.agent, r.agent)) continue;
        emit(sync_label(s.offer.chan), {{s.agent, s.offer.advance}, {r.agent, r.offer.advance}});
      }

    // com with closed channel, push, pop
    for (const auto& [chan, bref] : buffer_at) {
      const TypePtr& buf = agent_term(bref);
      if (buf->closed) {
        for (const auto& r : recvs)
          if (r.offer.chan == chan)
            emit(sync_label(chan), {{r.agent, r.offer.advance}, {bref, buf}});
      } else {
        if (buf->count < buf->capacity) {
          TypePtr nb = TypeTerm::buffer(chan, buf->count + 1, buf->capacity, false);
          for (const auto& s : sends)
            if (s.offer.chan == chan)
              emit(sync_label(chan), {{s.agent, s.offer.advance}, {bref, nb}});
        }
        if (buf->count >= 1) {
          TypePtr nb = TypeTerm::buffer(chan, buf->count - 1, buf->capacity, false);
          for (const auto& r : recvs)
            if (r.offer.chan == chan)
              emit(sync_label(chan), {{r.agent, r.offer.advance}, {bref, nb}});
        }
      }
    }

    return out;
  }
};

} // namespace

TypePtr normalize_type_state(const TypePtr& t) { return rebuild(build_normal(t)); }

std::string SymbolicState::key() const {
  std::string s;
  for (const auto& n : tracked) s += n + ",";
  return s + "\x01" + serial(term);
}

std::set<Name> tracked_names(const SymbolicState& s) {
  NormType ns = build_normal(s.term);
  std::set<Name> tracked = s.tracked;
  for (const auto& a : ns.prefix) {
    if (tracked.count(a)) continue;
    if (static_cast<int>(tracked.size()) < s.bound) tracked.insert(a);
  }
  return tracked;
}

std::vector<std::pair<Label, TypePtr>> type_step(const TypeSystem& sys, const TypePtr& t) {
  Stepper st{sys, false, 0, {}};
  std::vector<std::pair<Label, TypePtr>> out;
  for (auto& r : st.run(t)) out.emplace_back(r.label, r.term);
  return out;
}

std::vector<std::pair<Label, SymbolicState>> sym_step(const SymbolicState& s,
                                                      const TypeSystem& sys) {
  Stepper st{sys, true, s.bound, s.tracked};
  std::vector<std::pair<Label, SymbolicState>> out;
  for (auto& r : st.run(s.term)) out.emplace_back(r.label, SymbolicState{s.tracked, r.term, s.bound});
  return out;
}

BarbSet type_barbs(const TypeSystem& sys, const TypePtr& t) {
  NormType ns = build_normal(t);
  // barbs unfold calls with no side condition
  Expander ex{sys, false, nullptr};
  BarbSet out;
  std::vector<std::set<Barb>> offers;

  for (const auto& comp : ns.comps) {
    for (const auto& agent : ex.expand(comp)) {
      std::set<Barb> ao;
      switch (agent->kind) {
        case TypeTerm::Kind::Prefix:
          if (agent->action.kind == TAction::Kind::Send) {
            out.singles.insert({Barb::Kind::Output, agent->action.chan});
            ao.insert({Barb::Kind::Output, agent->action.chan});
          } else if (agent->action.kind == TAction::Kind::Recv) {
            out.singles.insert({Barb::Kind::Input, agent->action.chan});
            ao.insert({Barb::Kind::Input, agent->action.chan});
          }
          break;
        case TypeTerm::Kind::Branch: {
          bool all_barbed = true;
          std::vector<Barb> multi;
          for (const auto& [k, body] : agent->branches) {
            if (k.kind == TAction::Kind::Send) {
              multi.push_back({Barb::Kind::Output, k.chan});
              ao.insert({Barb::Kind::Output, k.chan});
            } else if (k.kind == TAction::Kind::Recv) {
              multi.push_back({Barb::Kind::Input, k.chan});
              ao.insert({Barb::Kind::Input, k.chan});
            } else {
              all_barbed = false;
            }
          }
          if (all_barbed && !multi.empty()) out.multis.insert(multi);
          break;
        }
        case TypeTerm::Kind::CloseReq:
          out.singles.insert({Barb::Kind::CloseReq, agent->chan});
          break;
        case TypeTerm::Kind::Buffer:
          if (agent->closed) {
            out.singles.insert({Barb::Kind::ClosedChan, agent->chan});
            ao.insert({Barb::Kind::ClosedChan, agent->chan});
          } else {
            if (agent->count < agent->capacity) {
              out.singles.insert({Barb::Kind::BufSend, agent->chan});
              ao.insert({Barb::Kind::BufSend, agent->chan});
            }
            if (agent->count >= 1) {
              out.singles.insert({Barb::Kind::BufRecv, agent->chan});
              ao.insert({Barb::Kind::BufRecv, agent->chan});
            }
          }
          break;
        default:
          break;
      }
      offers.push_back(std::move(ao));
    }
  }

  for (size_t i = 0; i < offers.size(); ++i) {
    for (const Barb& b : offers[i]) {
      if (b.kind == Barb::Kind::Input) {
        for (size_t j = 0; j < offers.size(); ++j) {
          if (i == j) continue;
          if (offers[j].count({Barb::Kind::Output, b.chan}) ||
              offers[j].count({Barb::Kind::ClosedChan, b.chan}) ||
              offers[j].count({Barb::Kind::BufRecv, b.chan}))
            out.singles.insert({Barb::Kind::Sync, b.chan});
        }
      } else if (b.kind == Barb::Kind::Output) {
        for (size_t j = 0; j < offers.size(); ++j) {
          if (i == j) continue;
          if (offers[j].count({Barb::Kind::BufSend, b.chan}))
            out.singles.insert({Barb::Kind::Sync, b.chan});
        }
      }
    }
  }

  return out;
}

std::size_t TypeGraph::transition_count() const {
  std::size_t c = 0;
  for (const auto& n : nodes) c += n.edges.size();
  return c;
}

TypeGraph reachable(const TypeSystem& sys, int k, std::size_t state_budget) {
  FenceVerdict fv = is_fenced(sys);
  if (!fv.fenced)
    throw std::invalid_argument("reachable: system is not fenced (equation " +
                                fv.failing_equation + ")");
  TypeGraph g;
  SymbolicState init{{}, normalize_type_state(TypeTerm::call(sys.entry, {})), k};
  g.nodes.push_back({init, type_barbs(sys, init.term), {}, -1, {}});
  g.index[init.key()] = 0;

  std::deque<int> queue{0};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    SymbolicState su = g.nodes[u].state;
    for (const auto& [label, sv] : sym_step(su, sys)) {
      if (!label.is_tau()) continue; // reachability follows silent steps
      std::string key = sv.key();
      auto it = g.index.find(key);
      int v;
      if (it == g.index.end()) {
        if (g.nodes.size() >= state_budget)
          throw std::runtime_error("reachable: state budget exceeded (not finite-control?)");
        v = static_cast<int>(g.nodes.size());
        g.index[key] = v;
        g.nodes.push_back({sv, type_barbs(sys, sv.term), {}, u, label});
        queue.push_back(v);
      } else {
        v = it->second;
      }
      g.nodes[u].edges.emplace_back(label, v);
    }
  }
  return g;
}

// --- full canonical form ---------------------------------------------------

namespace {

std::string keyed_serial(const TypePtr& comp, const std::map<Name, int>& colors,
                         const Name& self) {
  std::map<Name, Name> ren;
  for (const auto& [n, c] : colors)
    ren[n] = (n == self) ? "\x03self" : "\x02c" + std::to_string(c);
  return serial(ren.empty() ? comp : subst_type(comp, ren));
}

} // namespace

TypePtr canonicalize(const TypePtr& p) {
  NormType ns = build_normal(p);
  std::vector<Name> names = ns.prefix;
  std::map<Name, int> colors;
  for (const auto& n : names) colors[n] = 0;

  for (size_t round = 0; round < names.size() + 2; ++round) {
    std::map<Name, std::string> sig;
    for (const auto& n : names) {
      std::vector<std::string> pieces;
      for (const auto& c : ns.comps)
        if (free_names(c).count(n)) pieces.push_back(keyed_serial(c, colors, n));
      std::sort(pieces.begin(), pieces.end());
      std::string s;
      for (const auto& piece : pieces) s += piece + "\x04";
      sig[n] = s;
    }
    std::vector<std::string> distinct;
    for (const auto& [n, s] : sig) distinct.push_back(s);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::map<Name, int> next;
    for (const auto& n : names)
      next[n] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), sig[n]) - distinct.begin());
    if (next == colors) break;
    colors = std::move(next);
  }

  std::vector<std::pair<std::string, TypePtr>> keyed;
  for (const auto& c : ns.comps) keyed.emplace_back(keyed_serial(c, colors, "\x05"), c);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<Name, Name> final_ren;
  std::vector<Name> final_prefix;
  int next_idx = 0;
  std::set<Name> restricted(names.begin(), names.end());
  for (const auto& [key, c] : keyed) {
    std::function<void(const TypePtr&, std::set<Name>&)> walk = [&](const TypePtr& t,
                                                                    std::set<Name>& shadow) {
      if (!t) return;
      auto touch = [&](const Name& u) {
        if (restricted.count(u) && !shadow.count(u) && !final_ren.count(u)) {
          Name nn = "_" + std::to_string(next_idx++);
          final_ren[u] = nn;
          final_prefix.push_back(nn);
        }
      };
      switch (t->kind) {
        case TypeTerm::Kind::Prefix:
          if (t->action.kind != TAction::Kind::Tau) touch(t->action.chan);
          walk(t->cont, shadow);
          break;
        case TypeTerm::Kind::CloseReq:
          touch(t->chan);
          walk(t->cont, shadow);
          break;
        case TypeTerm::Kind::Choice:
          for (const auto& c2 : t->choices) walk(c2, shadow);
          break;
        case TypeTerm::Kind::Branch:
          for (const auto& [k, body] : t->branches) {
            if (k.kind != TAction::Kind::Tau) touch(k.chan);
            walk(body, shadow);
          }
          break;
        case TypeTerm::Kind::NewChan:
        case TypeTerm::Kind::Restrict: {
          bool added = shadow.insert(t->chan).second;
          walk(t->cont, shadow);
          if (added) shadow.erase(t->chan);
          break;
        }
        case TypeTerm::Kind::Par:
          walk(t->left, shadow);
          walk(t->right, shadow);
          break;
        case TypeTerm::Kind::Call:
          for (const auto& u : t->args) touch(u);
          break;
        case TypeTerm::Kind::Buffer:
          touch(t->chan);
          break;
        default:
          break;
      }
    };
    std::set<Name> shadow;
    walk(c, shadow);
  }

  std::vector<TypePtr> comps;
  for (const auto& [key, c] : keyed)
    comps.push_back(final_ren.empty() ? c : subst_type(c, final_ren));
  std::sort(comps.begin(), comps.end(),
            [](const TypePtr& a, const TypePtr& b) { return serial(a) < serial(b); });

  TypePtr body = nullptr;
  for (const auto& c : comps) body = body ? TypeTerm::par(body, c) : c;
  if (!body) body = TypeTerm::inact();
  for (auto it = final_prefix.rbegin(); it != final_prefix.rend(); ++it)
    body = TypeTerm::restrict(*it, body);
  return body;
}

} // namespace migo

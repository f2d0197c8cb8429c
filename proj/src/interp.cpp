#include "migo/interp.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace migo {

std::string show_barb(const Barb& b) {
  switch (b.kind) {
    case Barb::Kind::Input: return b.chan;
    case Barb::Kind::Output: return b.chan + "!";
    case Barb::Kind::Sync: return "[" + b.chan + "]";
    case Barb::Kind::CloseReq: return "end-" + b.chan;
    case Barb::Kind::ClosedChan: return b.chan + "#";
    case Barb::Kind::BufSend: return "push-" + b.chan;
    case Barb::Kind::BufRecv: return "pop-" + b.chan;
  }
  return "?";
}

std::string show_label(const ActionLabel& l) {
  switch (l.kind) {
    case ActionLabel::Kind::Eps: return "eps";
    case ActionLabel::Kind::IfL: return "if(" + std::to_string(l.mark) + ",L)";
    case ActionLabel::Kind::IfR: return "if(" + std::to_string(l.mark) + ",R)";
  }
  return "?";
}

Value eval_expr(const ExprPtr& e, const std::map<Name, Value>& env) {
  if (!e) throw EvalError("null expression");
  switch (e->kind) {
    case Expr::Kind::IntLit: return Value::make_int(e->int_val);
    case Expr::Kind::BoolLit: return Value::make_bool(e->bool_val);
    case Expr::Kind::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw EvalError("unbound variable '" + e->var + "'");
      return it->second;
    }
    case Expr::Kind::Not: {
      Value v = eval_expr(e->lhs, env);
      if (v.sort != Sort::Bool) throw EvalError("not() applied to non-boolean");
      return Value::make_bool(!v.b);
    }
    case Expr::Kind::Succ: {
      Value v = eval_expr(e->lhs, env);
      if (v.sort != Sort::Int) throw EvalError("succ() applied to non-integer");
      return Value::make_int(v.i + 1);
    }
    case Expr::Kind::Bin: {
      Value l = eval_expr(e->lhs, env);
      Value r = eval_expr(e->rhs, env);
      switch (e->op) {
        case BinOp::And:
        case BinOp::Or:
          if (l.sort != Sort::Bool || r.sort != Sort::Bool)
            throw EvalError("boolean operator on non-booleans");
          return Value::make_bool(e->op == BinOp::And ? (l.b && r.b) : (l.b || r.b));
        case BinOp::Eq:
          if (l.sort != r.sort) throw EvalError("comparison across sorts");
          return Value::make_bool(l == r);
        case BinOp::Ne:
          if (l.sort != r.sort) throw EvalError("comparison across sorts");
          return Value::make_bool(!(l == r));
        default:
          break;
      }
      if (l.sort != Sort::Int || r.sort != Sort::Int)
        throw EvalError("arithmetic on non-integers");
      switch (e->op) {
        case BinOp::Add: return Value::make_int(l.i + r.i);
        case BinOp::Sub: return Value::make_int(l.i - r.i);
        case BinOp::Mul: return Value::make_int(l.i * r.i);
        case BinOp::Mod:
          if (r.i == 0) throw EvalError("mod by zero");
          return Value::make_int(l.i % r.i);
        case BinOp::Lt: return Value::make_bool(l.i < r.i);
        case BinOp::Le: return Value::make_bool(l.i <= r.i);
        case BinOp::Gt: return Value::make_bool(l.i > r.i);
        case BinOp::Ge: return Value::make_bool(l.i >= r.i);
        default: break;
      }
      throw EvalError("bad operator");
    }
  }
  throw EvalError("bad expression");
}

namespace {

// --- state normal form ---------------------------------------------------

std::string base_of(const Name& n) {
  auto pos = n.find('#');
  return pos == std::string::npos ? n : n.substr(0, pos);
}

struct NormState {
  std::vector<Name> prefix;       // creation order, outermost first
  std::vector<ProcPtr> comps;     // sorted by serial
};

void hoist(const ProcPtr& p, std::map<Name, Name>& renames, int& counter,
           std::vector<std::pair<Name, Name>>& prefix, std::vector<ProcPtr>& comps) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Restrict: {
      Name tmp = "\x01r" + std::to_string(counter++);
      prefix.emplace_back(tmp, base_of(p->chan));
      auto saved = renames;
      renames[p->chan] = tmp;
      hoist(p->cont, renames, counter, prefix, comps);
      renames = saved;
      break;
    }
    case Process::Kind::Par:
      hoist(p->left, renames, counter, prefix, comps);
      hoist(p->right, renames, counter, prefix, comps);
      break;
    case Process::Kind::Inact:
      break;
    default:
      comps.push_back(renames.empty() ? p : subst(p, {}, renames));
      break;
  }
}

NormState build_normal(const ProcPtr& p) {
  std::vector<std::pair<Name, Name>> prefix; // (temp, base hint)
  std::vector<ProcPtr> comps;
  std::map<Name, Name> renames;
  int counter = 0;
  hoist(p, renames, counter, prefix, comps);

  // garbage collection: unused restrictions, restrictions only buffers use
  for (;;) {
    std::map<Name, std::set<size_t>> users;
    for (size_t i = 0; i < comps.size(); ++i)
      for (const auto& n : free_names(comps[i])) users[n].insert(i);
    bool changed = false;
    std::set<size_t> drop_comps;
    std::vector<std::pair<Name, Name>> keep;
    for (const auto& [tmp, base] : prefix) {
      auto it = users.find(tmp);
      if (it == users.end()) {
        changed = true;
        continue;
      }
      bool only_buffers = true;
      for (size_t i : it->second) {
        const ProcPtr& c = comps[i];
        if (!(c->kind == Process::Kind::Buffer && c->chan == tmp)) {
          only_buffers = false;
          break;
        }
      }
      if (only_buffers) {
        for (size_t i : it->second) drop_comps.insert(i);
        changed = true;
        continue;
      }
      keep.emplace_back(tmp, base);
    }
    if (!changed) break;
    prefix = std::move(keep);
    std::vector<ProcPtr> remaining;
    for (size_t i = 0; i < comps.size(); ++i)
      if (!drop_comps.count(i)) remaining.push_back(comps[i]);
    comps = std::move(remaining);
  }

  // final names: source base, suffixed on clashes, in creation order
  std::set<Name> taken;
  for (const auto& c : comps)
    for (const auto& n : free_names(c))
      if (n.rfind('\x01', 0) != 0) taken.insert(n);
  std::map<Name, Name> final_names;
  NormState out;
  for (const auto& [tmp, base] : prefix) {
    Name cand = base;
    for (int i = 1; taken.count(cand); ++i) cand = base + "#" + std::to_string(i);
    taken.insert(cand);
    final_names[tmp] = cand;
    out.prefix.push_back(cand);
  }
  for (auto& c : comps)
    if (!final_names.empty()) c = subst(c, {}, final_names);
  std::sort(comps.begin(), comps.end(),
            [](const ProcPtr& a, const ProcPtr& b) { return serial(a) < serial(b); });
  out.comps = std::move(comps);
  return out;
}

ProcPtr rebuild(const NormState& n) {
  ProcPtr body = nullptr;
  for (const auto& c : n.comps) body = body ? Process::par(body, c) : c;
  if (!body) body = Process::inact();
  for (auto it = n.prefix.rbegin(); it != n.prefix.rend(); ++it)
    body = Process::restrict(*it, body);
  return body;
}

// --- transparent call expansion -------------------------------------------

void expand_into(const Program& prog, const ProcPtr& p, int depth, std::vector<ProcPtr>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Par:
      expand_into(prog, p->left, depth, out);
      expand_into(prog, p->right, depth, out);
      break;
    case Process::Kind::Inact:
      break;
    case Process::Kind::Call: {
      auto it = prog.defs.find(p->callee);
      if (it == prog.defs.end() || depth > static_cast<int>(prog.defs.size()) + 1) {
        out.push_back(p); // inert: no rule can ground this call
        return;
      }
      const Definition& d = it->second;
      if (d.value_params.size() != p->val_args.size() ||
          d.chan_params.size() != p->chan_args.size()) {
        out.push_back(p);
        return;
      }
      std::map<Name, Value> vals;
      try {
        for (size_t i = 0; i < d.value_params.size(); ++i)
          vals[d.value_params[i].name] = eval_expr(p->val_args[i], {});
      } catch (const EvalError&) {
        out.push_back(p);
        return;
      }
      std::map<Name, Name> chans;
      for (size_t i = 0; i < d.chan_params.size(); ++i)
        chans[d.chan_params[i].name] = p->chan_args[i];
      expand_into(prog, subst(d.body, vals, chans), depth + 1, out);
      break;
    }
    default:
      out.push_back(p);
      break;
  }
}

std::vector<ProcPtr> expand(const Program& prog, const ProcPtr& comp) {
  std::vector<ProcPtr> out;
  expand_into(prog, comp, 0, out);
  return out;
}

// One communication capability of an agent.
struct Offer {
  enum class Kind { Send, Recv, Tau };
  Kind kind;
  Name chan;
  ExprPtr payload; // send
  Name bind;       // recv
  ProcPtr advance; // continuation if this offer fires
};

std::vector<Offer> offers_of(const ProcPtr& agent) {
  std::vector<Offer> out;
  auto from_prefix = [&](const Prefix& pi, const ProcPtr& cont) {
    switch (pi.kind) {
      case Prefix::Kind::Send: out.push_back({Offer::Kind::Send, pi.chan, pi.payload, {}, cont}); break;
      case Prefix::Kind::Recv: out.push_back({Offer::Kind::Recv, pi.chan, nullptr, pi.bind, cont}); break;
      case Prefix::Kind::Tau: out.push_back({Offer::Kind::Tau, {}, nullptr, {}, cont}); break;
    }
  };
  if (agent->kind == Process::Kind::Prefixed) {
    from_prefix(agent->prefix, agent->cont);
  } else if (agent->kind == Process::Kind::Select) {
    for (const auto& [pi, body] : agent->branches) from_prefix(pi, body);
  }
  return out;
}

} // namespace

ProcPtr normalize_state(const ProcPtr& p) { return rebuild(build_normal(p)); }

bool is_terminated(const ProcPtr& state) {
  NormState n = build_normal(state);
  return n.comps.empty();
}

std::vector<std::pair<ActionLabel, ProcPtr>> step(const Program& prog, const ProcPtr& state) {
  NormState ns = build_normal(state);
  size_t m = ns.comps.size();

  std::vector<std::vector<ProcPtr>> exp(m);
  for (size_t i = 0; i < m; ++i) exp[i] = expand(prog, ns.comps[i]);

  struct ARef {
    size_t comp, idx;
  };
  std::vector<ARef> agents;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < exp[i].size(); ++j) agents.push_back({i, j});

  auto agent_term = [&](const ARef& a) -> const ProcPtr& { return exp[a.comp][a.idx]; };

  // buffer lookup by channel
  std::map<Name, ARef> buffer_at;
  for (const auto& a : agents) {
    const ProcPtr& t = agent_term(a);
    if (t->kind == Process::Kind::Buffer) buffer_at[t->chan] = a;
  }

  std::vector<std::pair<ActionLabel, ProcPtr>> result;
  std::set<std::string> seen;

  auto make_succ = [&](const ActionLabel& label,
                       const std::vector<std::pair<ARef, ProcPtr>>& repl) {
    std::set<size_t> touched;
    for (const auto& [a, t] : repl) touched.insert(a.comp);
    std::vector<ProcPtr> comps;
    for (size_t i = 0; i < m; ++i) {
      if (!touched.count(i)) {
        comps.push_back(ns.comps[i]);
        continue;
      }
      for (size_t j = 0; j < exp[i].size(); ++j) {
        ProcPtr t = exp[i][j];
        for (const auto& [a, nt] : repl)
          if (a.comp == i && a.idx == j) t = nt;
        if (t) comps.push_back(t);
      }
    }
    ProcPtr body = nullptr;
    for (const auto& c : comps) body = body ? Process::par(body, c) : c;
    if (!body) body = Process::inact();
    for (auto it = ns.prefix.rbegin(); it != ns.prefix.rend(); ++it)
      body = Process::restrict(*it, body);
    ProcPtr succ = normalize_state(body);
    std::string key = show_label(label) + "\x01" + serial(succ);
    if (seen.insert(key).second) result.emplace_back(label, succ);
  };

  for (const auto& a : agents) {
    const ProcPtr& t = agent_term(a);
    switch (t->kind) {
      case Process::Kind::Cond: {
        if (!t->guard) {
          // star-conditional: both branches
          ActionLabel l = t->mark ? ActionLabel::if_left(*t->mark) : ActionLabel::eps();
          ActionLabel r = t->mark ? ActionLabel::if_right(*t->mark) : ActionLabel::eps();
          make_succ(l, {{a, t->then_branch}});
          make_succ(r, {{a, t->else_branch}});
          break;
        }
        try {
          Value v = eval_expr(*t->guard, {});
          if (v.sort != Sort::Bool) break;
          if (v.b)
            make_succ(t->mark ? ActionLabel::if_left(*t->mark) : ActionLabel::eps(),
                      {{a, t->then_branch}});
          else
            make_succ(t->mark ? ActionLabel::if_right(*t->mark) : ActionLabel::eps(),
                      {{a, t->else_branch}});
        } catch (const EvalError&) {
          // no rule applies to a stuck guard
        }
        break;
      }
      case Process::Kind::NewChan: {
        Name fresh = t->chan + "#\x01new";
        ProcPtr body = subst(t->cont, {}, {{t->chan, fresh}});
        ProcPtr spawned = Process::restrict(
            fresh, Process::par(body, Process::buffer(fresh, t->payload, t->capacity, {}, false)));
        make_succ(ActionLabel::eps(), {{a, spawned}});
        break;
      }
      case Process::Kind::Close: {
        auto it = buffer_at.find(t->chan);
        if (it == buffer_at.end()) break;
        const ProcPtr& buf = agent_term(it->second);
        if (buf->closed) break; // closing a closed channel has no rule
        ProcPtr closed =
            Process::buffer(buf->chan, buf->payload, buf->capacity, buf->queue, true);
        make_succ(ActionLabel::eps(), {{a, t->cont}, {it->second, closed}});
        break;
      }
      default:
        break;
    }
  }

  // communication offers
  struct OfferRef {
    ARef agent;
    Offer offer;
  };
  std::vector<OfferRef> sends, recvs;
  for (const auto& a : agents) {
    for (auto& o : offers_of(agent_term(a))) {
      if (o.kind == Offer::Kind::Tau) {
        make_succ(ActionLabel::eps(), {{a, o.advance}});
      } else if (o.kind == Offer::Kind::Send) {
        sends.push_back({a, o});
      } else {
        recvs.push_back({a, o});
      }
    }
  }

  auto same_agent = [](const ARef& x, const ARef& y) {
    return x.comp == y.comp && x.idx == y.idx;
  };

  for (const auto& s : sends) {
    auto bit = buffer_at.find(s.offer.chan);
    if (bit == buffer_at.end()) continue;
    const ProcPtr& buf = agent_term(bit->second);
    if (buf->closed) continue; // no rule sends on a closed channel
    Value v;
    try {
      v = eval_expr(s.offer.payload, {});
    } catch (const EvalError&) {
      continue;
    }
    if (v.sort != buf->payload) continue;
    if (buf->capacity == 0) {
      // synchronous rendezvous through the empty buffer
      for (const auto& r : recvs) {
        if (r.offer.chan != s.offer.chan) continue;
        if (same_agent(r.agent, s.agent)) continue;
        ProcPtr recv_cont = subst(r.offer.advance, {{r.offer.bind, v}}, {});
        make_succ(ActionLabel::eps(), {{s.agent, s.offer.advance}, {r.agent, recv_cont}});
      }
    } else if (static_cast<int>(buf->queue.size()) < buf->capacity) {
      auto q = buf->queue;
      q.push_back(v);
      ProcPtr nb = Process::buffer(buf->chan, buf->payload, buf->capacity, q, false);
      make_succ(ActionLabel::eps(), {{s.agent, s.offer.advance}, {bit->second, nb}});
    }
  }

  for (const auto& r : recvs) {
    auto bit = buffer_at.find(r.offer.chan);
    if (bit == buffer_at.end()) continue;
    const ProcPtr& buf = agent_term(bit->second);
    if (!buf->closed) {
      if (!buf->queue.empty()) {
        Value v = buf->queue.front();
        auto q = buf->queue;
        q.pop_front();
        ProcPtr nb = Process::buffer(buf->chan, buf->payload, buf->capacity, q, false);
        ProcPtr cont = subst(r.offer.advance, {{r.offer.bind, v}}, {});
        make_succ(ActionLabel::eps(), {{r.agent, cont}, {bit->second, nb}});
      }
    } else {
      // receive on a closed channel is always enabled: queued value if any,
      // otherwise the payload sort's bottom element
      Value v = buf->queue.empty() ? Value::bottom(buf->payload) : buf->queue.front();
      ProcPtr nb = buf->queue.empty()
                       ? agent_term(bit->second)
                       : [&] {
                           auto q = buf->queue;
                           q.pop_front();
                           return Process::buffer(buf->chan, buf->payload, buf->capacity, q, true);
                         }();
      ProcPtr cont = subst(r.offer.advance, {{r.offer.bind, v}}, {});
      make_succ(ActionLabel::eps(), {{r.agent, cont}, {bit->second, nb}});
    }
  }

  return result;
}

BarbSet barbs(const Program& prog, const ProcPtr& state) {
  NormState ns = build_normal(state);
  BarbSet out;

  struct AgentOffers {
    std::set<Barb> offers; // atomic capabilities for sync pairing
  };
  std::vector<AgentOffers> all;

  for (const auto& comp : ns.comps) {
    for (const auto& agent : expand(prog, comp)) {
      AgentOffers ao;
      switch (agent->kind) {
        case Process::Kind::Prefixed: {
          const Prefix& pi = agent->prefix;
          if (pi.kind == Prefix::Kind::Send) {
            out.singles.insert({Barb::Kind::Output, pi.chan});
            ao.offers.insert({Barb::Kind::Output, pi.chan});
          } else if (pi.kind == Prefix::Kind::Recv) {
            out.singles.insert({Barb::Kind::Input, pi.chan});
            ao.offers.insert({Barb::Kind::Input, pi.chan});
          }
          break;
        }
        case Process::Kind::Select: {
          bool all_barbed = true;
          std::vector<Barb> multi;
          for (const auto& [pi, body] : agent->branches) {
            if (pi.kind == Prefix::Kind::Send) {
              multi.push_back({Barb::Kind::Output, pi.chan});
              ao.offers.insert({Barb::Kind::Output, pi.chan});
            } else if (pi.kind == Prefix::Kind::Recv) {
              multi.push_back({Barb::Kind::Input, pi.chan});
              ao.offers.insert({Barb::Kind::Input, pi.chan});
            } else {
              all_barbed = false; // tau guard has no barb
            }
          }
          if (all_barbed && !multi.empty()) out.multis.insert(multi);
          break;
        }
        case Process::Kind::Close:
          out.singles.insert({Barb::Kind::CloseReq, agent->chan});
          break;
        case Process::Kind::Buffer:
          if (agent->closed) {
            out.singles.insert({Barb::Kind::ClosedChan, agent->chan});
            ao.offers.insert({Barb::Kind::ClosedChan, agent->chan});
          } else {
            if (static_cast<int>(agent->queue.size()) < agent->capacity) {
              out.singles.insert({Barb::Kind::BufSend, agent->chan});
              ao.offers.insert({Barb::Kind::BufSend, agent->chan});
            }
            if (!agent->queue.empty()) {
              out.singles.insert({Barb::Kind::BufRecv, agent->chan});
              ao.offers.insert({Barb::Kind::BufRecv, agent->chan});
            }
          }
          break;
        default:
          break;
      }
      all.push_back(std::move(ao));
    }
  }

  // sync barbs across distinct agents
  for (size_t i = 0; i < all.size(); ++i) {
    for (const Barb& b : all[i].offers) {
      if (b.kind != Barb::Kind::Input) continue;
      for (size_t j = 0; j < all.size(); ++j) {
        if (i == j) continue;
        if (all[j].offers.count({Barb::Kind::Output, b.chan}) ||
            all[j].offers.count({Barb::Kind::ClosedChan, b.chan}) ||
            all[j].offers.count({Barb::Kind::BufRecv, b.chan}))
          out.singles.insert({Barb::Kind::Sync, b.chan});
      }
    }
    for (const Barb& b : all[i].offers) {
      if (b.kind != Barb::Kind::Output) continue;
      for (size_t j = 0; j < all.size(); ++j) {
        if (i == j) continue;
        if (all[j].offers.count({Barb::Kind::BufSend, b.chan}))
          out.singles.insert({Barb::Kind::Sync, b.chan});
      }
    }
  }

  return out;
}

// --- full structural canonical form ---------------------------------------

namespace {

std::string keyed_serial(const ProcPtr& comp, const std::map<Name, int>& colors,
                         const Name& self) {
  std::map<Name, Name> ren;
  for (const auto& [n, c] : colors)
    ren[n] = (n == self) ? "\x03self" : "\x02c" + std::to_string(c);
  return serial(ren.empty() ? comp : subst(comp, {}, ren));
}

} // namespace

ProcPtr canon_process(const ProcPtr& p) {
  NormState ns = build_normal(p);
  std::vector<Name> names = ns.prefix;
  std::map<Name, int> colors;
  for (const auto& n : names) colors[n] = 0;

  for (size_t round = 0; round < names.size() + 2; ++round) {
    // signature of each bound name: sorted multiset of component serials in
    // which the name itself is distinguished
    std::map<Name, std::string> sig;
    for (const auto& n : names) {
      std::vector<std::string> pieces;
      for (const auto& c : ns.comps) {
        if (free_names(c).count(n)) pieces.push_back(keyed_serial(c, colors, n));
      }
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

  // order components by colored serial, then assign indices by first use
  std::vector<std::pair<std::string, ProcPtr>> keyed;
  for (const auto& c : ns.comps) keyed.emplace_back(keyed_serial(c, colors, "\x05"), c);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<Name, Name> final_ren;
  std::vector<Name> final_prefix;
  int next_idx = 0;
  std::set<Name> restricted(names.begin(), names.end());
  // walk components in sorted order collecting first free occurrences
  for (const auto& [key, c] : keyed) {
    std::function<void(const ProcPtr&, std::set<Name>&)> walk = [&](const ProcPtr& t,
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
        case Process::Kind::Prefixed:
          if (t->prefix.kind != Prefix::Kind::Tau) touch(t->prefix.chan);
          walk(t->cont, shadow);
          break;
        case Process::Kind::Close:
          touch(t->chan);
          walk(t->cont, shadow);
          break;
        case Process::Kind::Select:
          for (const auto& [pi, body] : t->branches) {
            if (pi.kind != Prefix::Kind::Tau) touch(pi.chan);
            walk(body, shadow);
          }
          break;
        case Process::Kind::Cond:
          walk(t->then_branch, shadow);
          walk(t->else_branch, shadow);
          break;
        case Process::Kind::NewChan:
        case Process::Kind::Restrict: {
          bool added = shadow.insert(t->chan).second;
          walk(t->cont, shadow);
          if (added) shadow.erase(t->chan);
          break;
        }
        case Process::Kind::Par:
          walk(t->left, shadow);
          walk(t->right, shadow);
          break;
        case Process::Kind::Call:
          for (const auto& u : t->chan_args) touch(u);
          break;
        case Process::Kind::Buffer:
          touch(t->chan);
          break;
        default:
          break;
      }
    };
    std::set<Name> shadow;
    walk(c, shadow);
  }

  std::vector<ProcPtr> comps;
  for (const auto& [key, c] : keyed)
    comps.push_back(final_ren.empty() ? c : subst(c, {}, final_ren));
  std::sort(comps.begin(), comps.end(),
            [](const ProcPtr& a, const ProcPtr& b) { return serial(a) < serial(b); });

  ProcPtr body = nullptr;
  for (const auto& c : comps) body = body ? Process::par(body, c) : c;
  if (!body) body = Process::inact();
  for (auto it = final_prefix.rbegin(); it != final_prefix.rend(); ++it)
    body = Process::restrict(*it, body);
  return body;
}

} // namespace migo

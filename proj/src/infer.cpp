#include "migo/infer.hpp"

#include <functional>
#include <map>

namespace migo {

namespace {

struct ChanInfo {
  Sort payload = Sort::Int;
  int capacity = 0;
};

struct Env {
  std::map<Name, Sort> vals;
  std::map<Name, ChanInfo> chans;
};

Sort sort_of_expr(const ExprPtr& e, const Env& env) {
  switch (e->kind) {
    case Expr::Kind::IntLit: return Sort::Int;
    case Expr::Kind::BoolLit: return Sort::Bool;
    case Expr::Kind::Var: {
      auto it = env.vals.find(e->var);
      if (it == env.vals.end()) throw TypeError("unbound variable '" + e->var + "'");
      return it->second;
    }
    case Expr::Kind::Not:
      if (sort_of_expr(e->lhs, env) != Sort::Bool)
        throw TypeError("not() applied to non-boolean");
      return Sort::Bool;
    case Expr::Kind::Succ:
      if (sort_of_expr(e->lhs, env) != Sort::Int)
        throw TypeError("succ() applied to non-integer");
      return Sort::Int;
    case Expr::Kind::Bin: {
      Sort l = sort_of_expr(e->lhs, env);
      Sort r = sort_of_expr(e->rhs, env);
      switch (e->op) {
        case BinOp::And:
        case BinOp::Or:
          if (l != Sort::Bool || r != Sort::Bool)
            throw TypeError("boolean operator on non-booleans");
          return Sort::Bool;
        case BinOp::Eq:
        case BinOp::Ne:
          if (l != r) throw TypeError("comparison across sorts");
          return Sort::Bool;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
          if (l != Sort::Int || r != Sort::Int) throw TypeError("comparison on non-integers");
          return Sort::Bool;
        default:
          if (l != Sort::Int || r != Sort::Int) throw TypeError("arithmetic on non-integers");
          return Sort::Int;
      }
    }
  }
  throw TypeError("bad expression");
}

const ChanInfo& chan_of(const Name& u, const Env& env) {
  auto it = env.chans.find(u);
  if (it == env.chans.end()) throw TypeError("unknown channel '" + u + "'");
  return it->second;
}

struct Inferencer {
  const Program& prog;

  TAction action_of(const Prefix& pi, Env& env) {
    switch (pi.kind) {
      case Prefix::Kind::Send: {
        const ChanInfo& ci = chan_of(pi.chan, env);
        if (sort_of_expr(pi.payload, env) != ci.payload)
          throw TypeError("payload sort mismatch on send over '" + pi.chan + "'");
        return TAction::send(pi.chan);
      }
      case Prefix::Kind::Recv:
        return TAction::recv(pi.chan);
      case Prefix::Kind::Tau:
        return TAction::tau();
    }
    throw TypeError("bad prefix");
  }

  TypePtr type_of(const ProcPtr& p, Env env) {
    switch (p->kind) {
      case Process::Kind::Prefixed: {
        const Prefix& pi = p->prefix;
        TAction k = action_of(pi, env);
        Env env2 = env;
        if (pi.kind == Prefix::Kind::Recv)
          env2.vals[pi.bind] = chan_of(pi.chan, env).payload;
        return TypeTerm::prefix(k, type_of(p->cont, env2));
      }
      case Process::Kind::Close:
        chan_of(p->chan, env);
        return TypeTerm::close_req(p->chan, type_of(p->cont, env));
      case Process::Kind::Select: {
        std::vector<std::pair<TAction, TypePtr>> bs;
        for (const auto& [pi, body] : p->branches) {
          TAction k = action_of(pi, env);
          Env env2 = env;
          if (pi.kind == Prefix::Kind::Recv)
            env2.vals[pi.bind] = chan_of(pi.chan, env).payload;
          bs.emplace_back(k, type_of(body, env2));
        }
        return TypeTerm::branch(std::move(bs));
      }
      case Process::Kind::Cond: {
        if (p->guard && sort_of_expr(*p->guard, env) != Sort::Bool)
          throw TypeError("conditional guard is not boolean");
        return TypeTerm::choice({type_of(p->then_branch, env), type_of(p->else_branch, env)});
      }
      case Process::Kind::NewChan: {
        Env env2 = env;
        env2.chans[p->chan] = {p->payload, p->capacity};
        TypePtr body = type_of(p->cont, env2);
        // pick the type-level name away from the context and fn(body)
        Name c = p->chan;
        std::set<Name> avoid = free_names(body);
        avoid.erase(p->chan);
        for (const auto& [n, ci] : env.chans) avoid.insert(n);
        for (int i = 1; avoid.count(c); ++i) c = p->chan + "#" + std::to_string(i);
        if (c != p->chan) body = subst_type(body, {{p->chan, c}});
        return TypeTerm::newchan(c, p->capacity, body);
      }
      case Process::Kind::Par:
        return TypeTerm::par(type_of(p->left, env), type_of(p->right, env));
      case Process::Kind::Inact:
        return TypeTerm::inact();
      case Process::Kind::Call: {
        auto it = prog.defs.find(p->callee);
        if (it == prog.defs.end()) throw TypeError("unknown definition '" + p->callee + "'");
        const Definition& d = it->second;
        if (p->val_args.size() != d.value_params.size() ||
            p->chan_args.size() != d.chan_params.size())
          throw TypeError("arity mismatch in call to '" + p->callee + "'");
        for (size_t i = 0; i < p->val_args.size(); ++i)
          if (sort_of_expr(p->val_args[i], env) != d.value_params[i].sort)
            throw TypeError("value argument sort mismatch in call to '" + p->callee + "'");
        for (size_t i = 0; i < p->chan_args.size(); ++i)
          if (chan_of(p->chan_args[i], env).payload != d.chan_params[i].sort)
            throw TypeError("channel argument sort mismatch in call to '" + p->callee + "'");
        return TypeTerm::call("t_" + p->callee, p->chan_args);
      }
      default:
        throw TypeError("runtime construct in source program");
    }
  }
};

} // namespace

TypeSystem infer(const Program& prog) {
  Inferencer inf{prog};
  TypeSystem sys;
  for (const auto& [name, def] : prog.defs) {
    Env env;
    for (const auto& prm : def.value_params) env.vals[prm.name] = prm.sort;
    for (const auto& prm : def.chan_params) env.chans[prm.name] = {prm.sort, 0};
    TypeEquation eq;
    eq.name = "t_" + name;
    for (const auto& prm : def.chan_params) eq.params.push_back(prm.name);
    eq.body = inf.type_of(def.body, env);
    sys.equations.emplace(eq.name, std::move(eq));
  }
  TypeEquation entry;
  entry.name = sys.entry;
  entry.body = inf.type_of(prog.main, Env{});
  sys.equations.emplace(entry.name, std::move(entry));
  return sys;
}

namespace {

// collects payload sorts for free/restricted channels from buffers and
// channel parameters of surrounding binders
void collect_chans(const ProcPtr& p, std::map<Name, ChanInfo>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Buffer:
      out[p->chan] = {p->payload, p->capacity};
      break;
    case Process::Kind::Par:
      collect_chans(p->left, out);
      collect_chans(p->right, out);
      break;
    case Process::Kind::Restrict:
      collect_chans(p->cont, out);
      break;
    default:
      break;
  }
}

struct RuntimeInferencer {
  const Program& prog;
  Inferencer inner{prog};

  RuntimeTyping type_of(const ProcPtr& p, Env env) {
    switch (p->kind) {
      case Process::Kind::Restrict: {
        Env env2 = env;
        std::map<Name, ChanInfo> inside;
        collect_chans(p->cont, inside);
        if (inside.count(p->chan)) env2.chans[p->chan] = inside[p->chan];
        else env2.chans[p->chan] = {Sort::Int, 0};
        RuntimeTyping rt = type_of(p->cont, env2);
        rt.buffers.erase(p->chan);
        rt.type = TypeTerm::restrict(p->chan, rt.type);
        return rt;
      }
      case Process::Kind::Par: {
        RuntimeTyping l = type_of(p->left, env);
        RuntimeTyping r = type_of(p->right, env);
        for (const auto& b : r.buffers)
          if (l.buffers.count(b))
            throw TypeError("duplicate buffer for channel '" + b + "'");
        RuntimeTyping out;
        out.type = TypeTerm::par(l.type, r.type);
        out.buffers = l.buffers;
        out.buffers.insert(r.buffers.begin(), r.buffers.end());
        return out;
      }
      case Process::Kind::Buffer: {
        RuntimeTyping out;
        if (p->closed)
          out.type = TypeTerm::buffer(p->chan, 0, 0, true);
        else
          out.type =
              TypeTerm::buffer(p->chan, static_cast<int>(p->queue.size()), p->capacity, false);
        out.buffers = {p->chan};
        return out;
      }
      default: {
        RuntimeTyping out;
        out.type = inner.type_of(p, env);
        return out;
      }
    }
  }
};

} // namespace

RuntimeTyping infer_runtime(const Program& prog, const ProcPtr& state) {
  Env env;
  std::map<Name, ChanInfo> chans;
  collect_chans(state, chans);
  for (const auto& [n, ci] : chans) env.chans[n] = ci;
  RuntimeInferencer ri{prog};
  return ri.type_of(state, env);
}

} // namespace migo

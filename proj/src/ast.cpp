#include "migo/ast.hpp"

#include <sstream>
#include <stdexcept>

namespace migo {

const char* sort_name(Sort s) { return s == Sort::Int ? "int" : "bool"; }

std::string show_value(const Value& v) {
  if (v.sort == Sort::Int) return std::to_string(v.i);
  return v.b ? "true" : "false";
}

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

ExprPtr Expr::lit_int(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::IntLit;
  e->int_val = v;
  return e;
}

ExprPtr Expr::lit_bool(bool v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::BoolLit;
  e->bool_val = v;
  return e;
}

ExprPtr Expr::mk_var(Name x) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = std::move(x);
  return e;
}

ExprPtr Expr::mk_not(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Not;
  e->lhs = std::move(inner);
  return e;
}

ExprPtr Expr::mk_succ(ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Succ;
  e->lhs = std::move(inner);
  return e;
}

ExprPtr Expr::bin(BinOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

void expr_vars(const ExprPtr& e, std::set<Name>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Var: out.insert(e->var); break;
    case Expr::Kind::Not:
    case Expr::Kind::Succ: expr_vars(e->lhs, out); break;
    case Expr::Kind::Bin:
      expr_vars(e->lhs, out);
      expr_vars(e->rhs, out);
      break;
    default: break;
  }
}

static std::shared_ptr<Process> node(Process::Kind k) {
  auto p = std::make_shared<Process>();
  p->kind = k;
  return p;
}

ProcPtr Process::prefixed(Prefix pi, ProcPtr p) {
  auto n = node(Kind::Prefixed);
  n->prefix = std::move(pi);
  n->cont = std::move(p);
  return n;
}

ProcPtr Process::close(Name u, ProcPtr p) {
  auto n = node(Kind::Close);
  n->chan = std::move(u);
  n->cont = std::move(p);
  return n;
}

ProcPtr Process::select(std::vector<std::pair<Prefix, ProcPtr>> bs) {
  auto n = node(Kind::Select);
  n->branches = std::move(bs);
  return n;
}

ProcPtr Process::cond(std::optional<ExprPtr> e, ProcPtr t, ProcPtr f, std::optional<int> mark) {
  auto n = node(Kind::Cond);
  n->guard = std::move(e);
  n->then_branch = std::move(t);
  n->else_branch = std::move(f);
  n->mark = mark;
  return n;
}

ProcPtr Process::newchan(Name y, Sort s, int capacity, ProcPtr p) {
  auto n = node(Kind::NewChan);
  n->chan = std::move(y);
  n->payload = s;
  n->capacity = capacity;
  n->cont = std::move(p);
  return n;
}

ProcPtr Process::par(ProcPtr l, ProcPtr r) {
  auto n = node(Kind::Par);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

ProcPtr Process::inact() {
  static const ProcPtr zero = node(Kind::Inact);
  return zero;
}

ProcPtr Process::call(Name x, std::vector<ExprPtr> es, std::vector<Name> us) {
  auto n = node(Kind::Call);
  n->callee = std::move(x);
  n->val_args = std::move(es);
  n->chan_args = std::move(us);
  return n;
}

ProcPtr Process::restrict(Name c, ProcPtr p) {
  auto n = node(Kind::Restrict);
  n->chan = std::move(c);
  n->cont = std::move(p);
  return n;
}

ProcPtr Process::buffer(Name c, Sort s, int capacity, std::deque<Value> q, bool closed) {
  auto n = node(Kind::Buffer);
  n->chan = std::move(c);
  n->payload = s;
  n->capacity = capacity;
  n->queue = std::move(q);
  n->closed = closed;
  return n;
}

std::string serial(const ExprPtr& e) {
  if (!e) return "_";
  std::ostringstream os;
  switch (e->kind) {
    case Expr::Kind::IntLit: os << "i" << e->int_val; break;
    case Expr::Kind::BoolLit: os << (e->bool_val ? "bt" : "bf"); break;
    case Expr::Kind::Var: os << "v(" << e->var << ")"; break;
    case Expr::Kind::Not: os << "not(" << serial(e->lhs) << ")"; break;
    case Expr::Kind::Succ: os << "succ(" << serial(e->lhs) << ")"; break;
    case Expr::Kind::Bin:
      os << "op" << static_cast<int>(e->op) << "(" << serial(e->lhs) << "," << serial(e->rhs)
         << ")";
      break;
  }
  return os.str();
}

static void serial_prefix(const Prefix& pi, std::ostringstream& os) {
  switch (pi.kind) {
    case Prefix::Kind::Send: os << "!" << pi.chan << "<" << serial(pi.payload) << ">"; break;
    case Prefix::Kind::Recv: os << "?" << pi.chan << "(" << pi.bind << ")"; break;
    case Prefix::Kind::Tau: os << "tau"; break;
  }
}

std::string serial(const ProcPtr& p) {
  if (!p) return "_";
  std::ostringstream os;
  switch (p->kind) {
    case Process::Kind::Prefixed:
      serial_prefix(p->prefix, os);
      os << ";" << serial(p->cont);
      break;
    case Process::Kind::Close:
      os << "close(" << p->chan << ");" << serial(p->cont);
      break;
    case Process::Kind::Select: {
      os << "sel{";
      for (const auto& [pi, body] : p->branches) {
        serial_prefix(pi, os);
        os << ";" << serial(body) << "#";
      }
      os << "}";
      break;
    }
    case Process::Kind::Cond:
      os << "if";
      if (p->mark) os << "@" << *p->mark;
      os << "(" << (p->guard ? serial(*p->guard) : std::string("*")) << ","
         << serial(p->then_branch) << "," << serial(p->else_branch) << ")";
      break;
    case Process::Kind::NewChan:
      os << "new(" << p->chan << ":" << sort_name(p->payload) << "," << p->capacity << ");"
         << serial(p->cont);
      break;
    case Process::Kind::Par:
      os << "(" << serial(p->left) << "|" << serial(p->right) << ")";
      break;
    case Process::Kind::Inact:
      os << "0";
      break;
    case Process::Kind::Call: {
      os << "call:" << p->callee << "<";
      for (const auto& e : p->val_args) os << serial(e) << ",";
      os << ";";
      for (const auto& u : p->chan_args) os << u << ",";
      os << ">";
      break;
    }
    case Process::Kind::Restrict:
      os << "nu(" << p->chan << ")" << serial(p->cont);
      break;
    case Process::Kind::Buffer: {
      os << "buf(" << p->chan << ":" << sort_name(p->payload) << "," << p->capacity << ","
         << (p->closed ? "closed" : "open") << ",[";
      for (const auto& v : p->queue) os << show_value(v) << ",";
      os << "])";
      break;
    }
  }
  return os.str();
}

bool proc_equal(const ProcPtr& a, const ProcPtr& b) { return serial(a) == serial(b); }

static void fn_rec(const ProcPtr& p, std::set<Name>& bound, std::set<Name>& out) {
  if (!p) return;
  auto see = [&](const Name& u) {
    if (!bound.count(u)) out.insert(u);
  };
  switch (p->kind) {
    case Process::Kind::Prefixed:
      if (p->prefix.kind != Prefix::Kind::Tau) see(p->prefix.chan);
      fn_rec(p->cont, bound, out);
      break;
    case Process::Kind::Close:
      see(p->chan);
      fn_rec(p->cont, bound, out);
      break;
    case Process::Kind::Select:
      for (const auto& [pi, body] : p->branches) {
        if (pi.kind != Prefix::Kind::Tau) see(pi.chan);
        fn_rec(body, bound, out);
      }
      break;
    case Process::Kind::Cond:
      fn_rec(p->then_branch, bound, out);
      fn_rec(p->else_branch, bound, out);
      break;
    case Process::Kind::NewChan:
    case Process::Kind::Restrict: {
      bool fresh = bound.insert(p->chan).second;
      fn_rec(p->cont, bound, out);
      if (fresh) bound.erase(p->chan);
      break;
    }
    case Process::Kind::Par:
      fn_rec(p->left, bound, out);
      fn_rec(p->right, bound, out);
      break;
    case Process::Kind::Inact:
      break;
    case Process::Kind::Call:
      for (const auto& u : p->chan_args) see(u);
      break;
    case Process::Kind::Buffer:
      see(p->chan);
      break;
  }
}

std::set<Name> free_names(const ProcPtr& p) {
  std::set<Name> bound, out;
  fn_rec(p, bound, out);
  return out;
}

static void fv_rec(const ProcPtr& p, std::set<Name>& bound, std::set<Name>& out) {
  if (!p) return;
  auto see_expr = [&](const ExprPtr& e) {
    std::set<Name> vs;
    expr_vars(e, vs);
    for (const auto& v : vs)
      if (!bound.count(v)) out.insert(v);
  };
  switch (p->kind) {
    case Process::Kind::Prefixed: {
      if (p->prefix.kind == Prefix::Kind::Send) see_expr(p->prefix.payload);
      if (p->prefix.kind == Prefix::Kind::Recv) {
        bool fresh = bound.insert(p->prefix.bind).second;
        fv_rec(p->cont, bound, out);
        if (fresh) bound.erase(p->prefix.bind);
      } else {
        fv_rec(p->cont, bound, out);
      }
      break;
    }
    case Process::Kind::Close:
      fv_rec(p->cont, bound, out);
      break;
    case Process::Kind::Select:
      for (const auto& [pi, body] : p->branches) {
        if (pi.kind == Prefix::Kind::Send) see_expr(pi.payload);
        if (pi.kind == Prefix::Kind::Recv) {
          bool fresh = bound.insert(pi.bind).second;
          fv_rec(body, bound, out);
          if (fresh) bound.erase(pi.bind);
        } else {
          fv_rec(body, bound, out);
        }
      }
      break;
    case Process::Kind::Cond:
      if (p->guard) see_expr(*p->guard);
      fv_rec(p->then_branch, bound, out);
      fv_rec(p->else_branch, bound, out);
      break;
    case Process::Kind::NewChan:
    case Process::Kind::Restrict:
      fv_rec(p->cont, bound, out);
      break;
    case Process::Kind::Par:
      fv_rec(p->left, bound, out);
      fv_rec(p->right, bound, out);
      break;
    case Process::Kind::Inact:
      break;
    case Process::Kind::Call:
      for (const auto& e : p->val_args) see_expr(e);
      break;
    case Process::Kind::Buffer:
      break;
  }
}

std::set<Name> free_vars(const ProcPtr& p) {
  std::set<Name> bound, out;
  fv_rec(p, bound, out);
  return out;
}

static ExprPtr subst_expr(const ExprPtr& e, const std::map<Name, Value>& vals) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Var: {
      auto it = vals.find(e->var);
      if (it == vals.end()) return e;
      const Value& v = it->second;
      return v.sort == Sort::Int ? Expr::lit_int(v.i) : Expr::lit_bool(v.b);
    }
    case Expr::Kind::Not: return Expr::mk_not(subst_expr(e->lhs, vals));
    case Expr::Kind::Succ: return Expr::mk_succ(subst_expr(e->lhs, vals));
    case Expr::Kind::Bin:
      return Expr::bin(e->op, subst_expr(e->lhs, vals), subst_expr(e->rhs, vals));
    default: return e;
  }
}

// Picks a binder replacement avoiding the given names.
Name fresh_against(const Name& base, const std::set<Name>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    Name cand = base + "#" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

ProcPtr subst(const ProcPtr& p, const std::map<Name, Value>& vals,
              const std::map<Name, Name>& chans) {
  if (!p) return p;
  if (vals.empty() && chans.empty()) return p;
  auto ch = [&](const Name& u) {
    auto it = chans.find(u);
    return it == chans.end() ? u : it->second;
  };
  // Renames a channel binder that would capture a name in the range.
  auto binder_clash = [&](const Name& b) {
    for (const auto& [k, v] : chans)
      if (v == b) return true;
    return false;
  };
  switch (p->kind) {
    case Process::Kind::Prefixed: {
      Prefix pi = p->prefix;
      if (pi.kind == Prefix::Kind::Send) {
        pi.chan = ch(pi.chan);
        pi.payload = subst_expr(pi.payload, vals);
        return Process::prefixed(pi, subst(p->cont, vals, chans));
      }
      if (pi.kind == Prefix::Kind::Recv) {
        pi.chan = ch(pi.chan);
        // the bound variable shadows any substitution for it
        auto vals2 = vals;
        vals2.erase(pi.bind);
        return Process::prefixed(pi, subst(p->cont, vals2, chans));
      }
      return Process::prefixed(pi, subst(p->cont, vals, chans));
    }
    case Process::Kind::Close:
      return Process::close(ch(p->chan), subst(p->cont, vals, chans));
    case Process::Kind::Select: {
      std::vector<std::pair<Prefix, ProcPtr>> bs;
      for (const auto& [pi0, body] : p->branches) {
        Prefix pi = pi0;
        if (pi.kind == Prefix::Kind::Send) {
          pi.chan = ch(pi.chan);
          pi.payload = subst_expr(pi.payload, vals);
          bs.emplace_back(pi, subst(body, vals, chans));
        } else if (pi.kind == Prefix::Kind::Recv) {
          pi.chan = ch(pi.chan);
          auto vals2 = vals;
          vals2.erase(pi.bind);
          bs.emplace_back(pi, subst(body, vals2, chans));
        } else {
          bs.emplace_back(pi, subst(body, vals, chans));
        }
      }
      return Process::select(std::move(bs));
    }
    case Process::Kind::Cond: {
      std::optional<ExprPtr> g;
      if (p->guard) g = subst_expr(*p->guard, vals);
      return Process::cond(g, subst(p->then_branch, vals, chans),
                           subst(p->else_branch, vals, chans), p->mark);
    }
    case Process::Kind::NewChan:
    case Process::Kind::Restrict: {
      auto chans2 = chans;
      chans2.erase(p->chan);
      Name binder = p->chan;
      ProcPtr body = p->cont;
      if (binder_clash(binder)) {
        std::set<Name> avoid = free_names(body);
        for (const auto& [k, v] : chans2) {
          avoid.insert(k);
          avoid.insert(v);
        }
        Name nb = fresh_against(binder, avoid);
        body = subst(body, {}, {{binder, nb}});
        binder = nb;
      }
      if (p->kind == Process::Kind::NewChan)
        return Process::newchan(binder, p->payload, p->capacity, subst(body, vals, chans2));
      return Process::restrict(binder, subst(body, vals, chans2));
    }
    case Process::Kind::Par:
      return Process::par(subst(p->left, vals, chans), subst(p->right, vals, chans));
    case Process::Kind::Inact:
      return p;
    case Process::Kind::Call: {
      std::vector<ExprPtr> es;
      for (const auto& e : p->val_args) es.push_back(subst_expr(e, vals));
      std::vector<Name> us;
      for (const auto& u : p->chan_args) us.push_back(ch(u));
      return Process::call(p->callee, std::move(es), std::move(us));
    }
    case Process::Kind::Buffer:
      return Process::buffer(ch(p->chan), p->payload, p->capacity, p->queue, p->closed);
  }
  return p;
}

static void marks_rec(const ProcPtr& p, std::vector<int>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Prefixed:
    case Process::Kind::Close:
    case Process::Kind::NewChan:
    case Process::Kind::Restrict:
      marks_rec(p->cont, out);
      break;
    case Process::Kind::Select:
      for (const auto& [pi, body] : p->branches) marks_rec(body, out);
      break;
    case Process::Kind::Cond:
      if (p->mark) out.push_back(*p->mark);
      marks_rec(p->then_branch, out);
      marks_rec(p->else_branch, out);
      break;
    case Process::Kind::Par:
      marks_rec(p->left, out);
      marks_rec(p->right, out);
      break;
    default:
      break;
  }
}

std::vector<int> collect_marks(const ProcPtr& p) {
  std::vector<int> out;
  marks_rec(p, out);
  return out;
}

std::vector<int> collect_marks(const Program& p) {
  std::vector<int> out;
  for (const auto& [name, def] : p.defs) marks_rec(def.body, out);
  marks_rec(p.main, out);
  return out;
}

} // namespace migo

#include "migo/types.hpp"

#include <sstream>

namespace migo {

static std::shared_ptr<TypeTerm> node(TypeTerm::Kind k) {
  auto t = std::make_shared<TypeTerm>();
  t->kind = k;
  return t;
}

TypePtr TypeTerm::prefix(TAction k, TypePtr t) {
  auto n = node(Kind::Prefix);
  n->action = std::move(k);
  n->cont = std::move(t);
  return n;
}

TypePtr TypeTerm::choice(std::vector<TypePtr> ts) {
  auto n = node(Kind::Choice);
  n->choices = std::move(ts);
  return n;
}

TypePtr TypeTerm::branch(std::vector<std::pair<TAction, TypePtr>> bs) {
  auto n = node(Kind::Branch);
  n->branches = std::move(bs);
  return n;
}

TypePtr TypeTerm::par(TypePtr l, TypePtr r) {
  auto n = node(Kind::Par);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

TypePtr TypeTerm::inact() {
  static const TypePtr zero = node(Kind::Inact);
  return zero;
}

TypePtr TypeTerm::newchan(Name a, int capacity, TypePtr t) {
  auto n = node(Kind::NewChan);
  n->chan = std::move(a);
  n->capacity = capacity;
  n->cont = std::move(t);
  return n;
}

TypePtr TypeTerm::close_req(Name u, TypePtr t) {
  auto n = node(Kind::CloseReq);
  n->chan = std::move(u);
  n->cont = std::move(t);
  return n;
}

TypePtr TypeTerm::call(Name t, std::vector<Name> args) {
  auto n = node(Kind::Call);
  n->callee = std::move(t);
  n->args = std::move(args);
  return n;
}

TypePtr TypeTerm::restrict(Name a, TypePtr t) {
  auto n = node(Kind::Restrict);
  n->chan = std::move(a);
  n->cont = std::move(t);
  return n;
}

TypePtr TypeTerm::buffer(Name a, int count, int capacity, bool closed) {
  auto n = node(Kind::Buffer);
  n->chan = std::move(a);
  n->count = count;
  n->capacity = capacity;
  n->closed = closed;
  return n;
}

static void serial_action(const TAction& k, std::ostringstream& os) {
  switch (k.kind) {
    case TAction::Kind::Send: os << "!" << k.chan; break;
    case TAction::Kind::Recv: os << "?" << k.chan; break;
    case TAction::Kind::Tau: os << "tau"; break;
  }
}

std::string serial(const TypePtr& t) {
  if (!t) return "_";
  std::ostringstream os;
  switch (t->kind) {
    case TypeTerm::Kind::Prefix:
      serial_action(t->action, os);
      os << ";" << serial(t->cont);
      break;
    case TypeTerm::Kind::Choice: {
      os << "plus{";
      for (const auto& c : t->choices) os << serial(c) << "#";
      os << "}";
      break;
    }
    case TypeTerm::Kind::Branch: {
      os << "bra{";
      for (const auto& [k, body] : t->branches) {
        serial_action(k, os);
        os << ";" << serial(body) << "#";
      }
      os << "}";
      break;
    }
    case TypeTerm::Kind::Par:
      os << "(" << serial(t->left) << "|" << serial(t->right) << ")";
      break;
    case TypeTerm::Kind::Inact:
      os << "0";
      break;
    case TypeTerm::Kind::NewChan:
      os << "new(" << t->chan << "," << t->capacity << ");" << serial(t->cont);
      break;
    case TypeTerm::Kind::CloseReq:
      os << "end[" << t->chan << "];" << serial(t->cont);
      break;
    case TypeTerm::Kind::Call: {
      os << "call:" << t->callee << "<";
      for (const auto& a : t->args) os << a << ",";
      os << ">";
      break;
    }
    case TypeTerm::Kind::Restrict:
      os << "nu(" << t->chan << ")" << serial(t->cont);
      break;
    case TypeTerm::Kind::Buffer:
      if (t->closed)
        os << "cbuf(" << t->chan << ")";
      else
        os << "buf(" << t->chan << ":" << t->count << "/" << t->capacity << ")";
      break;
  }
  return os.str();
}

bool type_equal(const TypePtr& a, const TypePtr& b) { return serial(a) == serial(b); }

static void fn_rec(const TypePtr& t, std::set<Name>& bound, std::set<Name>& out) {
  if (!t) return;
  auto see = [&](const Name& u) {
    if (!bound.count(u)) out.insert(u);
  };
  switch (t->kind) {
    case TypeTerm::Kind::Prefix:
      if (t->action.kind != TAction::Kind::Tau) see(t->action.chan);
      fn_rec(t->cont, bound, out);
      break;
    case TypeTerm::Kind::Choice:
      for (const auto& c : t->choices) fn_rec(c, bound, out);
      break;
    case TypeTerm::Kind::Branch:
      for (const auto& [k, body] : t->branches) {
        if (k.kind != TAction::Kind::Tau) see(k.chan);
        fn_rec(body, bound, out);
      }
      break;
    case TypeTerm::Kind::Par:
      fn_rec(t->left, bound, out);
      fn_rec(t->right, bound, out);
      break;
    case TypeTerm::Kind::Inact:
      break;
    case TypeTerm::Kind::NewChan:
    case TypeTerm::Kind::Restrict: {
      bool fresh = bound.insert(t->chan).second;
      fn_rec(t->cont, bound, out);
      if (fresh) bound.erase(t->chan);
      break;
    }
    case TypeTerm::Kind::CloseReq:
      see(t->chan);
      fn_rec(t->cont, bound, out);
      break;
    case TypeTerm::Kind::Call:
      for (const auto& a : t->args) see(a);
      break;
    case TypeTerm::Kind::Buffer:
      see(t->chan);
      break;
  }
}

std::set<Name> free_names(const TypePtr& t) {
  std::set<Name> bound, out;
  fn_rec(t, bound, out);
  return out;
}

namespace {
Name ty_fresh_against(const Name& base, const std::set<Name>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    Name cand = base + "#" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}
} // namespace

TypePtr subst_type(const TypePtr& t, const std::map<Name, Name>& m) {
  if (!t || m.empty()) return t;
  auto ch = [&](const Name& u) {
    auto it = m.find(u);
    return it == m.end() ? u : it->second;
  };
  auto binder_clash = [&](const Name& b) {
    for (const auto& [k, v] : m)
      if (v == b) return true;
    return false;
  };
  switch (t->kind) {
    case TypeTerm::Kind::Prefix: {
      TAction k = t->action;
      if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
      return TypeTerm::prefix(k, subst_type(t->cont, m));
    }
    case TypeTerm::Kind::Choice: {
      std::vector<TypePtr> cs;
      for (const auto& c : t->choices) cs.push_back(subst_type(c, m));
      return TypeTerm::choice(std::move(cs));
    }
    case TypeTerm::Kind::Branch: {
      std::vector<std::pair<TAction, TypePtr>> bs;
      for (const auto& [k0, body] : t->branches) {
        TAction k = k0;
        if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
        bs.emplace_back(k, subst_type(body, m));
      }
      return TypeTerm::branch(std::move(bs));
    }
    case TypeTerm::Kind::Par:
      return TypeTerm::par(subst_type(t->left, m), subst_type(t->right, m));
    case TypeTerm::Kind::Inact:
      return t;
    case TypeTerm::Kind::NewChan:
    case TypeTerm::Kind::Restrict: {
      auto m2 = m;
      m2.erase(t->chan);
      Name binder = t->chan;
      TypePtr body = t->cont;
      if (binder_clash(binder)) {
        std::set<Name> avoid = free_names(body);
        for (const auto& [k, v] : m2) {
          avoid.insert(k);
          avoid.insert(v);
        }
        Name nb = ty_fresh_against(binder, avoid);
        body = subst_type(body, {{binder, nb}});
        binder = nb;
      }
      if (t->kind == TypeTerm::Kind::NewChan)
        return TypeTerm::newchan(binder, t->capacity, subst_type(body, m2));
      return TypeTerm::restrict(binder, subst_type(body, m2));
    }
    case TypeTerm::Kind::CloseReq:
      return TypeTerm::close_req(ch(t->chan), subst_type(t->cont, m));
    case TypeTerm::Kind::Call: {
      std::vector<Name> as;
      for (const auto& a : t->args) as.push_back(ch(a));
      return TypeTerm::call(t->callee, std::move(as));
    }
    case TypeTerm::Kind::Buffer:
      return TypeTerm::buffer(ch(t->chan), t->count, t->capacity, t->closed);
  }
  return t;
}

} // namespace migo

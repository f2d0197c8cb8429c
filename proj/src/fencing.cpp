#include "migo/fencing.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace migo {

bool prec(const std::vector<Name>& u, const std::vector<Name>& x) {
  size_t n = x.size();
  if (u.size() != n || n == 0) return false;
  for (size_t k = 1; k <= n; ++k) {
    // u must be x_{k+1}..x_n followed by k names fresh wrt x
    bool ok = true;
    for (size_t i = 0; i + k < n; ++i)
      if (u[i] != x[i + k]) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (size_t j = n - k; j < n; ++j)
      for (size_t i = 0; i < n; ++i)
        if (u[j] == x[i]) {
          ok = false;
          break;
        }
    if (ok) return true;
  }
  return false;
}

namespace {

std::string show_names(const std::vector<Name>& ns) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < ns.size(); ++i) os << (i ? "," : "") << ns[i];
  os << ")";
  return os.str();
}

std::string call_key(const Name& t, const std::vector<Name>& args) {
  std::string s = t + "<";
  for (const auto& a : args) s += a + ",";
  return s + ">";
}

// Plain syntactic substitution, shadowing respected but no binder renaming:
// the literal reading of the fencing rules. It keeps every instantiated call
// inside the finite universe of parameter and binder names, which is what
// makes the seen-set G finite.
TypePtr naive_subst(const TypePtr& t, const std::map<Name, Name>& m) {
  if (!t || m.empty()) return t;
  auto ch = [&](const Name& u) {
    auto it = m.find(u);
    return it == m.end() ? u : it->second;
  };
  switch (t->kind) {
    case TypeTerm::Kind::Prefix: {
      TAction k = t->action;
      if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
      return TypeTerm::prefix(k, naive_subst(t->cont, m));
    }
    case TypeTerm::Kind::Choice: {
      std::vector<TypePtr> cs;
      for (const auto& c : t->choices) cs.push_back(naive_subst(c, m));
      return TypeTerm::choice(std::move(cs));
    }
    case TypeTerm::Kind::Branch: {
      std::vector<std::pair<TAction, TypePtr>> bs;
      for (const auto& [k0, body] : t->branches) {
        TAction k = k0;
        if (k.kind != TAction::Kind::Tau) k.chan = ch(k.chan);
        bs.emplace_back(k, naive_subst(body, m));
      }
      return TypeTerm::branch(std::move(bs));
    }
    case TypeTerm::Kind::Par:
      return TypeTerm::par(naive_subst(t->left, m), naive_subst(t->right, m));
    case TypeTerm::Kind::NewChan: {
      auto m2 = m;
      m2.erase(t->chan);
      return TypeTerm::newchan(t->chan, t->capacity, naive_subst(t->cont, m2));
    }
    case TypeTerm::Kind::Restrict: {
      auto m2 = m;
      m2.erase(t->chan);
      return TypeTerm::restrict(t->chan, naive_subst(t->cont, m2));
    }
    case TypeTerm::Kind::CloseReq:
      return TypeTerm::close_req(ch(t->chan), naive_subst(t->cont, m));
    case TypeTerm::Kind::Call: {
      std::vector<Name> as;
      for (const auto& a : t->args) as.push_back(ch(a));
      return TypeTerm::call(t->callee, std::move(as));
    }
    default:
      return t;
  }
}

struct FenceChecker {
  const TypeSystem& sys;
  Name root; // the equation variable t being checked
  FenceResult result;

  bool walk(const TypePtr& term, std::vector<Name> y, std::vector<Name> z,
            std::set<std::string>& seen, std::vector<std::string>& path, int depth) {
    if (!term) return true;
    if (depth > 4096) return false; // defensive cap; G keeps the space finite
    switch (term->kind) {
      case TypeTerm::Kind::Inact:
      case TypeTerm::Kind::Buffer:
        return true;
      case TypeTerm::Kind::Prefix:
      case TypeTerm::Kind::CloseReq:
      case TypeTerm::Kind::NewChan:
      case TypeTerm::Kind::Restrict:
        return walk(term->cont, y, z, seen, path, depth);
      case TypeTerm::Kind::Choice: {
        for (const auto& c : term->choices)
          if (!walk(c, y, z, seen, path, depth)) return false;
        return true;
      }
      case TypeTerm::Kind::Branch: {
        for (const auto& [k, body] : term->branches)
          if (!walk(body, y, z, seen, path, depth)) return false;
        return true;
      }
      case TypeTerm::Kind::Par: {
        // rule par moves the single-threaded names into z
        std::vector<Name> z2 = z;
        z2.insert(z2.end(), y.begin(), y.end());
        path.push_back("par: z := z . y = " + show_names(z2));
        bool ok = walk(term->left, {}, z2, seen, path, depth) &&
                  walk(term->right, {}, z2, seen, path, depth);
        path.pop_back();
        return ok;
      }
      case TypeTerm::Kind::Call: {
        if (term->callee == root) {
          // axiom: y != eps or u < z
          result.axiom_args.push_back(term->args);
          if (!y.empty() || prec(term->args, z)) return true;
          result.ok = false;
          FenceFailure f;
          f.equation = root;
          f.call_args = term->args;
          f.z_env = z;
          f.judgement_path = path;
          f.judgement_path.push_back("axiom fails: " + call_key(root, term->args) +
                                     " with z = " + show_names(z));
          result.failure = std::move(f);
          return false;
        }
        std::string key = call_key(term->callee, term->args);
        if (seen.count(key)) return true; // def-in
        const TypeEquation* eq = sys.find(term->callee);
        if (!eq) return true; // undefined calls are a parse-level error
        if (eq->params.size() != term->args.size()) return true;
        // def-not-in: unfold with actuals, extending G
        seen.insert(key);
        std::map<Name, Name> m;
        for (size_t i = 0; i < eq->params.size(); ++i) m[eq->params[i]] = term->args[i];
        path.push_back("unfold " + key);
        bool ok = walk(naive_subst(eq->body, m), y, z, seen, path, depth + 1);
        path.pop_back();
        return ok;
      }
    }
    return true;
  }
};

} // namespace

FenceResult check_equation(const Name& t, const TypeSystem& sys) {
  const TypeEquation* eq = sys.find(t);
  FenceChecker checker{sys, t};
  if (!eq) {
    checker.result.ok = false;
    return checker.result;
  }
  std::set<std::string> seen;
  std::vector<std::string> path;
  path.push_back("check " + t + show_names(eq->params));
  checker.walk(eq->body, eq->params, {}, seen, path, 0);
  return checker.result;
}

FenceVerdict is_fenced(const TypeSystem& sys) {
  FenceVerdict v;
  for (const auto& [name, eq] : sys.equations) {
    if (eq.params.empty()) continue; // vacuous
    FenceResult r = check_equation(name, sys);
    if (!r.ok) {
      v.fenced = false;
      v.failing_equation = name;
      v.failure = r.failure;
      return v;
    }
  }
  return v;
}

namespace {

long long size_rec(const TypePtr& t, const TypeSystem& sys, std::set<Name>& seen) {
  if (!t) return 0;
  switch (t->kind) {
    case TypeTerm::Kind::Inact:
    case TypeTerm::Kind::Buffer:
      return 0;
    case TypeTerm::Kind::Prefix:
    case TypeTerm::Kind::CloseReq:
      return 1 + size_rec(t->cont, sys, seen);
    case TypeTerm::Kind::NewChan:
    case TypeTerm::Kind::Restrict:
      return 1 + size_rec(t->cont, sys, seen);
    case TypeTerm::Kind::Choice: {
      long long s = 0;
      for (const auto& c : t->choices) s += size_rec(c, sys, seen);
      return s;
    }
    case TypeTerm::Kind::Branch: {
      long long s = 0;
      for (const auto& [k, body] : t->branches) s += 1 + size_rec(body, sys, seen);
      return s;
    }
    case TypeTerm::Kind::Par:
      return size_rec(t->left, sys, seen) + size_rec(t->right, sys, seen);
    case TypeTerm::Kind::Call: {
      if (seen.count(t->callee)) return 0;
      const TypeEquation* eq = sys.find(t->callee);
      if (!eq || eq->params.size() != t->args.size()) return 0;
      seen.insert(t->callee);
      std::map<Name, Name> m;
      for (size_t i = 0; i < eq->params.size(); ++i) m[eq->params[i]] = t->args[i];
      long long s = size_rec(subst_type(eq->body, m), sys, seen);
      seen.erase(t->callee);
      return s;
    }
  }
  return 0;
}

TypePtr unfold_rec(std::map<Name, int> budget, const std::set<Name>& names, const TypePtr& t,
                   const TypeSystem& sys) {
  if (!t) return t;
  switch (t->kind) {
    case TypeTerm::Kind::Inact:
    case TypeTerm::Kind::Buffer:
      return t;
    case TypeTerm::Kind::Prefix:
      return TypeTerm::prefix(t->action, unfold_rec(budget, names, t->cont, sys));
    case TypeTerm::Kind::CloseReq:
      return TypeTerm::close_req(t->chan, unfold_rec(budget, names, t->cont, sys));
    case TypeTerm::Kind::NewChan:
      return TypeTerm::newchan(t->chan, t->capacity, unfold_rec(budget, names, t->cont, sys));
    case TypeTerm::Kind::Restrict:
      return TypeTerm::restrict(t->chan, unfold_rec(budget, names, t->cont, sys));
    case TypeTerm::Kind::Choice: {
      std::vector<TypePtr> cs;
      for (const auto& c : t->choices) cs.push_back(unfold_rec(budget, names, c, sys));
      return TypeTerm::choice(std::move(cs));
    }
    case TypeTerm::Kind::Branch: {
      std::vector<std::pair<TAction, TypePtr>> bs;
      for (const auto& [k, body] : t->branches)
        bs.emplace_back(k, unfold_rec(budget, names, body, sys));
      return TypeTerm::branch(std::move(bs));
    }
    case TypeTerm::Kind::Par:
      return TypeTerm::par(unfold_rec(budget, names, t->left, sys),
                           unfold_rec(budget, names, t->right, sys));
    case TypeTerm::Kind::Call: {
      bool meets = false;
      for (const auto& a : t->args)
        if (names.count(a)) meets = true;
      auto it = budget.find(t->callee);
      int b = it == budget.end() ? 0 : it->second;
      const TypeEquation* eq = sys.find(t->callee);
      if (!meets || b <= 0 || !eq || eq->params.size() != t->args.size()) return t;
      auto budget2 = budget;
      budget2[t->callee] = b - 1;
      std::map<Name, Name> m;
      for (size_t i = 0; i < eq->params.size(); ++i) m[eq->params[i]] = t->args[i];
      return unfold_rec(budget2, names, subst_type(eq->body, m), sys);
    }
  }
  return t;
}

} // namespace

long long ty_size(const TypePtr& t, const TypeSystem& sys) {
  std::set<Name> seen;
  return size_rec(t, sys, seen);
}

TypePtr limited_unfold(int k, const std::set<Name>& names, const TypePtr& t,
                       const TypeSystem& sys) {
  std::map<Name, int> budget;
  for (const auto& [name, eq] : sys.equations) budget[name] = k;
  return unfold_rec(std::move(budget), names, t, sys);
}

long long occurrences(const TypePtr& term, const Name& t) {
  if (!term) return 0;
  switch (term->kind) {
    case TypeTerm::Kind::Inact:
    case TypeTerm::Kind::Buffer:
      return 0;
    case TypeTerm::Kind::Prefix:
    case TypeTerm::Kind::CloseReq:
    case TypeTerm::Kind::NewChan:
    case TypeTerm::Kind::Restrict:
      return occurrences(term->cont, t);
    case TypeTerm::Kind::Choice: {
      long long best = 0;
      for (const auto& c : term->choices) best = std::max(best, occurrences(c, t));
      return best;
    }
    case TypeTerm::Kind::Branch: {
      long long best = 0;
      for (const auto& [k, body] : term->branches) best = std::max(best, occurrences(body, t));
      return best;
    }
    case TypeTerm::Kind::Par:
      return occurrences(term->left, t) + occurrences(term->right, t);
    case TypeTerm::Kind::Call:
      return term->callee == t ? 1 : 0;
  }
  return 0;
}

} // namespace migo

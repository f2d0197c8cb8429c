#include "migo/validate.hpp"

#include <set>

namespace migo {

namespace {

void scan_runtime(const ProcPtr& p, std::vector<Diagnostic>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Restrict:
      out.push_back({"runtime-only restriction constructor in source program"});
      scan_runtime(p->cont, out);
      break;
    case Process::Kind::Buffer:
      out.push_back({"runtime-only buffer constructor in source program"});
      break;
    case Process::Kind::Prefixed:
    case Process::Kind::Close:
    case Process::Kind::NewChan:
      scan_runtime(p->cont, out);
      break;
    case Process::Kind::Select:
      if (p->branches.empty()) out.push_back({"empty select"});
      for (const auto& [pi, body] : p->branches) scan_runtime(body, out);
      break;
    case Process::Kind::Cond:
      scan_runtime(p->then_branch, out);
      scan_runtime(p->else_branch, out);
      break;
    case Process::Kind::Par:
      scan_runtime(p->left, out);
      scan_runtime(p->right, out);
      break;
    default:
      break;
  }
}

void check_calls(const ProcPtr& p, const Program& prog, const std::string& where,
                 std::vector<Diagnostic>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Call: {
      auto it = prog.defs.find(p->callee);
      if (it == prog.defs.end()) {
        out.push_back({"call to undefined process '" + p->callee + "' in " + where});
        return;
      }
      const Definition& d = it->second;
      if (p->val_args.size() != d.value_params.size() ||
          p->chan_args.size() != d.chan_params.size())
        out.push_back({"arity mismatch in call to '" + p->callee + "' in " + where});
      break;
    }
    case Process::Kind::Prefixed:
    case Process::Kind::Close:
    case Process::Kind::NewChan:
    case Process::Kind::Restrict:
      check_calls(p->cont, prog, where, out);
      break;
    case Process::Kind::Select:
      for (const auto& [pi, body] : p->branches) check_calls(body, prog, where, out);
      break;
    case Process::Kind::Cond:
      check_calls(p->then_branch, prog, where, out);
      check_calls(p->else_branch, prog, where, out);
      break;
    case Process::Kind::Par:
      check_calls(p->left, prog, where, out);
      check_calls(p->right, prog, where, out);
      break;
    default:
      break;
  }
}

} // namespace

std::vector<Diagnostic> validate(const Program& prog) {
  std::vector<Diagnostic> out;

  for (const auto& [name, def] : prog.defs) {
    // fn(D) = empty: a definition body may only use its channel parameters
    std::set<Name> chan_params;
    for (const auto& prm : def.chan_params) chan_params.insert(prm.name);
    for (const auto& n : free_names(def.body))
      if (!chan_params.count(n))
        out.push_back({"definition '" + name + "' uses free channel name '" + n + "'"});

    // fv(P) within value parameters
    std::set<Name> val_params;
    for (const auto& prm : def.value_params) val_params.insert(prm.name);
    for (const auto& v : free_vars(def.body))
      if (!val_params.count(v))
        out.push_back({"definition '" + name + "' uses unbound variable '" + v + "'"});

    scan_runtime(def.body, out);
    check_calls(def.body, prog, "definition " + name, out);
  }

  for (const auto& n : free_names(prog.main))
    out.push_back({"main process uses free channel name '" + n + "'"});
  for (const auto& v : free_vars(prog.main))
    out.push_back({"main process uses unbound variable '" + v + "'"});
  scan_runtime(prog.main, out);
  check_calls(prog.main, prog, "main process", out);

  // marks must be distinct across the whole program
  std::vector<int> marks = collect_marks(prog);
  std::set<int> seen;
  for (int m : marks)
    if (!seen.insert(m).second)
      out.push_back({"duplicate conditional mark " + std::to_string(m)});

  return out;
}

} // namespace migo

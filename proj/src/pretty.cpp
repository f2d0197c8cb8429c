#include "migo/pretty.hpp"

#include <sstream>

namespace migo {

namespace {

int prec_of(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
    case BinOp::Mul:
    case BinOp::Mod: return 5;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::And: return " and ";
    case BinOp::Or: return " or ";
    case BinOp::Add: return " + ";
    case BinOp::Sub: return " - ";
    case BinOp::Mul: return " * ";
    case BinOp::Mod: return " % ";
    case BinOp::Eq: return " == ";
    case BinOp::Ne: return " != ";
    case BinOp::Lt: return " < ";
    case BinOp::Le: return " <= ";
    case BinOp::Gt: return " > ";
    case BinOp::Ge: return " >= ";
  }
  return " ? ";
}

void pp_expr(const ExprPtr& e, int parent_prec, bool angle, std::ostringstream& os) {
  switch (e->kind) {
    case Expr::Kind::IntLit: os << e->int_val; break;
    case Expr::Kind::BoolLit: os << (e->bool_val ? "true" : "false"); break;
    case Expr::Kind::Var: os << e->var; break;
    case Expr::Kind::Not:
      os << "not(";
      pp_expr(e->lhs, 0, false, os);
      os << ")";
      break;
    case Expr::Kind::Succ:
      os << "succ(";
      pp_expr(e->lhs, 0, false, os);
      os << ")";
      break;
    case Expr::Kind::Bin: {
      int prec = prec_of(e->op);
      // inside send/call angle brackets comparisons must be parenthesised
      bool need = prec < parent_prec || (angle && prec == 3);
      if (need) os << "(";
      pp_expr(e->lhs, prec, angle && !need, os);
      os << op_text(e->op);
      pp_expr(e->rhs, prec + 1, angle && !need, os);
      if (need) os << ")";
      break;
    }
  }
}

std::string pp_expr_str(const ExprPtr& e, bool angle) {
  std::ostringstream os;
  pp_expr(e, 0, angle, os);
  return os.str();
}

void pp_proc(const ProcPtr& p, bool in_par, std::ostringstream& os);

void pp_branch_body(const ProcPtr& body, std::ostringstream& os) {
  if (body->kind == Process::Kind::Inact) {
    os << "0";
    return;
  }
  pp_proc(body, false, os);
}

void pp_proc(const ProcPtr& p, bool parenthesize_par, std::ostringstream& os) {
  switch (p->kind) {
    case Process::Kind::Prefixed:
      os << pretty(p->prefix) << "; ";
      pp_proc(p->cont, true, os);
      break;
    case Process::Kind::Close:
      os << "close " << p->chan << "; ";
      pp_proc(p->cont, true, os);
      break;
    case Process::Kind::Select: {
      os << "select { ";
      bool first = true;
      for (const auto& [pi, body] : p->branches) {
        if (!first) os << " [] ";
        first = false;
        os << pretty(pi) << "; ";
        pp_branch_body(body, os);
      }
      os << " }";
      break;
    }
    case Process::Kind::Cond:
      os << "if " << (p->guard ? pp_expr_str(*p->guard, false) : std::string("*")) << " then ";
      pp_proc(p->then_branch, true, os);
      os << " else ";
      pp_proc(p->else_branch, true, os);
      break;
    case Process::Kind::NewChan:
      os << "new " << p->chan << " : " << sort_name(p->payload);
      if (p->capacity > 0) os << ", " << p->capacity;
      os << "; ";
      pp_proc(p->cont, true, os);
      break;
    case Process::Kind::Par: {
      if (parenthesize_par) os << "(";
      pp_proc(p->left, p->left->kind != Process::Kind::Par, os);
      os << " | ";
      pp_proc(p->right, true, os);
      if (parenthesize_par) os << ")";
      break;
    }
    case Process::Kind::Inact:
      os << "0";
      break;
    case Process::Kind::Call: {
      os << p->callee << "<";
      bool first = true;
      for (const auto& e : p->val_args) {
        if (!first) os << ", ";
        first = false;
        os << pp_expr_str(e, true);
      }
      for (const auto& u : p->chan_args) {
        if (!first) os << ", ";
        first = false;
        os << u;
      }
      os << ">";
      break;
    }
    case Process::Kind::Restrict:
      os << "(nu " << p->chan << ") ";
      pp_proc(p->cont, true, os);
      break;
    case Process::Kind::Buffer: {
      os << "[";
      bool first = true;
      for (const auto& v : p->queue) {
        if (!first) os << ",";
        first = false;
        os << show_value(v);
      }
      os << "]_" << p->chan << (p->closed ? "#" : "") << "(" << sort_name(p->payload) << ","
         << p->capacity << ")";
      break;
    }
  }
}

void pp_type(const TypePtr& t, bool parenthesize_par, std::ostringstream& os) {
  switch (t->kind) {
    case TypeTerm::Kind::Prefix:
      os << pretty(t->action);
      if (t->cont->kind == TypeTerm::Kind::Inact) {
        os << "; 0";
      } else {
        os << "; ";
        pp_type(t->cont, true, os);
      }
      break;
    case TypeTerm::Kind::Choice: {
      os << "oplus { ";
      bool first = true;
      for (const auto& c : t->choices) {
        if (!first) os << ", ";
        first = false;
        pp_type(c, false, os);
      }
      os << " }";
      break;
    }
    case TypeTerm::Kind::Branch: {
      os << "branch { ";
      bool first = true;
      for (const auto& [k, body] : t->branches) {
        if (!first) os << " [] ";
        first = false;
        os << pretty(k) << "; ";
        pp_type(body, false, os);
      }
      os << " }";
      break;
    }
    case TypeTerm::Kind::Par:
      if (parenthesize_par) os << "(";
      pp_type(t->left, t->left->kind != TypeTerm::Kind::Par, os);
      os << " | ";
      pp_type(t->right, true, os);
      if (parenthesize_par) os << ")";
      break;
    case TypeTerm::Kind::Inact:
      os << "0";
      break;
    case TypeTerm::Kind::NewChan:
      os << "newchan " << t->chan;
      if (t->capacity > 0) os << ", " << t->capacity;
      os << "; ";
      pp_type(t->cont, true, os);
      break;
    case TypeTerm::Kind::CloseReq:
      os << "end[" << t->chan << "]; ";
      pp_type(t->cont, true, os);
      break;
    case TypeTerm::Kind::Call: {
      os << t->callee << "<";
      bool first = true;
      for (const auto& a : t->args) {
        if (!first) os << ", ";
        first = false;
        os << a;
      }
      os << ">";
      break;
    }
    case TypeTerm::Kind::Restrict:
      os << "(nu " << t->chan << ") ";
      pp_type(t->cont, true, os);
      break;
    case TypeTerm::Kind::Buffer:
      if (t->closed)
        os << "[" << t->chan << "#]";
      else
        os << "[" << t->chan << ":" << t->count << "/" << t->capacity << "]";
      break;
  }
}

} // namespace

std::string pretty(const ExprPtr& e) { return pp_expr_str(e, false); }

std::string pretty(const Prefix& pi) {
  switch (pi.kind) {
    case Prefix::Kind::Send: return pi.chan + "!<" + pp_expr_str(pi.payload, true) + ">";
    case Prefix::Kind::Recv: return pi.chan + "?(" + pi.bind + ")";
    case Prefix::Kind::Tau: return "tau";
  }
  return "?";
}

std::string pretty(const ProcPtr& p) {
  std::ostringstream os;
  pp_proc(p, false, os);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  os << "def";
  bool first = true;
  for (const auto& [name, d] : p.defs) {
    os << (first ? " " : ";\n    ");
    first = false;
    os << name << "(";
    bool fp = true;
    for (const auto& prm : d.value_params) {
      if (!fp) os << ", ";
      fp = false;
      os << prm.name << ":" << sort_name(prm.sort);
    }
    for (const auto& prm : d.chan_params) {
      if (!fp) os << ", ";
      fp = false;
      os << prm.name << ":chan " << sort_name(prm.sort);
    }
    os << ") = ";
    pp_proc(d.body, false, os);
  }
  os << "\nin ";
  pp_proc(p.main, false, os);
  os << "\n";
  return os.str();
}

std::string pretty(const TAction& k) {
  switch (k.kind) {
    case TAction::Kind::Send: return "send " + k.chan;
    case TAction::Kind::Recv: return "recv " + k.chan;
    case TAction::Kind::Tau: return "tau";
  }
  return "?";
}

std::string pretty(const TypePtr& t) {
  std::ostringstream os;
  pp_type(t, false, os);
  return os.str();
}

std::string pretty(const TypeSystem& sys) {
  std::ostringstream os;
  for (const auto& [name, eq] : sys.equations) {
    os << name << "(";
    bool first = true;
    for (const auto& x : eq.params) {
      if (!first) os << ", ";
      first = false;
      os << x;
    }
    os << ") = ";
    pp_type(eq.body, false, os);
    os << ";\n";
  }
  return os.str();
}

} // namespace migo

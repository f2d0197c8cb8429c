#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

// Process-level syntax: expressions, prefixes, processes, programs.
// Terms are immutable and shared; all operations build fresh nodes.

namespace migo {

using Name = std::string;

enum class Sort { Int, Bool };

const char* sort_name(Sort s);

// Runtime values. Each sort has a bottom element, received from closed
// channels: bottom(int) = 0, bottom(bool) = false.
struct Value {
  Sort sort = Sort::Int;
  std::int64_t i = 0;
  bool b = false;

  static Value make_int(std::int64_t v) { return {Sort::Int, v, false}; }
  static Value make_bool(bool v) { return {Sort::Bool, 0, v}; }
  static Value bottom(Sort s) { return s == Sort::Int ? make_int(0) : make_bool(false); }

  bool operator==(const Value& o) const {
    return sort == o.sort && i == o.i && b == o.b;
  }
};

std::string show_value(const Value& v);

enum class BinOp { Add, Sub, Mul, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* binop_name(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, BoolLit, Var, Not, Succ, Bin };
  Kind kind;
  std::int64_t int_val = 0;
  bool bool_val = false;
  Name var;
  BinOp op = BinOp::Add;
  ExprPtr lhs, rhs;

  static ExprPtr lit_int(std::int64_t v);
  static ExprPtr lit_bool(bool v);
  static ExprPtr mk_var(Name x);
  static ExprPtr mk_not(ExprPtr e);
  static ExprPtr mk_succ(ExprPtr e);
  static ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r);
};

void expr_vars(const ExprPtr& e, std::set<Name>& out);

// Communication prefixes pi ::= u!<e> | u?(y) | tau.
struct Prefix {
  enum class Kind { Send, Recv, Tau };
  Kind kind = Kind::Tau;
  Name chan;      // name or channel variable (unused for tau)
  ExprPtr payload; // send only
  Name bind;      // recv only, binds a value variable

  static Prefix send(Name u, ExprPtr e) { return {Kind::Send, std::move(u), std::move(e), {}}; }
  static Prefix recv(Name u, Name y) { return {Kind::Recv, std::move(u), nullptr, std::move(y)}; }
  static Prefix tau() { return {}; }
};

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

// Process constructors. Restrict and Buffer are runtime-only: they never
// occur in parsed source programs.
struct Process {
  enum class Kind {
    Prefixed,  // pi; P
    Close,     // close u; P
    Select,    // select { pi_i; P_i [] ... }
    Cond,      // if e then P else Q   (guard absent = star-conditional)
    NewChan,   // new y:sigma[,n]; P
    Par,       // P | Q
    Inact,     // 0
    Call,      // X<e..., u...>
    Restrict,  // (nu c) P            [runtime]
    Buffer,    // open/closed buffer  [runtime]
  };

  Kind kind;

  Prefix prefix;                                     // Prefixed
  ProcPtr cont;                                      // Prefixed/Close/NewChan/Restrict
  Name chan;                                         // Close; NewChan/Restrict bound name; Buffer name
  std::vector<std::pair<Prefix, ProcPtr>> branches;  // Select
  std::optional<ExprPtr> guard;                      // Cond (nullopt = star)
  ProcPtr then_branch, else_branch;                  // Cond
  std::optional<int> mark;                           // Cond mark (Def of marked programs)
  Sort payload = Sort::Int;                          // NewChan/Buffer
  int capacity = 0;                                  // NewChan/Buffer
  ProcPtr left, right;                               // Par
  Name callee;                                       // Call
  std::vector<ExprPtr> val_args;                     // Call
  std::vector<Name> chan_args;                       // Call
  std::deque<Value> queue;                           // Buffer contents (front = oldest)
  bool closed = false;                               // Buffer state

  static ProcPtr prefixed(Prefix pi, ProcPtr p);
  static ProcPtr close(Name u, ProcPtr p);
  static ProcPtr select(std::vector<std::pair<Prefix, ProcPtr>> bs);
  static ProcPtr cond(std::optional<ExprPtr> e, ProcPtr t, ProcPtr f,
                      std::optional<int> mark = std::nullopt);
  static ProcPtr newchan(Name y, Sort s, int capacity, ProcPtr p);
  static ProcPtr par(ProcPtr l, ProcPtr r);
  static ProcPtr inact();
  static ProcPtr call(Name x, std::vector<ExprPtr> es, std::vector<Name> us);
  static ProcPtr restrict(Name c, ProcPtr p);
  static ProcPtr buffer(Name c, Sort s, int capacity, std::deque<Value> q, bool closed);
};

struct Param {
  Name name;
  bool is_chan = false;
  Sort sort = Sort::Int; // value sort, or channel payload sort
};

struct Definition {
  Name name;
  std::vector<Param> value_params;
  std::vector<Param> chan_params;
  ProcPtr body;
};

struct Program {
  std::map<Name, Definition> defs;
  ProcPtr main;
};

// Unambiguous structural encoding; equality of terms is equality of keys.
std::string serial(const ExprPtr& e);
std::string serial(const ProcPtr& p);
bool proc_equal(const ProcPtr& a, const ProcPtr& b);

// Free channel identifiers (names and unbound channel variables); new and
// restriction bind, receive binds value variables only.
std::set<Name> free_names(const ProcPtr& p);
// Free value variables; receive and definition value parameters bind.
std::set<Name> free_vars(const ProcPtr& p);

// Capture-avoiding substitution of values for value variables and names for
// channel identifiers.
ProcPtr subst(const ProcPtr& p, const std::map<Name, Value>& vals,
              const std::map<Name, Name>& chans);

std::vector<int> collect_marks(const ProcPtr& p);
std::vector<int> collect_marks(const Program& p);

} // namespace migo

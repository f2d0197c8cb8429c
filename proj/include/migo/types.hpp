#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "migo/ast.hpp"

// Behavioural type terms and systems of mutually recursive type equations.

namespace migo {

struct TypeTerm;
using TypePtr = std::shared_ptr<const TypeTerm>;

// Prefix actions kappa ::= send u | recv u | tau.
struct TAction {
  enum class Kind { Send, Recv, Tau };
  Kind kind = Kind::Tau;
  Name chan;

  static TAction send(Name u) { return {Kind::Send, std::move(u)}; }
  static TAction recv(Name u) { return {Kind::Recv, std::move(u)}; }
  static TAction tau() { return {}; }
};

struct TypeTerm {
  enum class Kind {
    Prefix,   // kappa; T
    Choice,   // oplus { T_i }            (internal)
    Branch,   // branch { k_i; T_i }      (external, guarded)
    Par,      // T | S
    Inact,    // 0
    NewChan,  // newchan a[,n]; T
    CloseReq, // end[u]; T
    Call,     // t<u...>
    Restrict, // (nu a) T       [runtime]
    Buffer,   // [a:k/n] open or [a#] closed  [runtime]
  };

  Kind kind;

  TAction action;                                   // Prefix
  TypePtr cont;                                     // Prefix/NewChan/CloseReq/Restrict
  std::vector<TypePtr> choices;                     // Choice
  std::vector<std::pair<TAction, TypePtr>> branches; // Branch
  TypePtr left, right;                              // Par
  Name chan;                                        // NewChan/CloseReq/Restrict/Buffer
  int capacity = 0;                                 // NewChan/Buffer
  int count = 0;                                    // Buffer fill level
  bool closed = false;                              // Buffer state
  Name callee;                                      // Call
  std::vector<Name> args;                           // Call

  static TypePtr prefix(TAction k, TypePtr t);
  static TypePtr choice(std::vector<TypePtr> ts);
  static TypePtr branch(std::vector<std::pair<TAction, TypePtr>> bs);
  static TypePtr par(TypePtr l, TypePtr r);
  static TypePtr inact();
  static TypePtr newchan(Name a, int capacity, TypePtr t);
  static TypePtr close_req(Name u, TypePtr t);
  static TypePtr call(Name t, std::vector<Name> args);
  static TypePtr restrict(Name a, TypePtr t);
  static TypePtr buffer(Name a, int count, int capacity, bool closed);
};

struct TypeEquation {
  Name name;
  std::vector<Name> params;
  TypePtr body;
};

// A system of equations with the distinguished entry t0().
struct TypeSystem {
  std::map<Name, TypeEquation> equations;
  Name entry = "t0";

  const TypeEquation* find(const Name& t) const {
    auto it = equations.find(t);
    return it == equations.end() ? nullptr : &it->second;
  }
};

std::string serial(const TypePtr& t);
bool type_equal(const TypePtr& a, const TypePtr& b);

std::set<Name> free_names(const TypePtr& t);

// Substitution of names for names (call unfolding), capture-avoiding.
TypePtr subst_type(const TypePtr& t, const std::map<Name, Name>& m);

} // namespace migo

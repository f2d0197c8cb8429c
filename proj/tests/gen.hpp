#pragma once

// Random small type terms and structural-congruence rewrites for the
// property suites.

#include <random>
#include <vector>

#include "migo/types.hpp"

namespace migo::testgen {

inline Name pick_name(std::mt19937& rng) {
  static const char* pool[] = {"a", "b", "c", "x", "y"};
  return pool[rng() % 5];
}

// A fixed ambient system the generated calls can reference.
inline const TypeSystem& gen_system() {
  static TypeSystem sys = [] {
    TypeSystem s;
    s.equations["t0"] = {"t0", {}, TypeTerm::inact()};
    s.equations["sx"] = {"sx", {"u"},
                         TypeTerm::prefix(TAction::send("u"), TypeTerm::call("sx", {"u"}))};
    s.equations["rx"] = {"rx", {"u"},
                         TypeTerm::prefix(TAction::recv("u"), TypeTerm::call("rx", {"u"}))};
    return s;
  }();
  return sys;
}

inline TypePtr random_type(std::mt19937& rng, int depth) {
  if (depth <= 0) {
    switch (rng() % 4) {
      case 0: return TypeTerm::inact();
      case 1: return TypeTerm::call("sx", {pick_name(rng)});
      case 2: return TypeTerm::buffer(pick_name(rng), 0, static_cast<int>(rng() % 2), false);
      default: return TypeTerm::prefix(TAction::send(pick_name(rng)), TypeTerm::inact());
    }
  }
  switch (rng() % 9) {
    case 0: return TypeTerm::prefix(TAction::send(pick_name(rng)), random_type(rng, depth - 1));
    case 1: return TypeTerm::prefix(TAction::recv(pick_name(rng)), random_type(rng, depth - 1));
    case 2: return TypeTerm::prefix(TAction::tau(), random_type(rng, depth - 1));
    case 3:
      return TypeTerm::choice({random_type(rng, depth - 1), random_type(rng, depth - 1)});
    case 4:
      return TypeTerm::branch({{TAction::recv(pick_name(rng)), random_type(rng, depth - 1)},
                               {TAction::send(pick_name(rng)), random_type(rng, depth - 1)}});
    case 5: return TypeTerm::par(random_type(rng, depth - 1), random_type(rng, depth - 1));
    case 6: return TypeTerm::newchan(pick_name(rng), static_cast<int>(rng() % 2),
                                     random_type(rng, depth - 1));
    case 7: return TypeTerm::close_req(pick_name(rng), random_type(rng, depth - 1));
    default: return TypeTerm::restrict(pick_name(rng), random_type(rng, depth - 1));
  }
}

// One random structural-congruence rewrite (commutativity/associativity/unit
// of |, restriction swap and introduction, dead buffers, scope extrusion,
// alpha-renaming).
inline TypePtr rewrite_once(std::mt19937& rng, const TypePtr& t) {
  switch (rng() % 8) {
    case 0: // T ~ T | 0
      return TypeTerm::par(t, TypeTerm::inact());
    case 1: // T ~ 0 | T
      return TypeTerm::par(TypeTerm::inact(), t);
    case 2: // commute a top-level par
      if (t->kind == TypeTerm::Kind::Par) return TypeTerm::par(t->right, t->left);
      return TypeTerm::par(TypeTerm::inact(), t);
    case 3: // associate
      if (t->kind == TypeTerm::Kind::Par && t->left->kind == TypeTerm::Kind::Par)
        return TypeTerm::par(t->left->left, TypeTerm::par(t->left->right, t->right));
      return t;
    case 4: // (nu fresh) T with fresh unused
      return TypeTerm::restrict("zfresh", t);
    case 5: // dead buffer under its own restriction
      return TypeTerm::par(t, TypeTerm::restrict("zdead", TypeTerm::buffer("zdead", 0, 1, false)));
    case 6: // swap two adjacent restrictions
      if (t->kind == TypeTerm::Kind::Restrict && t->cont->kind == TypeTerm::Kind::Restrict &&
          t->chan != t->cont->chan)
        return TypeTerm::restrict(t->cont->chan, TypeTerm::restrict(t->chan, t->cont->cont));
      return t;
    default: // alpha-rename an outer restriction
      if (t->kind == TypeTerm::Kind::Restrict) {
        Name fresh = "zalpha";
        if (!free_names(t->cont).count(fresh) && t->chan != fresh)
          return TypeTerm::restrict(fresh, subst_type(t->cont, {{t->chan, fresh}}));
      }
      return t;
  }
}

} // namespace migo::testgen

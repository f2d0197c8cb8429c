#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "migo/parser.hpp"
#include "migo/pretty.hpp"
#include "migo/typesem.hpp"

using namespace migo;

namespace {

const char* kSieveTypes = R"(
g(x) = send x; g<x>;
f(x,y) = recv x; oplus { send y; f<x,y>, f<x,y> };
r(x) = recv x; newchan b; (f<x,b> | r<b>);
t0() = newchan a; (g<a> | r<a>)
)";

const char* kReaderWriter = R"(
w(x) = send x; w<x>;
r(x) = recv x; r<x>;
t1(x) = w<x> | r<x> | t1<x>;
t0() = newchan a; t1<a>
)";

bool has_edge(const std::vector<std::pair<Label, TypePtr>>& succs, Label::Kind kind,
              const Name& chan = "") {
  for (const auto& [l, t] : succs)
    if (l.kind == kind && (chan.empty() || l.chan == chan)) return true;
  return false;
}

} // namespace

TEST_CASE("canonicalize: restriction order is quotiented") {
  TypePtr inner = TypeTerm::par(TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()),
                                TypeTerm::prefix(TAction::recv("b"), TypeTerm::inact()));
  TypePtr ab = TypeTerm::restrict("a", TypeTerm::restrict("b", inner));
  TypePtr ba = TypeTerm::restrict("b", TypeTerm::restrict("a", inner));
  CHECK(type_equal(canonicalize(ab), canonicalize(ba)));
}

TEST_CASE("canonicalize: (nu a) 0 collapses to 0") {
  TypePtr t = TypeTerm::restrict("a", TypeTerm::inact());
  CHECK(type_equal(canonicalize(t), TypeTerm::inact()));
}

TEST_CASE("canonicalize: unused restrictions vanish, bound names are canonical") {
  // (nu a)(nu b) t<b>  ->  (nu _0) t<_0>
  TypePtr t = TypeTerm::restrict(
      "a", TypeTerm::restrict("b", TypeTerm::call("t", {"b"})));
  TypePtr c = canonicalize(t);
  REQUIRE(c->kind == TypeTerm::Kind::Restrict);
  CHECK(c->chan == "_0");
  CHECK(c->cont->kind == TypeTerm::Kind::Call);
  CHECK(c->cont->args == std::vector<Name>{"_0"});
}

TEST_CASE("canonicalize: alpha-equivalent terms coincide") {
  TypePtr t1 = TypeTerm::restrict("a", TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()));
  TypePtr t2 = TypeTerm::restrict("q", TypeTerm::prefix(TAction::send("q"), TypeTerm::inact()));
  CHECK(type_equal(canonicalize(t1), canonicalize(t2)));
}

TEST_CASE("type_step: open buffer accepts a close") {
  TypeSystem sys = parse_type_system("t0() = 0");
  auto succs = type_step(sys, TypeTerm::buffer("a", 0, 0, false));
  CHECK(has_edge(succs, Label::Kind::CloseAccept, "a"));
}

TEST_CASE("type_step: send and receive synchronise") {
  TypeSystem sys = parse_type_system("t0() = 0");
  TypePtr t = TypeTerm::par(TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()),
                            TypeTerm::prefix(TAction::recv("a"), TypeTerm::inact()));
  auto succs = type_step(sys, t);
  REQUIRE(has_edge(succs, Label::Kind::Sync, "a"));
  for (const auto& [l, s] : succs)
    if (l.kind == Label::Kind::Sync) CHECK(type_equal(s, TypeTerm::inact()));
}

TEST_CASE("type_step: a send pushes into a buffer with room") {
  TypeSystem sys = parse_type_system("t0() = 0");
  TypePtr t = TypeTerm::par(TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()),
                            TypeTerm::buffer("a", 0, 1, false));
  auto succs = type_step(sys, t);
  bool found = false;
  for (const auto& [l, s] : succs)
    if (l.kind == Label::Kind::Sync && serial(s).find("buf(a:1/1)") != std::string::npos)
      found = true;
  CHECK(found);
}

TEST_CASE("type_step: internal choice moves silently to each branch") {
  TypeSystem sys = parse_type_system("t0() = 0");
  TypePtr t = TypeTerm::choice({TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()),
                                TypeTerm::prefix(TAction::recv("b"), TypeTerm::inact())});
  auto succs = type_step(sys, t);
  int taus = 0;
  for (const auto& [l, s] : succs) taus += l.is_tau();
  CHECK(taus == 2);
}

TEST_CASE("symbolic stuckness of the sieve fragment (k = 1 vs k = 2)") {
  TypeSystem sys = parse_type_system(kSieveTypes);

  SUBCASE("k = 1: no progress after the a-synchronisation") {
    // {a} |- (nu b)(g<a> | send b; f<a,b> | r<b>)
    TypePtr frag = TypeTerm::restrict(
        "b", TypeTerm::par(
                 TypeTerm::par(TypeTerm::call("g", {"a"}),
                               TypeTerm::prefix(TAction::send("b"),
                                                TypeTerm::call("f", {"a", "b"}))),
                 TypeTerm::call("r", {"b"})));
    SymbolicState s{{"a"}, normalize_type_state(frag), 1};
    auto succs = sym_step(s, sys);
    for (const auto& [l, t] : succs) {
      CHECK(!l.is_tau());
      CHECK(l.kind != Label::Kind::Sync);
    }
  }

  SUBCASE("k = 2: the b-synchronisation fires and a new filter spawns") {
    TypePtr frag = TypeTerm::par(
        TypeTerm::par(TypeTerm::call("g", {"a"}),
                      TypeTerm::prefix(TAction::send("b"), TypeTerm::call("f", {"a", "b"}))),
        TypeTerm::call("r", {"b"}));
    SymbolicState s{{"a", "b"}, normalize_type_state(frag), 2};
    auto succs = sym_step(s, sys);
    bool sync_b = false;
    for (const auto& [l, t] : succs) {
      if (l.kind == Label::Kind::Sync && l.chan == "b") {
        sync_b = true;
        // one tau later the new filter f<b,_> is spawned
        bool spawned = false;
        for (const auto& [l2, t2] : sym_step(t, sys)) {
          if (!l2.is_tau()) continue;
          if (serial(t2.term).find("call:f<b,") != std::string::npos) spawned = true;
        }
        CHECK(spawned);
      }
    }
    CHECK(sync_b);
  }
}

TEST_CASE("reachable: sieve at k = 2 is a small finite graph") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  TypeGraph g = reachable(sys, 2);
  CHECK(g.nodes.size() >= 5);
  CHECK(g.nodes.size() <= 500);
}

TEST_CASE("reachable: the trivial system has one state") {
  TypeSystem sys = parse_type_system("t0() = 0");
  TypeGraph g = reachable(sys, 2);
  CHECK(g.nodes.size() == 1);
}

TEST_CASE("reachable rejects unfenced systems") {
  TypeSystem sys = parse_type_system(kReaderWriter);
  CHECK_THROWS_AS(reachable(sys, 2), std::invalid_argument);
}

TEST_CASE("type barbs") {
  TypeSystem sys = parse_type_system("t0() = 0");

  // closed buffer: closed-channel barb
  BarbSet b1 = type_barbs(sys, TypeTerm::buffer("a", 0, 0, true));
  CHECK(b1.has({Barb::Kind::ClosedChan, "a"}));

  // recv a | send a: sync barb
  TypePtr t2 = TypeTerm::par(TypeTerm::prefix(TAction::recv("a"), TypeTerm::inact()),
                             TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()));
  CHECK(type_barbs(sys, t2).has_sync("a"));

  // send a | [a:0/1]: sync barb via the buffer
  TypePtr t3 = TypeTerm::par(TypeTerm::prefix(TAction::send("a"), TypeTerm::inact()),
                             TypeTerm::buffer("a", 0, 1, false));
  CHECK(type_barbs(sys, t3).has_sync("a"));

  // non-empty buffer | recv a: sync barb
  TypePtr t4 = TypeTerm::par(TypeTerm::buffer("a", 1, 1, false),
                             TypeTerm::prefix(TAction::recv("a"), TypeTerm::inact()));
  CHECK(type_barbs(sys, t4).has_sync("a"));

  // external choice with all guards barbed: multi-barb
  TypePtr t5 = TypeTerm::branch({{TAction::send("a"), TypeTerm::inact()},
                                 {TAction::recv("b"), TypeTerm::inact()}});
  BarbSet b5 = type_barbs(sys, t5);
  CHECK(b5.multis.size() == 1);
  // with a tau guard the multi-barb disappears
  TypePtr t6 = TypeTerm::branch({{TAction::send("a"), TypeTerm::inact()},
                                 {TAction::tau(), TypeTerm::inact()}});
  CHECK(type_barbs(sys, t6).multis.empty());
}

TEST_CASE("canonicalize is idempotent and quotients the congruence axioms") {
  std::mt19937 rng(97);
  int instances = 0;
  for (int i = 0; i < 300; ++i) {
    TypePtr t = testgen::random_type(rng, 1 + static_cast<int>(rng() % 4));
    TypePtr c1 = canonicalize(t);
    CHECK(type_equal(canonicalize(c1), c1));
    TypePtr r = t;
    for (int j = 0; j < 3; ++j) r = testgen::rewrite_once(rng, r);
    CHECK_MESSAGE(type_equal(canonicalize(r), c1), "term ", pretty(t), " rewritten ", pretty(r));
    ++instances;
  }
  CHECK(instances == 300);
}

TEST_CASE("symbolic transitions are contained in the concrete LTS") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  for (int k = 1; k <= 3; ++k) {
    TypeGraph g = reachable(sys, k);
    for (const auto& node : g.nodes) {
      auto concrete = type_step(sys, node.state.term);
      std::set<std::string> concrete_keys;
      for (const auto& [l, t] : concrete)
        concrete_keys.insert(show_label(l) + "/" + serial(canonicalize(t)));
      for (const auto& [l, s] : sym_step(node.state, sys)) {
        CHECK_MESSAGE(
            concrete_keys.count(show_label(l) + "/" + serial(canonicalize(s.term))) == 1,
            "missing concrete edge ", show_label(l), " from ", pretty(node.state.term));
      }
    }
  }
}

TEST_CASE("tracked names never exceed the bound along reachability") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  for (int k = 1; k <= 3; ++k) {
    TypeGraph g = reachable(sys, k);
    for (const auto& node : g.nodes)
      CHECK(tracked_names(node.state).size() <= static_cast<size_t>(k));
  }
}

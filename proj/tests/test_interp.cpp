#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "migo/explore.hpp"
#include "migo/interp.hpp"
#include "migo/parser.hpp"
#include "migo/pretty.hpp"

using namespace migo;

namespace {

const char* kFib3 = R"(
def Fib(n:int, c:chan int) =
      if n <= 1 then c!<n>; 0
      else new b:int; (Fib<n-1, b> | Fib<n-2, b> | b?(x); b?(y); c!<x+y>; 0)
in new c:int; (Fib<3, c> | c?(u); 0)
)";

const char* kFibBad3 = R"(
def Fib(n:int, c:chan int) =
      new b:int; (Fib<n-1, b> | Fib<n-2, b> | b?(x); b?(y); c!<x+y>; 0)
in new c:int; (Fib<3, c> | c?(u); 0)
)";

const char* kSieve = R"(
def G(n:int, c:chan int) = c!<n>; G<n+1, c>;
    F(n:int, i:chan int, o:chan int) =
      i?(x); if x % n != 0 then o!<x>; F<n, i, o> else F<n, i, o>;
    R(c:chan int) = c?(x); new c1:int; (F<x, c, c1> | R<c1>)
in new c:int; (G<2, c> | R<c>)
)";

const char* kCondRecur = R"(
def X(i:int, c:chan int, d:chan int) =
      if i < 3 then c!<i>; X<i+1, c, d> else d!<1>; 0;
    M(c:chan int, d:chan int) = select { c?(x); M<c, d> [] d?(y); 0 }
in new c:int; new d:int; (X<0, c, d> | M<c, d>)
)";

Program parse_ok(const char* text) { return parse_program(text); }

std::multiset<std::string> canon_successors(const Program& prog, const ProcPtr& s) {
  std::multiset<std::string> out;
  for (const auto& [l, t] : step(prog, s))
    out.insert(show_label(l) + "/" + serial(canon_process(t)));
  return out;
}

} // namespace

TEST_CASE("eval_expr examples") {
  CHECK(eval_expr(Expr::mk_succ(Expr::lit_int(2)), {}) == Value::make_int(3));
  // 9 mod 3 != 0  ->  false
  ExprPtr e = Expr::bin(BinOp::Ne, Expr::bin(BinOp::Mod, Expr::lit_int(9), Expr::lit_int(3)),
                        Expr::lit_int(0));
  CHECK(eval_expr(e, {}) == Value::make_bool(false));
  CHECK(eval_expr(Expr::mk_not(Expr::lit_bool(true)), {}) == Value::make_bool(false));
  CHECK_THROWS_AS(eval_expr(Expr::mk_var("x"), {}), EvalError);
  CHECK_THROWS_AS(eval_expr(Expr::mk_succ(Expr::lit_bool(true)), {}), EvalError);
}

TEST_CASE("scom: synchronous rendezvous substitutes the value") {
  Program prog = parse_ok("def in 0");
  // c!<1>;0 | c?(y); d!<y>;0 | [empty]_c | [empty]_d
  ProcPtr s = Process::par(
      Process::par(Process::prefixed(Prefix::send("c", Expr::lit_int(1)), Process::inact()),
                   Process::prefixed(Prefix::recv("c", "y"),
                                     Process::prefixed(Prefix::send("d", Expr::mk_var("y")),
                                                       Process::inact()))),
      Process::par(Process::buffer("c", Sort::Int, 0, {}, false),
                   Process::buffer("d", Sort::Int, 0, {}, false)));
  auto succs = step(prog, s);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].first == ActionLabel::eps());
  // the receiver's continuation now sends the received 1 on d
  CHECK(serial(succs[0].second).find("!d<i1>") != std::string::npos);
}

TEST_CASE("sclose: receive on a closed channel yields the bottom element") {
  Program prog = parse_ok("def in 0");
  ProcPtr s = Process::par(
      Process::prefixed(Prefix::recv("c", "y"),
                        Process::prefixed(Prefix::send("d", Expr::mk_var("y")),
                                          Process::inact())),
      Process::par(Process::buffer("c", Sort::Int, 0, {}, true),
                   Process::buffer("d", Sort::Int, 0, {}, false)));
  auto succs = step(prog, s);
  REQUIRE(succs.size() == 1);
  // bottom(int) = 0
  CHECK(serial(succs[0].second).find("!d<i0>") != std::string::npos);
}

TEST_CASE("inaction has no successors") {
  Program prog = parse_ok("def in 0");
  CHECK(step(prog, Process::inact()).empty());
}

TEST_CASE("asynchronous send enqueues into a non-full buffer") {
  Program prog = parse_ok("def in 0");
  ProcPtr s =
      Process::par(Process::prefixed(Prefix::send("c", Expr::lit_int(1)), Process::inact()),
                   Process::buffer("c", Sort::Int, 1, {}, false));
  auto succs = step(prog, s);
  REQUIRE(succs.size() == 1);
  CHECK(serial(succs[0].second).find("buf(c:int,1,open,[1,])") != std::string::npos);
}

TEST_CASE("barbs of selects") {
  Program prog = parse_ok("def in 0");
  // P2 = select { a!<v> [] b?(x); 0 }  has the multi-barb {a!, b}
  ProcPtr p2 = Process::select({{Prefix::send("a", Expr::lit_int(0)), Process::inact()},
                                {Prefix::recv("b", "x"), Process::inact()}});
  BarbSet b2 = barbs(prog, p2);
  CHECK(b2.multis.size() == 1);
  CHECK(b2.singles.empty()); // a select alone exhibits no single barbs
  std::vector<Barb> expected{{Barb::Kind::Output, "a"}, {Barb::Kind::Input, "b"}};
  CHECK(b2.multis.count(expected) == 1);

  // P1 adds a tau branch: no input/output barb at all
  ProcPtr p1 = Process::select({{Prefix::send("a", Expr::lit_int(0)), Process::inact()},
                                {Prefix::recv("b", "x"), Process::inact()},
                                {Prefix::tau(), Process::inact()}});
  BarbSet b1 = barbs(prog, p1);
  CHECK(b1.multis.empty());
  CHECK(b1.singles.empty());

  // P2 | a?(y);0 has the sync barb [a]
  ProcPtr r1 = Process::prefixed(Prefix::recv("a", "y"), Process::inact());
  BarbSet b3 = barbs(prog, Process::par(p2, r1));
  CHECK(b3.has_sync("a"));
}

TEST_CASE("explore: Fib<3> terminates and every leaf is the inactive state") {
  Program prog = parse_ok(kFib3);
  StateGraph g = explore(prog, 64);
  CHECK(g.complete());
  CHECK(!g.budget_exceeded);
  int leaves = 0;
  for (const auto& n : g.nodes) {
    if (n.edges.empty()) {
      ++leaves;
      CHECK(is_terminated(n.state));
    }
  }
  CHECK(leaves >= 1);
}

TEST_CASE("explore: inaction gives a single-node graph") {
  Program prog = parse_ok("def in 0");
  StateGraph g = explore(prog, 8);
  CHECK(g.nodes.size() == 1);
  CHECK(g.complete());
}

TEST_CASE("explore: the sieve at depth 5 leaves a frontier") {
  Program prog = parse_ok(kSieve);
  StateGraph g = explore(prog, 5);
  CHECK(!g.complete());
  bool any_frontier = false;
  for (const auto& n : g.nodes) any_frontier |= n.frontier;
  CHECK(any_frontier);
}

TEST_CASE("oracle liveness: Fib<3> is live up to depth") {
  Program prog = parse_ok(kFib3);
  OracleVerdict v = oracle_liveness(prog, 64);
  CHECK(v.kind == OracleKind::OkUpToDepth);
  CHECK(v.explored_completely);
}

TEST_CASE("oracle liveness: Fib_bad<3> cannot be concluded by the bounded oracle") {
  Program prog = parse_ok(kFibBad3);
  OracleVerdict v = oracle_liveness(prog, 8);
  CHECK(v.kind == OracleKind::Inconclusive);
  CHECK(!v.explored_completely);
}

TEST_CASE("oracle liveness: inaction is vacuously live") {
  Program prog = parse_ok("def in 0");
  OracleVerdict v = oracle_liveness(prog, 8);
  CHECK(v.kind == OracleKind::OkUpToDepth);
}

TEST_CASE("oracle safety: double close is a violation") {
  Program prog = parse_ok("def in new a:int; close a; close a; 0");
  StateGraph g = explore(prog, 16);
  CHECK(g.nodes.size() == 3);
  OracleVerdict v = oracle_safety(prog, g);
  CHECK(v.kind == OracleKind::Violation);
  CHECK(v.detail.find("closed twice") != std::string::npos);
  CHECK(!v.witness.empty());
}

TEST_CASE("oracle safety: no close means no violation") {
  Program prog = parse_ok("def in new a:int; (a!<1>; 0 | a?(x); 0)");
  OracleVerdict v = oracle_safety(prog, 16);
  CHECK(v.kind == OracleKind::OkUpToDepth);
  CHECK(v.explored_completely);
}

TEST_CASE("oracle safety: send on a closed channel is a violation") {
  Program prog = parse_ok("def in new a:int; close a; a!<1>; 0");
  OracleVerdict v = oracle_safety(prog, 16);
  CHECK(v.kind == OracleKind::Violation);
  CHECK(v.detail.find("send on closed") != std::string::npos);
}

TEST_CASE("star transform") {
  Program sieve = parse_ok(kSieve);
  std::vector<int> marks = collect_marks(sieve);
  REQUIRE(marks.size() == 1);

  SUBCASE("selected mark becomes a star conditional") {
    Program starred = star_transform(sieve, {marks[0]});
    bool saw_star = false;
    std::function<void(const ProcPtr&)> scan = [&](const ProcPtr& p) {
      if (!p) return;
      if (p->kind == Process::Kind::Cond && !p->guard) saw_star = true;
      if (p->cont) scan(p->cont);
      if (p->then_branch) scan(p->then_branch);
      if (p->else_branch) scan(p->else_branch);
      if (p->left) scan(p->left);
      if (p->right) scan(p->right);
      for (const auto& [pi, b] : p->branches) scan(b);
    };
    scan(starred.defs.at("F").body);
    CHECK(saw_star);
  }

  SUBCASE("empty mark set is the identity") {
    Program starred = star_transform(sieve, {});
    CHECK(proc_equal(starred.defs.at("F").body, sieve.defs.at("F").body));
    CHECK(proc_equal(starred.main, sieve.main));
  }

  SUBCASE("marks not in the program are rejected") {
    Program noconds = parse_ok("def in 0");
    CHECK_THROWS_AS(star_transform(noconds, {0}), std::invalid_argument);
  }
}

TEST_CASE("classify: cond-recur's exit conditional is not infinite") {
  Program prog = parse_ok(kCondRecur);
  ConditionalReport rep = classify_conditionals(prog, 64);
  CHECK(rep.explored_completely);
  REQUIRE(rep.marks.size() == 1);
  CHECK(rep.marks[0].status == MarkStatus::FinitelyObserved);
  CHECK(rep.may_converge_evidence);
  CHECK(!rep.inf_evidence);
}

TEST_CASE("classify: the sieve filter conditional is infinite-suspect") {
  Program prog = parse_ok(kSieve);
  ConditionalReport rep = classify_conditionals(prog, 12);
  CHECK(!rep.explored_completely);
  REQUIRE(rep.marks.size() == 1);
  CHECK(rep.marks[0].status == MarkStatus::InfiniteSuspect);
  CHECK(rep.inf_evidence);
}

TEST_CASE("classify: a straight-line conditional is finitely observed") {
  Program prog = parse_ok("def in new c:int; if true then 0 else 0");
  ConditionalReport rep = classify_conditionals(prog, 16);
  REQUIRE(rep.marks.size() == 1);
  CHECK(rep.marks[0].status == MarkStatus::FinitelyObserved);
}

TEST_CASE("congruence closure: equal states have equal successor sets") {
  Program prog = parse_ok(kFib3);
  StateGraph g = explore(prog, 6);
  std::mt19937 rng(11);
  int checked = 0;
  for (const auto& node : g.nodes) {
    if (checked >= 20) break;
    const ProcPtr& s = node.state;
    // congruence rewrites: dead restriction, unit 0, alpha-rename
    ProcPtr t = Process::restrict("zzz", Process::par(s, Process::inact()));
    if (s->kind == Process::Kind::Restrict) {
      Name fresh = "w" + std::to_string(rng() % 100);
      t = Process::restrict(
          "zzz", Process::par(Process::restrict(fresh, subst(s->cont, {}, {{s->chan, fresh}})),
                              Process::inact()));
    }
    CHECK(canon_successors(prog, s) == canon_successors(prog, t));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("buffer discipline and sclose totality along exploration") {
  for (const char* text :
       {kFib3, kCondRecur,
        "def in new a:int,2; (a!<1>; a!<2>; close a; 0 | a?(x); a?(y); a?(z); 0)"}) {
    Program prog = parse_ok(text);
    StateGraph g = explore(prog, 32);
    for (const auto& node : g.nodes) {
      std::function<void(const ProcPtr&)> scan = [&](const ProcPtr& p) {
        if (!p) return;
        if (p->kind == Process::Kind::Buffer)
          CHECK(static_cast<int>(p->queue.size()) <= p->capacity);
        if (p->cont) scan(p->cont);
        if (p->left) scan(p->left);
        if (p->right) scan(p->right);
      };
      scan(node.state);
      // sclose totality: exposed receive on a closed buffer implies a step
      BarbSet bs = node.barb_set;
      for (const auto& b : bs.singles) {
        if (b.kind != Barb::Kind::ClosedChan) continue;
        if (bs.has({Barb::Kind::Input, b.chan})) CHECK(!step(prog, node.state).empty());
      }
    }
  }
}

TEST_CASE("sync barb implies reducibility on program states") {
  Program prog = parse_ok(kCondRecur);
  StateGraph g = explore(prog, 40);
  for (const auto& node : g.nodes) {
    bool has_sync = false;
    for (const auto& b : node.barb_set.singles) has_sync |= b.kind == Barb::Kind::Sync;
    if (has_sync) CHECK(!step(prog, node.state).empty());
  }
}

TEST_CASE("star simulation: program steps embed into the starred program") {
  Program prog = parse_ok(kCondRecur);
  std::vector<int> all_marks = collect_marks(prog);
  std::set<int> marks(all_marks.begin(), all_marks.end());
  StateGraph g = explore(prog, 24);
  int checked = 0;
  for (const auto& node : g.nodes) {
    ProcPtr starred = star_process(node.state, marks);
    std::set<std::string> star_succ;
    for (const auto& [l, t] : step(prog, starred)) star_succ.insert(serial(canon_process(t)));
    for (const auto& e : node.edges) {
      ProcPtr image = star_process(g.nodes[e.target].state, marks);
      CHECK(star_succ.count(serial(canon_process(image))) == 1);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("random run is reproducible for a fixed seed") {
  Program prog = parse_ok(kFib3);
  auto t1 = run_random(prog, 40, 42);
  auto t2 = run_random(prog, 40, 42);
  REQUIRE(t1.size() == t2.size());
  for (size_t i = 0; i < t1.size(); ++i) CHECK(t1[i].state == t2[i].state);
}

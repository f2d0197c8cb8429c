#include <doctest.h>

#include "migo/explore.hpp"
#include "migo/infer.hpp"
#include "migo/interp.hpp"
#include "migo/parser.hpp"
#include "migo/pretty.hpp"
#include "migo/typesem.hpp"

using namespace migo;

namespace {

const char* kSieve = R"(
def G(n:int, c:chan int) = c!<n>; G<n+1, c>;
    F(n:int, i:chan int, o:chan int) =
      i?(x); if x % n != 0 then o!<x>; F<n, i, o> else F<n, i, o>;
    R(c:chan int) = c?(x); new c1:int; (F<x, c, c1> | R<c1>)
in new c:int; (G<2, c> | R<c>)
)";

const char* kFib = R"(
def Fib(n:int, c:chan int) =
      if n <= 1 then c!<n>; 0
      else new b:int; (Fib<n-1, b> | Fib<n-2, b> | b?(x); b?(y); c!<x+y>; 0)
in new c:int; (Fib<10, c> | c?(u); 0)
)";

const char* kPingPong = R"(
def P(x:chan int, y:chan int) = x!<1>; y?(z); 0 | y!<2>; x?(z); 0
in new x:int, 1; new y:int, 1; P<x, y>
)";

bool equiv(const TypePtr& a, const TypePtr& b) {
  return type_equal(canonicalize(a), canonicalize(b));
}

void check_same_system(const TypeSystem& got, const std::string& expected_text) {
  TypeSystem expected = parse_type_system(expected_text);
  REQUIRE(got.equations.size() == expected.equations.size());
  for (const auto& [name, eq] : expected.equations) {
    REQUIRE_MESSAGE(got.equations.count(name) == 1, "missing equation ", name);
    const TypeEquation& g = got.equations.at(name);
    CHECK(g.params == eq.params);
    CHECK_MESSAGE(equiv(g.body, eq.body), "equation ", name, ": got ", pretty(g.body),
                  " expected ", pretty(eq.body));
  }
}

} // namespace

TEST_CASE("infer: the sieve program gives the overview equations") {
  TypeSystem sys = infer(parse_program(kSieve));
  check_same_system(sys, R"(
t_G(c) = send c; t_G<c>;
t_F(i,o) = recv i; oplus { send o; t_F<i,o>, t_F<i,o> };
t_R(c) = recv c; newchan c1; (t_F<c,c1> | t_R<c1>);
t0() = newchan c; (t_G<c> | t_R<c>)
)");
}

TEST_CASE("infer: the Fibonacci program") {
  TypeSystem sys = infer(parse_program(kFib));
  check_same_system(sys, R"(
t_Fib(c) = oplus { send c; 0, newchan b; (t_Fib<b> | t_Fib<b> | recv b; recv b; send c; 0) };
t0() = newchan c; (t_Fib<c> | recv c; 0)
)");
}

TEST_CASE("infer: empty program") {
  TypeSystem sys = infer(parse_program("def in 0"));
  REQUIRE(sys.equations.size() == 1);
  CHECK(sys.equations.at("t0").body->kind == TypeTerm::Kind::Inact);
}

TEST_CASE("infer: asynchronous ping-pong carries buffer bounds") {
  TypeSystem sys = infer(parse_program(kPingPong));
  check_same_system(sys, R"(
t_P(x,y) = (send x; recv y; 0 | send y; recv x; 0);
t0() = newchan x, 1; newchan y, 1; t_P<x, y>
)");
  const TypePtr& t0 = sys.equations.at("t0").body;
  REQUIRE(t0->kind == TypeTerm::Kind::NewChan);
  CHECK(t0->capacity == 1);
  CHECK(t0->cont->capacity == 1);
}

TEST_CASE("infer: sort errors") {
  CHECK_THROWS_AS(infer(parse_program("def in new a:bool; a!<1>; 0")), TypeError);
  CHECK_THROWS_AS(infer(parse_program("def in new a:int; if 1 + 2 then 0 else 0")), TypeError);
}

TEST_CASE("infer is deterministic") {
  TypeSystem a = infer(parse_program(kSieve));
  TypeSystem b = infer(parse_program(kSieve));
  CHECK(pretty(a) == pretty(b));
}

TEST_CASE("infer_runtime: restriction plus buffer") {
  Program prog = parse_program(kSieve);
  // (nu c)(G<2,c> | [empty]_c): rules res + parr + buff
  ProcPtr state = Process::restrict(
      "c", Process::par(Process::call("G", {Expr::lit_int(2)}, {"c"}),
                        Process::buffer("c", Sort::Int, 0, {}, false)));
  RuntimeTyping rt = infer_runtime(prog, state);
  CHECK(rt.buffers.empty()); // c is bound by the restriction
  REQUIRE(rt.type->kind == TypeTerm::Kind::Restrict);
  CHECK(serial(rt.type).find("buf(c:0/0)") != std::string::npos);
  CHECK(serial(rt.type).find("call:t_G<c,>") != std::string::npos);
}

TEST_CASE("infer_runtime: closed buffer alone") {
  Program prog = parse_program("def in 0");
  RuntimeTyping rt = infer_runtime(prog, Process::buffer("c", Sort::Int, 0, {}, true));
  CHECK(rt.buffers == std::set<Name>{"c"});
  CHECK(rt.type->kind == TypeTerm::Kind::Buffer);
  CHECK(rt.type->closed);
}

TEST_CASE("infer_runtime: duplicate buffers violate the parallel side condition") {
  Program prog = parse_program("def in 0");
  ProcPtr state = Process::par(Process::buffer("c", Sort::Int, 0, {}, false),
                               Process::buffer("c", Sort::Int, 0, {}, false));
  CHECK_THROWS_AS(infer_runtime(prog, state), TypeError);
}

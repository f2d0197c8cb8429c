#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "migo/parser.hpp"
#include "migo/pretty.hpp"
#include "migo/validate.hpp"

using namespace migo;

namespace {

const char* kSieve = R"(
def G(n:int, c:chan int) = c!<n>; G<n+1, c>;
    F(n:int, i:chan int, o:chan int) =
      i?(x); if x % n != 0 then o!<x>; F<n, i, o> else F<n, i, o>;
    R(c:chan int) = c?(x); new c1:int; (F<x, c, c1> | R<c1>)
in new c:int; (G<2, c> | R<c>)
)";

const char* kFibTypes = R"(
fib(x) = oplus { send x, newchan b; (fib<b> | recv b; recv b; send x | fib<b>) };
t0() = newchan a; (fib<a> | recv a)
)";

} // namespace

TEST_CASE("sieve program parses to the expected shape") {
  Program p = parse_program(kSieve);
  CHECK(p.defs.size() == 3);
  CHECK(p.defs.count("G") == 1);
  CHECK(p.defs.count("F") == 1);
  CHECK(p.defs.count("R") == 1);
  CHECK(p.defs.at("G").value_params.size() == 1);
  CHECK(p.defs.at("G").chan_params.size() == 1);
  CHECK(p.defs.at("F").chan_params.size() == 2);
  // main is new c; (G<2,c> | R<c>)
  REQUIRE(p.main->kind == Process::Kind::NewChan);
  const ProcPtr& body = p.main->cont;
  REQUIRE(body->kind == Process::Kind::Par);
  CHECK(body->left->kind == Process::Kind::Call);
  CHECK(body->left->callee == "G");
  CHECK(body->left->val_args.size() == 1);
  CHECK(body->left->chan_args == std::vector<Name>{"c"});
  CHECK(body->right->callee == "R");
  CHECK(validate(p).empty());
}

TEST_CASE("empty program") {
  Program p = parse_program("def in 0");
  CHECK(p.defs.empty());
  CHECK(p.main->kind == Process::Kind::Inact);
  CHECK(validate(p).empty());
}

TEST_CASE("call arity mismatch is a parse error") {
  const char* text = R"(
def G(n:int, c:chan int) = c!<n>; 0
in G<2>
)";
  CHECK_THROWS_AS(parse_program(text), ParseError);
}

TEST_CASE("unbound variable is a parse error") {
  CHECK_THROWS_AS(parse_program("def in new c:int; c!<x>; 0"), ParseError);
}

TEST_CASE("syntax error carries a position") {
  try {
    parse_program("def in new c:int c!<1>; 0");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line >= 1);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }
}

TEST_CASE("validate flags a free channel name in a definition") {
  // built by hand: parse would reject the unbound call, so inject directly
  Program p = parse_program("def X(c:chan int) = c!<1>; 0 in 0");
  Definition d = p.defs.at("X");
  d.body = Process::prefixed(Prefix::send("d", Expr::lit_int(1)), Process::inact());
  p.defs["X"] = d;
  auto diags = validate(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("free channel name 'd'") != std::string::npos);
}

TEST_CASE("validate flags runtime constructors in source") {
  Program p = parse_program("def in 0");
  p.main = Process::buffer("c", Sort::Int, 0, {}, false);
  auto diags = validate(p);
  REQUIRE(!diags.empty());
  bool found = false;
  for (const auto& d : diags)
    if (d.message.find("runtime-only") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("conditionals are marked left to right from 0") {
  const char* text = R"(
def A(n:int, c:chan int) = if n < 1 then c!<1>; 0 else 0
in new c:int; (A<1, c> | if true then 0 else 0)
)";
  Program p = parse_program(text);
  std::vector<int> marks = collect_marks(p);
  std::sort(marks.begin(), marks.end());
  CHECK(marks == std::vector<int>{0, 1});
}

TEST_CASE("type system: sieve types of the overview") {
  const char* text = R"(
g(x) = send x; g<x>;
f(x,y) = recv x; oplus { send y; f<x,y>, f<x,y> };
r(x) = recv x; newchan b; (f<x,b> | r<b>);
t0() = newchan a; (g<a> | r<a>)
)";
  TypeSystem sys = parse_type_system(text);
  CHECK(sys.equations.size() == 4);
  CHECK(sys.equations.count("t0") == 1);
  CHECK(sys.equations.at("f").params == std::vector<Name>{"x", "y"});
  const TypePtr& rbody = sys.equations.at("r").body;
  REQUIRE(rbody->kind == TypeTerm::Kind::Prefix);
  CHECK(rbody->action.kind == TAction::Kind::Recv);
  CHECK(rbody->cont->kind == TypeTerm::Kind::NewChan);
}

TEST_CASE("type system without t0 is rejected") {
  CHECK_THROWS_WITH_AS(parse_type_system("g(x) = send x; g<x>"),
                       doctest::Contains("missing entry equation"), ParseError);
}

TEST_CASE("round-trip: Fibonacci types") {
  TypeSystem sys = parse_type_system(kFibTypes);
  TypeSystem again = parse_type_system(pretty(sys));
  REQUIRE(again.equations.size() == sys.equations.size());
  for (const auto& [name, eq] : sys.equations) {
    REQUIRE(again.equations.count(name) == 1);
    CHECK(again.equations.at(name).params == eq.params);
    CHECK(type_equal(again.equations.at(name).body, eq.body));
  }
}

TEST_CASE("round-trip: sieve program") {
  Program p = parse_program(kSieve);
  Program again = parse_program(pretty(p));
  CHECK(proc_equal(again.main, p.main));
  for (const auto& [name, def] : p.defs) CHECK(proc_equal(again.defs.at(name).body, def.body));
}

TEST_CASE("free names of processes") {
  Program p = parse_program("def in 0");
  ProcPtr send_a = Process::prefixed(Prefix::send("a", Expr::lit_int(1)), Process::inact());
  CHECK(free_names(send_a) == std::set<Name>{"a"});

  ProcPtr recv_b = Process::prefixed(Prefix::recv("b", "x"), Process::inact());
  ProcPtr under = Process::restrict("a", Process::par(send_a, recv_b));
  CHECK(free_names(under) == std::set<Name>{"b"});
  (void)p;
}

TEST_CASE("free names of the overview r equation body") {
  TypeSystem sys = parse_type_system(R"(
r(x) = recv x; newchan b; (f<x,b> | r<b>);
f(x,y) = recv x; oplus { send y; f<x,y>, f<x,y> };
t0() = 0
)");
  CHECK(free_names(sys.equations.at("r").body) == std::set<Name>{"x"});
}

TEST_CASE("free_names is invariant under alpha-renaming of bound names") {
  std::mt19937 rng(7);
  TypeSystem sys = parse_type_system(kFibTypes);
  for (const auto& [name, eq] : sys.equations) {
    // rename the newchan binder; free names must not change
    TypePtr body = eq.body;
    std::set<Name> before = free_names(body);
    std::function<TypePtr(const TypePtr&)> rename = [&](const TypePtr& t) -> TypePtr {
      if (!t) return t;
      if (t->kind == TypeTerm::Kind::NewChan) {
        Name fresh = "zz" + std::to_string(rng() % 1000);
        return TypeTerm::newchan(fresh, t->capacity, subst_type(t->cont, {{t->chan, fresh}}));
      }
      if (t->kind == TypeTerm::Kind::Prefix) return TypeTerm::prefix(t->action, rename(t->cont));
      if (t->kind == TypeTerm::Kind::Choice) {
        std::vector<TypePtr> cs;
        for (const auto& c : t->choices) cs.push_back(rename(c));
        return TypeTerm::choice(cs);
      }
      return t;
    };
    CHECK(free_names(rename(body)) == before);
  }
}

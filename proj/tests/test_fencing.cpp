#include <doctest.h>

#include <random>

#include "migo/fencing.hpp"
#include "migo/parser.hpp"
#include "migo/pretty.hpp"

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

const char* kFibTypes = R"(
fib(x) = oplus { send x; 0, newchan b; (fib<b> | recv b; recv b; send x; 0 | fib<b>) };
t0() = newchan a; (fib<a> | recv a; 0)
)";

std::vector<Name> names(std::initializer_list<const char*> xs) {
  std::vector<Name> out;
  for (const char* x : xs) out.emplace_back(x);
  return out;
}

} // namespace

TEST_CASE("prec examples") {
  CHECK(prec(names({"y", "z", "a"}), names({"x", "y", "z"})));
  CHECK(!prec(names({"x", "a", "z"}), names({"x", "y", "z"})));
  CHECK(!prec(names({"x"}), names({"x"})));
  // length mismatch and empty sequences never relate
  CHECK(!prec(names({"a"}), names({"x", "y"})));
  CHECK(!prec({}, {}));
  CHECK(!prec({}, names({"x"})));
  // forgetting both parameters at once
  CHECK(prec(names({"a", "b"}), names({"x", "y"})));
}

TEST_CASE("check_equation on the sieve") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  CHECK(check_equation("g", sys).ok);
  CHECK(check_equation("f", sys).ok);
  CHECK(check_equation("r", sys).ok); // r<b> is fenced since b < x
}

TEST_CASE("check_equation rejects the reader/writer spawner") {
  TypeSystem sys = parse_type_system(kReaderWriter);
  FenceResult r = check_equation("t1", sys);
  CHECK(!r.ok);
  REQUIRE(r.failure.has_value());
  CHECK(r.failure->equation == "t1");
  CHECK(r.failure->call_args == names({"x"}));
  CHECK(r.failure->z_env == names({"x"}));
  CHECK(!r.failure->judgement_path.empty());
  // w and r themselves are single-threaded and pass
  CHECK(check_equation("w", sys).ok);
  CHECK(check_equation("r", sys).ok);
}

TEST_CASE("check_equation on Fibonacci") {
  TypeSystem sys = parse_type_system(kFibTypes);
  CHECK(check_equation("fib", sys).ok); // b < x
}

TEST_CASE("is_fenced verdicts") {
  CHECK(is_fenced(parse_type_system(kSieveTypes)).fenced);
  CHECK(is_fenced(parse_type_system(kFibTypes)).fenced);
  FenceVerdict v = is_fenced(parse_type_system(kReaderWriter));
  CHECK(!v.fenced);
  CHECK(v.failing_equation == "t1");
  // parameterless equations pass vacuously
  CHECK(is_fenced(parse_type_system("t0() = newchan a; (send a; t0<> | recv a; 0)")).fenced);
}

TEST_CASE("ty_size") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  CHECK(ty_size(TypeTerm::inact(), sys) == 0);
  // size of g's body (send x; g<x>) = 2
  CHECK(ty_size(sys.equations.at("g").body, sys) == 2);
  CHECK(ty_size(TypeTerm::prefix(TAction::tau(), TypeTerm::inact()), sys) == 1);
}

TEST_CASE("limited unfolding") {
  TypeSystem sys = parse_type_system(kSieveTypes);
  TypePtr call_r = TypeTerm::call("r", {"a"});

  SUBCASE("k = 0 is the identity") {
    CHECK(type_equal(limited_unfold(0, {"a"}, call_r, sys), call_r));
    TypePtr gbody = sys.equations.at("g").body;
    CHECK(type_equal(limited_unfold(0, {"x"}, gbody, sys), gbody));
  }

  SUBCASE("one unfolding of r<a> with respect to {a}") {
    TypePtr u = limited_unfold(1, {"a"}, call_r, sys);
    // recv a; newchan b; (f-unfolding | r<b>) with r<b> left folded
    // (f<a,b> meets {a}, so its budget of one is spent too)
    TypePtr expected = parse_type_system(R"(
t0() = recv a; newchan b; (recv a; oplus { send b; f<a,b>, f<a,b> } | r<b>);
f(x,y) = 0; r(x) = 0
)").equations.at("t0").body;
    CHECK_MESSAGE(type_equal(u, expected), "got ", pretty(u));
    // the recursive call r<b> stays folded: b is not in {a}
    CHECK(serial(u).find("call:r<b,>") != std::string::npos);
  }

  SUBCASE("disjoint name set leaves the call folded") {
    CHECK(type_equal(limited_unfold(1, {}, call_r, sys), call_r));
    CHECK(type_equal(limited_unfold(1, {"z"}, call_r, sys), call_r));
  }
}

TEST_CASE("occurrences") {
  TypePtr call = TypeTerm::call("t", {"a"});
  CHECK(occurrences(call, "t") == 1);
  // max across choices: oplus { t<a>, t<a> | t<a> } counts 2
  TypePtr both = TypeTerm::choice({call, TypeTerm::par(call, call)});
  CHECK(occurrences(both, "t") == 2);
  CHECK(occurrences(TypeTerm::inact(), "t") == 0);
  CHECK(occurrences(TypeTerm::call("s", {"a"}), "t") == 0);
}

TEST_CASE("occurrence bound: occ(unfold_k(T)) <= size(T)^|params|") {
  for (const char* text : {kSieveTypes, kFibTypes}) {
    TypeSystem sys = parse_type_system(text);
    REQUIRE(is_fenced(sys).fenced);
    for (const auto& [name, eq] : sys.equations) {
      std::set<Name> params(eq.params.begin(), eq.params.end());
      long long size = ty_size(eq.body, sys);
      long long bound = 1;
      for (size_t i = 0; i < eq.params.size(); ++i) bound *= size;
      for (int k = 0; k <= 3; ++k) {
        TypePtr unfolded = limited_unfold(k, params, eq.body, sys);
        CHECK_MESSAGE(occurrences(unfolded, name) <= bound, "equation ", name, " at k=", k);
      }
    }
  }
}

TEST_CASE("chain property: prec chains leave the start names within |x| steps") {
  // random chains a1 > a2 > ... built by the shape of the relation:
  // each step keeps a suffix and appends fresh names
  std::mt19937 rng(2026);
  for (int iter = 0; iter < 200; ++iter) {
    int n = 1 + static_cast<int>(rng() % 5);
    std::vector<Name> current;
    for (int i = 0; i < n; ++i) current.push_back("x" + std::to_string(i));
    std::vector<Name> start = current;
    int fresh = 0;
    for (int stepi = 1; stepi <= n + 1; ++stepi) {
      int drop = 1 + static_cast<int>(rng() % current.size());
      std::vector<Name> next(current.begin() + drop, current.end());
      for (int j = 0; j < drop; ++j) next.push_back("f" + std::to_string(fresh++));
      REQUIRE(prec(next, current));
      current = next;
      if (stepi >= n) {
        // after |x| steps the chain is disjoint from the start names
        for (const auto& a : current)
          CHECK(std::find(start.begin(), start.end(), a) == start.end());
      }
    }
  }
}

TEST_CASE("check_equation terminates on mutually recursive systems") {
  TypeSystem sys = parse_type_system(R"(
p(x,y) = newchan b; (q<y, b> | p<y, b>);
q(x,y) = send x; p<x, y>;
t0() = newchan a; newchan c; p<a, c>
)");
  FenceResult r = check_equation("p", sys);
  CHECK(r.ok); // (y,b) < (x,y) by dropping one name
}

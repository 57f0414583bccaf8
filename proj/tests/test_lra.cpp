#include <doctest.h>

#include <algorithm>
#include <random>

#include "deftop/error.hpp"
#include "deftop/lra.hpp"
#include "lra_oracle.hpp"

using namespace deftop;
using testing::exists_oracle;
using Gen = testing::FormulaGen;

namespace {

LinTerm V(const char* n) { return LinTerm::var(n); }

Rational q(const char* s) { return parse_rational(s); }

}  // namespace

TEST_CASE("interval nonemptiness") {
  auto f = LinFormula::conj({gt(V("x"), V("a")), lt(V("x"), V("b"))});
  auto g = eliminate_exists("x", f);
  CHECK(!g.free_vars().count("x"));
  CHECK(g.eval({{"a", 0}, {"b", 1}}));
  CHECK(!g.eval({{"a", 1}, {"b", 1}}));
  CHECK(!g.eval({{"a", 2}, {"b", 1}}));
}

TEST_CASE("substitution case") {
  auto f = eq(V("x"), V("a")) && le(V("x"), V("b"));
  auto g = eliminate_exists("x", f);
  CHECK(g.eval({{"a", 1}, {"b", 1}}));
  CHECK(!g.eval({{"a", 2}, {"b", 1}}));
}

TEST_CASE("three-bound projection agrees with the oracle on 100 triples") {
  auto f = LinFormula::conj({gt(V("x") * 2, V("a")), lt(V("x") * 3, V("b")), ge(V("x"), V("c"))});
  auto g = eliminate_exists("x", f);
  CHECK(g.is_quantifier_free());
  CHECK(!g.free_vars().count("x"));
  Gen gen(42);
  for (int i = 0; i < 100; ++i) {
    Assignment env{{"a", gen.small_rational()}, {"b", gen.small_rational()}, {"c", gen.small_rational()}};
    REQUIRE(g.eval(env) == exists_oracle(f, "x", env));
  }
}

TEST_CASE("elimination soundness on 500 random formulas") {
  Gen gen(2024);
  std::vector<std::string> vars{"x", "a", "b", "c"};
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> use(vars.begin(), vars.begin() + gen.uniform(1, 4));
    if (use.size() == 1 && gen.uniform(0, 1)) use.push_back("a");
    auto f = gen.qf(use, 8);
    auto g = eliminate_exists("x", f);
    REQUIRE(!g.free_vars().count("x"));
    for (int k = 0; k < 20; ++k) {
      Assignment env;
      for (const auto& v : use)
        if (v != "x") env[v] = gen.small_rational();
      INFO(f.str());
      REQUIRE(g.eval(env) == exists_oracle(f, "x", env));
    }
  }
}

TEST_CASE("decide_sentence examples") {
  auto a = V("a"), e = V("eps");
  auto f = LinFormula::forall(
      "a", LinFormula::exists("eps", (gt(e, 0) && lt(e, a)) || le(a, 0)));
  CHECK(decide_sentence(f));
  CHECK(!decide_sentence(LinFormula::exists("x", lt(V("x"), 0) && gt(V("x"), 1))));
  CHECK_THROWS_AS(decide_sentence(lt(V("x"), 0)), DomainError);
}

TEST_CASE("decide_sentence commutes with negation") {
  Gen gen(99);
  std::vector<std::string> vars{"x", "y", "z"};
  for (int i = 0; i < 150; ++i) {
    auto f = gen.qf(vars, 6);
    for (const auto& v : vars)
      f = gen.uniform(0, 1) ? LinFormula::exists(v, f) : LinFormula::forall(v, f);
    REQUIRE(decide_sentence(!f) == !decide_sentence(f));
  }
}

TEST_CASE("inner quantifier blocks agree with explicit nesting") {
  Gen gen(5);
  for (int i = 0; i < 100; ++i) {
    auto f = gen.qf({"x", "y", "a"}, 6);
    auto both = LinFormula::exists(std::vector<std::string>{"x", "y"}, f);
    auto set1 = solution_set_1d(both, "a");
    auto inner = eliminate_quantifiers(LinFormula::exists("y", f));
    auto set2 = solution_set_1d(LinFormula::exists("x", inner), "a");
    REQUIRE(set1 == set2);
  }
}

TEST_CASE("solution_set_1d examples") {
  auto x = V("x");
  auto f = (gt(x, 0) && lt(x, 1)) || eq(x, 3);
  CHECK(solution_set_1d(f, "x") == SemilinearSet::parse("(0,1) ∪ {3}"));
  auto g = LinFormula::exists("y", gt(V("y"), x) && lt(V("y"), x));
  CHECK(solution_set_1d(g, "x").empty());
  CHECK_THROWS_AS(solution_set_1d(lt(x, V("y")), "x"), DomainError);
  CHECK(solution_set_1d(in_set("x", SemilinearSet::parse("[0,1) ∪ {2}")), "x") ==
        SemilinearSet::parse("[0,1) ∪ {2}"));
}

TEST_CASE("solution_set_1d agrees with membership on a 1/128 grid") {
  Gen gen(77);
  for (int i = 0; i < 120; ++i) {
    bool quantified = i % 2 == 1;
    auto body = gen.qf(quantified ? std::vector<std::string>{"x", "y"} : std::vector<std::string>{"x"}, 6);
    auto f = quantified ? LinFormula::exists("y", body) : body;
    auto s = solution_set_1d(f, "x");
    for (int k = -8 * 128; k <= 8 * 128; k += 1) {
      Rational x = rat(k, 128);
      bool truth = quantified ? exists_oracle(body, "y", {{"x", x}}) : body.eval({{"x", x}});
      INFO(f.str(), " at ", to_string(x));
      REQUIRE(s.contains(x) == truth);
    }
  }
}

TEST_CASE("solution sets respect boolean structure") {
  Gen gen(8);
  auto box = SemilinearSet::closed(-20, 20);
  for (int i = 0; i < 60; ++i) {
    auto f = gen.qf({"x"}, 4), g = gen.qf({"x"}, 4);
    auto sf = solution_set_1d(f, "x") & box, sg = solution_set_1d(g, "x") & box;
    CHECK((solution_set_1d(f && g, "x") & box) == (sf & sg));
    CHECK((solution_set_1d(f || g, "x") & box) == (sf | sg));
    CHECK((solution_set_1d(!f, "x") & box) == (box - sf));
  }
}

TEST_CASE("s-expression form round-trips") {
  Gen gen(31);
  for (int i = 0; i < 100; ++i) {
    auto f = gen.qf({"x", "y", "a"}, 5);
    if (i % 3 == 0) f = LinFormula::forall("y", LinFormula::exists("x", f));
    auto text = f.str();
    CHECK(LinFormula::parse(text) == f);
    CHECK(LinFormula::parse(text).str() == text);
  }
  auto f = LinFormula::parse("(exists x (and (< (+ (* 2 x) (* -1 a))) (<= (+ x -1/2))))");
  CHECK(f.kind() == LinFormula::Kind::Exists);
  CHECK_THROWS_AS(LinFormula::parse("(and (< x)"), ParseError);
}

TEST_CASE("normal forms print and re-read") {
  auto f = eliminate_quantifiers(LinFormula::exists("x", gt(V("x") * 2, V("a")) && lt(V("x"), V("b"))));
  auto g = LinFormula::parse(f.str());
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) CHECK(f.eval({{"a", a}, {"b", b}}) == g.eval({{"a", a}, {"b", b}}));
}

TEST_CASE("rename respects binders") {
  auto f = LinFormula::exists("x", lt(V("x"), V("a")));
  auto g = f.rename({{"a", "b"}, {"x", "zz"}});
  CHECK(g.free_vars() == std::set<std::string>{"b"});
  CHECK_THROWS(f.rename({{"a", "x"}}));
  CHECK(q("1/2") == rat(1, 2));
}

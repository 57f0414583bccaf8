#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "deftop/error.hpp"
#include "deftop/oracle.hpp"
#include "mutations.hpp"
#include "support.hpp"

using namespace deftop;
using testing::fixture;
using testing::q;
using testing::S;

namespace {

TopologySpec parse_fixture(const std::string& name) {
  std::ifstream in(testing::fixture_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

ValidationReport check(const char* text) { return validate(parse_spec(text)); }

// Only the named check fails, and it comes with a witness inside X.
void only_failure(const ValidationReport& r, const std::string& name) {
  REQUIRE_FALSE(r.ok);
  REQUIRE(r.failure(name) != nullptr);
  for (const auto& f : r.failures) CHECK_MESSAGE(f.check == name, std::string(f.check + ": " + f.detail));
}

}  // namespace

TEST_CASE("the affine fixture parses to one cell with one piece") {
  TopologySpec s = parse_fixture("affine");
  REQUIRE(s.cells.size() == 1);
  CHECK(s.cells[0] == Cell::open(0, 1, "a"));
  REQUIRE(s.templates[0].pieces.size() == 1);
  const IntervalPiece& p = s.templates[0].pieces[0];
  CHECK(p == IntervalPiece::interval({1, -1, 0}, {1, 1, 0}, false, false));
  CHECK_FALSE(s.validated);
}

TEST_CASE("the nonregular fixture has three open cells and its three templates") {
  TopologySpec s = parse_fixture("nonregular");
  REQUIRE(s.cells.size() == 3);
  CHECK(s.cells[1] == Cell::open(1, 2, "b"));
  const auto& t0 = s.templates[0].pieces;
  REQUIRE(t0.size() == 3);
  CHECK(t0[0] == IntervalPiece::singleton({1, 0, 0}));
  CHECK(t0[1] == IntervalPiece::interval({1, 0, 1}, {1, 1, 1}, false, false));
  CHECK(t0[2] == IntervalPiece::interval({1, -1, 2}, {1, 0, 2}, false, false));
  CHECK(s.templates[1].pieces[0] == IntervalPiece::interval({1, -1, 0}, {1, 0, 0}, false, true));
  CHECK(s.templates[2].pieces[0] == IntervalPiece::interval({1, 0, 0}, {1, 1, 0}, true, false));
}

TEST_CASE("isolated cells bind their variable to the point") {
  TopologySpec s = parse_fixture("infty");
  REQUIRE(s.cells[1].is_point());
  for (const auto& p : s.templates[1].pieces) {
    CHECK(p.lo.coef_a == 0);
    CHECK(p.hi.coef_a == 0);
  }
  CHECK(s.templates[1].pieces[1] == IntervalPiece::interval({0, -1, 2}, {0, 1, 2}, false, false));
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_spec("space { (0,1) }\ntopology {\n  on interval(0,1) at a: { (a, };\n}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 32);
  }
  CHECK_THROWS_AS(parse_spec("space { (0,1) } topology { on (0,1) at a: { (b - eps, a) }; }"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec("space { (0,1) } topology { on (0,1) at a: { (a - eps, a + eps) }; "
                             "on (0,1) at a: { {a} }; }"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec("space { (1,0) } topology { on (1,0) at a: { {a} }; }"), ParseError);
  CHECK_THROWS_AS(parse_spec("space { (0,1) } topology { on (0,1) at a: { (a*eps, a) }; }"),
                  ParseError);
}

TEST_CASE("the optional interval and point keywords are accepted") {
  TopologySpec a = parse_spec("space { interval(0,1), point{2} } topology { on interval(0,1) at a: "
                              "{ (a - eps, a + eps) }; on point{2} at p: { {p} }; }");
  TopologySpec b = parse_spec("space { (0,1), {2} } topology { on (0,1) at a: { (a - eps, a + eps) }; "
                              "on {2} at p: { {p} }; }");
  CHECK(a.structurally_equal(b));
}

TEST_CASE("expressions allow rational scaling and reordering") {
  TopologySpec s = parse_spec(
      "space { (0,1) } topology { on (0,1) at a: { (-eps + a, 1/2*eps + a + 0), [a, a + 3/2*eps) }; }");
  const auto& p = s.templates[0].pieces;
  CHECK(p[0].lo == AffineExpr{1, -1, 0});
  CHECK(p[0].hi == AffineExpr{1, rat(1, 2), 0});
  CHECK(p[1].hi == AffineExpr{1, rat(3, 2), 0});
}

TEST_CASE("every fixture but the broken one validates") {
  for (std::string name :
       {"affine", "infty", "nonregular", "halfopen", "lex", "chain", "nonhaus", "two_intervals"}) {
    CAPTURE(name);
    ValidationReport r = validate(parse_fixture(name));
    CHECK(r.ok);
    REQUIRE(r.spec);
    CHECK(r.spec->validated);
    CHECK(r.spec->eps_domain.size() == r.spec->cells.size());
  }
}

TEST_CASE("a missing membership is reported with the witness a = 1/2, eps = 1/4") {
  ValidationReport r = validate(parse_fixture("broken_membership"));
  only_failure(r, "membership");
  const ValidationFailure* f = r.failure("membership");
  CHECK(f->witness.at("a") == q("1/2"));
  CHECK(f->witness.at("eps") == q("1/4"));
  CHECK_THROWS_AS(load_spec_file(testing::fixture_path("broken_membership")), DomainError);
}

TEST_CASE("mutations flip exactly the mutated check") {
  for (const auto& m : testing::mutations()) {
    CAPTURE(m.what);
    ValidationReport r = check(m.text.c_str());
    only_failure(r, m.check);
    if (m.witness) CHECK(r.failure(m.check)->witness.at(m.witness->first) == q(m.witness->second.c_str()));
  }
}

TEST_CASE("an unbounded space fails boundedness") {
  TopologySpec s = parse_spec("space { (0,1) } topology { on (0,1) at a: { (a - eps, a + eps) }; }");
  s.space = SemilinearSet::parse("(0,+inf)");
  ValidationReport r = validate(s);
  REQUIRE_FALSE(r.ok);
  CHECK(r.failure("boundedness") != nullptr);
}

TEST_CASE("basic sets at one point refine each other on the fixtures") {
  for (std::string name : {"affine", "infty", "nonregular", "lex", "chain"}) {
    TopologySpec s = fixture(name);
    for (const auto& c : s.cells) {
      Rational a = c.midpoint();
      std::size_t i = s.cell_of(a);
      std::vector<Rational> valid;
      for (unsigned k = 1; k <= 10; ++k)
        if (s.eps_domain[i].eval({{"a", a}, {"eps", pow2_neg(k)}})) valid.push_back(pow2_neg(k));
      REQUIRE_FALSE(valid.empty());
      for (std::size_t x = 0; x + 1 < valid.size(); ++x) {
        SemilinearSet big = s.neighborhood(a, valid[x]), small = s.neighborhood(a, valid[x + 1]);
        CHECK(small.is_subset_of(big));
        CHECK(small.contains(a));
        CHECK(small.is_subset_of(s.space));
      }
    }
  }
}

TEST_CASE("emit round-trips the fixtures") {
  for (std::string name : {"affine", "infty", "nonregular", "halfopen", "lex", "chain", "nonhaus"}) {
    CAPTURE(name);
    TopologySpec s = parse_fixture(name);
    CHECK(parse_spec(emit(s)).structurally_equal(s));
  }
}

TEST_CASE("emit round-trips 200 random specs") {
  std::mt19937_64 rng(11);
  RandomSpecOptions opts;
  opts.require_valid = false;
  for (int i = 0; i < 200; ++i) {
    TopologySpec s = parse_spec(random_spec_text(rng, opts));
    std::string text = emit(s);
    CAPTURE(text);
    CHECK(parse_spec(text).structurally_equal(s));
    CHECK(emit(parse_spec(text)) == text);
  }
}

TEST_CASE("later stages refuse specs that were not validated") {
  TopologySpec s = parse_fixture("affine");
  CHECK_THROWS_AS(require_validated(s), DomainError);
  CHECK_NOTHROW(require_validated(fixture("affine")));
}

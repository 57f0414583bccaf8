#include <doctest.h>

#include <algorithm>

#include "deftop/error.hpp"
#include "deftop/oracle.hpp"
#include "support.hpp"

using namespace deftop;
using testing::fixture;
using testing::q;
using testing::S;

namespace {

bool has(const std::vector<Rational>& xs, const Rational& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

TEST_CASE("the grid holds boundaries, isolated points and the uniform grid") {
  ShadowAnalysis sa(fixture("chain"));
  SampleGrid g = SampleGrid::build(sa, 4, 6);
  CHECK(g.schedule.size() == 6);
  CHECK(g.schedule.back() == rat(1, 64));
  CHECK(has(g.points, q("1/4")));
  CHECK(has(g.points, q("1/16")));
  CHECK_FALSE(has(g.points, q("0")));
  CHECK(std::is_sorted(g.points.begin(), g.points.end()));
  CHECK_THROWS_AS(SampleGrid::build(sa, 0, 6), DomainError);
}

TEST_CASE("closure of (0,1/8) in the figure eight marks the middle point") {
  ShadowAnalysis sa(fixture("infty"));
  SampleGrid g = SampleGrid::build(sa, 8, 12);
  ClosureComparison c = brute_closure(sa, S("(0,1/8)"), g);
  CHECK(c.discrepancies.empty());
  CHECK(has(c.adherent, q("2")));
  CHECK(has(c.adherent, q("1/8")));
  CHECK_FALSE(has(c.adherent, q("3")));
  CHECK(c.symbolic == S("(0,1/8] ∪ {2}"));
}

TEST_CASE("closures of random subsets of the lexicographic fixture agree") {
  ShadowAnalysis sa(fixture("lex"));
  SampleGrid g = SampleGrid::build(sa, 8, 12);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    SemilinearSet z = random_subset(sa.spec().space, rng);
    ClosureComparison c = brute_closure(sa, z, g);
    CAPTURE(z.str());
    CHECK(c.discrepancies.empty());
  }
}

TEST_CASE("sampled shadow limits") {
  std::vector<Rational> schedule;
  for (int k = 1; k <= 12; ++k) schedule.push_back(pow2_neg(k));
  ShadowComparison infty = brute_shadows(ShadowAnalysis(fixture("infty")), q("2"), schedule);
  CHECK(infty.sampled == S("{0, 2, 4}"));
  CHECK(infty.discrepancies.empty());

  ShadowComparison nr = brute_shadows(ShadowAnalysis(fixture("nonregular")), q("1/2"), schedule);
  CHECK(nr.sampled == S("{1/2, 3/2, 5/2}"));
  CHECK(nr.discrepancies.empty());

  ShadowComparison chain = brute_shadows(ShadowAnalysis(fixture("chain")), q("1/2"), schedule);
  CHECK(chain.sampled == S("{1/2, 3/4}"));

  CHECK_THROWS_AS(brute_shadows(ShadowAnalysis(fixture("affine")), q("1/2"), {rat(1, 2)}), DomainError);
}

TEST_CASE("grid components") {
  Decider infty(fixture("infty"));
  ComponentComparison c = brute_components(infty, SampleGrid::build(infty.shadows(), 8, 12));
  CHECK(c.groups.size() == 1);
  CHECK(c.symbolic_finite);
  CHECK(c.symbolic_count == 1);
  CHECK(c.discrepancies.empty());

  Decider half(fixture("halfopen"));
  SampleGrid hg = SampleGrid::build(half.shadows(), 8, 12);
  ComponentComparison h = brute_components(half, hg);
  CHECK(h.groups.size() == hg.points.size());
  for (const auto& grp : h.groups) CHECK(grp.size() == 1);
  CHECK_FALSE(h.symbolic_finite);

  Decider chain(fixture("chain"));
  ComponentComparison ch = brute_components(chain, SampleGrid::build(chain.shadows(), 8, 12));
  CHECK(ch.groups.size() == 4);
  CHECK(ch.discrepancies.empty());
}

TEST_CASE("the full oracle run finds nothing on the Hausdorff fixtures") {
  for (std::string name : {"affine", "infty", "nonregular", "halfopen", "lex", "chain", "two_intervals"}) {
    CAPTURE(name);
    Decider d(fixture(name));
    OracleReport r = run_oracle(d);
    for (const auto& x : r.discrepancies) FAIL_CHECK(x.check << " at " << x.location << ": " << x.symbolic << " vs " << x.sampled);
    CHECK(r.checks["closure"] > 0);
    CHECK(r.checks["shadows"] > 0);
    CHECK(r.checks.count("components") == (d.exceptional().E.finite() ? 1u : 0u));
  }
}

TEST_CASE("random specs validate and are reproducible") {
  std::mt19937_64 a(3), b(3);
  for (int i = 0; i < 10; ++i) {
    std::string ta = random_spec_text(a), tb = random_spec_text(b);
    CHECK(ta == tb);
    TopologySpec s = load_spec(ta);
    CHECK(s.cells.size() <= 4);
    CHECK(s.max_pieces() <= 3);
    CHECK(check_hausdorff(s).hausdorff);
  }
}

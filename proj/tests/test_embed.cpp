#include <doctest.h>

#include <set>

#include "deftop/embed.hpp"
#include "deftop/error.hpp"
#include "support.hpp"

using namespace deftop;
using testing::fixture;
using testing::q;
using testing::S;

namespace {

std::vector<Rational> grid(const SemilinearSet& x, long den) {
  std::vector<Rational> out;
  for (Rational t = x.min_coordinate(); t <= x.max_coordinate(); t += rat(1, den))
    if (x.contains(t)) out.push_back(t);
  return out;
}

void check_layout(const TopologySpec& spec, const Embedding& e) {
  const std::size_t k = e.curves.size();
  for (const auto& c : e.curves)
    for (std::size_t i = 0; i < e.anchors.size(); ++i)
      for (std::size_t j = 0; j < e.anchors.size(); ++j) {
        Rational gap = abs(e.anchors[i].at.x - e.anchors[j].at.x);
        CHECK(Rational(2 * static_cast<long>(k) * gap) < c.r - c.q);
      }
  for (std::size_t i = 0; i < e.anchors.size(); ++i) CHECK(e.attachments(i) <= 4);

  std::set<std::string> seen;
  for (const auto& x : grid(spec.space, 64)) {
    Point3 p = e.image(x);
    CHECK_MESSAGE(seen.insert(p.str()).second, "two points map to " << p.str());
    auto back = e.preimage(p);
    REQUIRE(back);
    CHECK(*back == x);
  }
  for (const auto& a : e.anchors) CHECK(e.preimage(a.at) == a.h);
  CHECK_FALSE(e.preimage({rat(-1), rat(-1), rat(-1)}));
}

}  // namespace

TEST_CASE("normalization of the figure eight isolates its middle point") {
  Decider d(fixture("infty"));
  NormalizedSpec n = normalize_isolate(d);
  CHECK(n.h == std::vector<Rational>{q("2")});
  REQUIRE(n.h_image.size() == 1);
  CHECK(n.h_image[0] > 4);
  CHECK(n.intervals == std::vector<std::pair<Rational, Rational>>{{0, 2}, {2, 4}});
  CHECK(n.spec.validated);
  CHECK(validate(n.spec).ok);
  CHECK(n.forward(q("2")) == n.h_image[0]);
  CHECK(n.forward(q("1")) == q("1"));
  CHECK(n.inverse(n.h_image[0]) == q("2"));
  ShadowAnalysis sa(n.spec);
  CHECK(sa.classify_point(n.h_image[0]) == PointClass::LocallyIsolated);
  CHECK(sa.shadows_at(n.h_image[0]) == std::vector<Rational>{q("0"), q("2"), q("4"), n.h_image[0]});
  CHECK(check_hausdorff(n.spec).hausdorff);
}

TEST_CASE("normalization of the chain splits at each exceptional point") {
  NormalizedSpec n = normalize_isolate(Decider(fixture("chain")));
  CHECK(n.h == std::vector<Rational>{q("1/4"), q("1/2"), q("3/4")});
  CHECK(n.intervals.size() == 4);
  CHECK(n.spec.space.components().size() == 4 + 3);
  CHECK(validate(n.spec).ok);
  CHECK_THROWS_AS(normalize_isolate(Decider(fixture("nonregular"))), DomainError);
}

TEST_CASE("the figure eight embeds as two loops on one anchor") {
  Decider d(fixture("infty"));
  EmbedResult r = embed(d);
  const Embedding& e = r.embedding;
  REQUIRE(e.anchors.size() == 1);
  CHECK(e.anchors[0].h == q("2"));
  REQUIRE(e.curves.size() == 2);
  CHECK(e.curves[0].loop());
  CHECK(e.curves[1].loop());
  CHECK(e.attachments(0) == 4);
  CHECK(r.certificate.ok);
  CHECK_FALSE(r.certificate.entries.empty());
  for (const auto& c : e.curves) CHECK(c.vertices.size() <= 5);
  check_layout(d.spec(), e);

  // points near either end of (0,2) or (2,4) approach the anchor
  Point3 near0 = e.image(pow2_neg(20)), near4 = e.image(4 - pow2_neg(20));
  CHECK(near0.y < pow2_neg(10));
  CHECK(near4.y < pow2_neg(10));
}

TEST_CASE("the chain glues one side per exceptional point") {
  Decider d(fixture("chain"));
  EmbedResult r = embed(d);
  const Embedding& e = r.embedding;
  REQUIRE(e.anchors.size() == 3);
  REQUIRE(e.curves.size() == 4);
  CHECK(e.curves[1].q == q("1/4"));
  CHECK(e.curves[1].right_anchor == std::optional<std::size_t>(0));
  CHECK_FALSE(e.curves[1].left_anchor);
  CHECK(e.curves[3].left_anchor == std::optional<std::size_t>(1));
  CHECK(e.attachments(2) == 0);
  CHECK_FALSE(e.curves[0].left_anchor);
  CHECK_FALSE(e.curves[0].right_anchor);
  CHECK(r.certificate.ok);
  check_layout(d.spec(), e);
}

TEST_CASE("spaces without exceptional points embed as free curves") {
  for (std::string name : {"affine", "two_intervals"}) {
    Decider d(fixture(name));
    EmbedResult r = embed(d);
    CHECK(r.embedding.anchors.empty());
    for (const auto& c : r.embedding.curves) {
      CHECK_FALSE(c.left_anchor);
      CHECK_FALSE(c.right_anchor);
    }
    CHECK(r.certificate.ok);
    check_layout(d.spec(), r.embedding);
  }
}

TEST_CASE("non-affinizable input is refused") {
  CHECK_THROWS_AS(embed(Decider(fixture("nonregular"))), DomainError);
  CHECK_THROWS_AS(embed(Decider(fixture("halfopen"))), DomainError);
}

TEST_CASE("a detached end is caught by verification") {
  Decider d(fixture("infty"));
  EmbedResult r = embed(d);
  Embedding broken = detach_end(r.embedding, 0, true);
  CHECK_FALSE(broken.curves[0].left_anchor);
  Certificate c = verify_embedding(d.spec(), broken);
  CHECK_FALSE(c.ok);
  REQUIRE(c.failure);
  CHECK(c.failure->a == q("2"));
  CHECK(c.failure->direction == 2);
  CHECK_FALSE(c.failure->ok);
  CHECK_THROWS_AS(detach_end(broken, 0, true), DomainError);

  EmbedResult chain = embed(Decider(fixture("chain")));
  Certificate cc = verify_embedding(fixture("chain"), detach_end(chain.embedding, 1, false));
  CHECK_FALSE(cc.ok);
  REQUIRE(cc.failure);
  CHECK(cc.failure->a == q("1/4"));
}

TEST_CASE("gluings must realize every ray exactly once") {
  Decider d(fixture("infty"));
  NormalizedSpec n = normalize_isolate(d);
  RayReport rays = d.rays();
  CHECK_NOTHROW(build_embedding(n, rays));

  RayReport bogus = rays;
  bogus.rays.push_back({q("2"), q("0"), RaySide::Right, 0});
  CHECK_THROWS_AS(build_embedding(n, bogus), DomainError);

  RayReport stray = rays;
  stray.rays.push_back({q("1"), q("0"), RaySide::Left, 0});
  CHECK_THROWS(build_embedding(n, stray));
}

TEST_CASE("an end glued to two points is rejected") {
  SemilinearSet h = S("{2, 3}");
  NormalizedSpec n = normalize_isolate(fixture("nonhaus"), ExceptionalSets{h, h, h});
  CHECK_THROWS_WITH_AS(build_embedding(n, RayReport{}), doctest::Contains("glued to two points"),
                       DomainError);
}

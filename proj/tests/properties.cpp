#include "properties.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "deftop/oracle.hpp"

using namespace deftop;

namespace testing {

std::size_t PropertyReport::failed(const std::string& property) const {
  return static_cast<std::size_t>(std::count_if(failures.begin(), failures.end(), [&](const std::string& f) {
    return f.rfind(property + ":", 0) == 0;
  }));
}

namespace {

class Run {
 public:
  Run(const Decider& d, const PropertyOptions& opts)
      : d_(d), sa_(d.shadows()), spec_(d.spec()), opts_(opts), rng_(opts.seed) {
    Rational step = pow2_neg(static_cast<unsigned>(opts.resolution));
    Rational lo = spec_.space.min_coordinate(), hi = spec_.space.max_coordinate();
    std::set<Rational> pts;
    for (Rational x = lo; x <= hi; x += step)
      if (spec_.space.contains(x)) pts.insert(x);
    for (const auto& b : spec_.cell_boundaries())
      if (spec_.space.contains(b)) pts.insert(b);
    for (const auto& s : sa_.sites()) pts.insert(s.representative());
    points_.assign(pts.begin(), pts.end());
    for (const auto& a : points_) shadows_.emplace(a, sa_.shadow_set(a));
  }

  PropertyReport report;

  void all() {
    closure_axioms();
    characterization();
    sandwich();
    reflexivity_and_bound();
    two_preimage();
    generic_containment();
    neighborhood_capture();
    exceptional_and_rays();
  }

 private:
  const Decider& d_;
  const ShadowAnalysis& sa_;
  const TopologySpec& spec_;
  PropertyOptions opts_;
  std::mt19937_64 rng_;
  std::vector<Rational> points_;
  std::map<Rational, SemilinearSet> shadows_;

  void count(const std::string& p) { ++report.checks[p]; }

  void fail(const std::string& p, const std::string& detail) {
    report.failures.push_back(p + ": " + detail);
  }

  const SemilinearSet& shadow(const Rational& a) {
    auto it = shadows_.find(a);
    if (it == shadows_.end()) it = shadows_.emplace(a, sa_.shadow_set(a)).first;
    return it->second;
  }

  std::vector<Rational> valid_eps(const Rational& a, int depth) const {
    std::size_t i = spec_.cell_of(a);
    std::vector<Rational> out;
    for (int k = 1; k <= depth; ++k) {
      Rational e = pow2_neg(static_cast<unsigned>(k));
      if (spec_.eps_domain[i].eval({{"a", a}, {"eps", e}})) out.push_back(e);
    }
    return out;
  }

  void closure_axioms() {
    const std::string p = "closure_axioms";
    count(p);
    if (!sa_.closure(SemilinearSet()).empty()) fail(p, "closure of the empty set is not empty");
    for (int t = 0; t < opts_.closure_trials; ++t) {
      SemilinearSet z1 = random_subset(spec_.space, rng_), z2 = random_subset(spec_.space, rng_);
      SemilinearSet c1 = sa_.closure(z1), c2 = sa_.closure(z2), c12 = sa_.closure(z1 | z2);
      count(p);
      if (!z1.is_subset_of(c1)) fail(p, "not extensive on " + z1.str());
      if (sa_.closure(c1) != c1) fail(p, "not idempotent on " + z1.str());
      if (!c1.is_subset_of(c12)) fail(p, "not monotone on " + z1.str() + " within " + (z1 | z2).str());
      if (c12 != (c1 | c2)) fail(p, "not additive on " + z1.str() + " and " + z2.str());
      if (!c1.is_subset_of(spec_.space)) fail(p, "leaves X on " + z1.str());
    }
  }

  // b in S(a) iff a adheres to I ∩ X for every interval I around b. The
  // intervals (b - 2^-k, b + 2^-k) shrink, so the closures shrink as well;
  // the smallest one decides and the widest one bounds it.
  void characterization() {
    const std::string p = "characterization";
    std::set<Rational> bs;
    Rational lo = spec_.space.min_coordinate(), hi = spec_.space.max_coordinate();
    for (Rational x = lo; x <= hi; x += rat(1, 16)) bs.insert(x);
    for (std::size_t i = 0; i < points_.size(); i += 16)
      if (shadow(points_[i]).finite())
        for (const auto& s : shadow(points_[i]).as_points()) bs.insert(s);
    Rational wide = pow2_neg(4), narrow = pow2_neg(static_cast<unsigned>(opts_.depth));
    for (const auto& b : bs) {
      SemilinearSet near = sa_.closure(SemilinearSet::open(b - narrow, b + narrow) & spec_.space);
      SemilinearSet far = sa_.closure(SemilinearSet::open(b - wide, b + wide) & spec_.space);
      if (!near.is_subset_of(far)) fail(p, "closures grow as the interval around " + to_string(b) + " shrinks");
      for (const auto& a : points_) {
        count(p);
        bool in_s = shadow(a).contains(b), adheres = near.contains(a);
        if (in_s != adheres)
          fail(p, "a=" + to_string(a) + " b=" + to_string(b) + (in_s ? " shadow but not adherent" : " adherent but not a shadow"));
      }
    }
  }

  void sandwich() {
    const std::string p = "sandwich";
    std::vector<std::pair<Rational, Rational>> ivs;
    for (const auto& c : spec_.cells) {
      if (c.is_point()) continue;
      Rational w = (c.hi - c.lo) / 4;
      for (int j = 0; j < 4; ++j) ivs.emplace_back(c.lo + w * j, c.lo + w * (j + 1));
      for (int t = 0; t < opts_.interval_trials; ++t) {
        long n = 16;
        long x = static_cast<long>(rng_() % n), y = static_cast<long>(rng_() % n);
        if (x == y) continue;
        if (x > y) std::swap(x, y);
        ivs.emplace_back(c.lo + (c.hi - c.lo) * rat(x, n), c.lo + (c.hi - c.lo) * rat(y + 1, n));
      }
    }
    for (const auto& [c, dd] : ivs) {
      SemilinearSet open = SemilinearSet::open(c, dd), closed = SemilinearSet::closed(c, dd);
      SemilinearSet cl = sa_.closure(open);
      for (const auto& a : points_) {
        count(p);
        const SemilinearSet& s = shadow(a);
        bool meets_open = !(s & open).empty(), meets_closed = !(s & closed).empty();
        std::string where = "a=" + to_string(a) + " (c,d)=" + open.str();
        if (meets_open && !cl.contains(a)) fail(p, where + ": a shadow in (c,d) but a not adherent");
        if (cl.contains(a) && !meets_closed) fail(p, where + ": adherent without a shadow in [c,d]");
      }
    }
  }

  void reflexivity_and_bound() {
    for (const auto& a : points_) {
      const SemilinearSet& s = shadow(a);
      count("reflexivity");
      if (!s.contains(a)) fail("reflexivity", to_string(a) + " is not in its shadow set " + s.str());
      Comparison c = sa_.compare_at(a);
      if (c.coarser && c.finer && s != SemilinearSet::point(a))
        fail("reflexivity", "affine point " + to_string(a) + " has shadows " + s.str());
      if (c.finer != (s == SemilinearSet::point(a)))
        fail("reflexivity", "finer is " + std::string(c.finer ? "true" : "false") + " at " + to_string(a) +
                                " but S(a) = " + s.str());

      count("uniform_bound");
      std::size_t bound = 2 * spec_.templates[spec_.cell_of(a)].pieces.size() + 1;
      if (!s.finite() || s.as_points().size() > bound)
        fail("uniform_bound", "S(" + to_string(a) + ") = " + s.str() + " exceeds " + std::to_string(bound));
    }
  }

  const SubcellShadows* subcell_of(const Rational& a) const {
    std::size_t i = spec_.cell_of(a);
    if (spec_.cells[i].is_point()) return nullptr;
    for (const auto& s : sa_.generic(i).subcells)
      if (s.lo < a && a < s.hi) return &s;
    return nullptr;
  }

  // Preimages of b: solved exactly from the generic functions and the point
  // sites, confirmed with shadow_set, and topped up with grid points.
  void two_preimage() {
    const std::string p = "two_preimage";
    std::set<Rational> bs(points_.begin(), points_.end());
    for (const auto& a : points_)
      if (shadow(a).finite())
        for (const auto& s : shadow(a).as_points()) bs.insert(s);
    for (const auto& b : bs) {
      std::set<Rational> pre;
      bool infinite = false;
      for (const auto& site : sa_.sites()) {
        if (site.is_point) {
          if (site.lo != b && shadow(site.lo).contains(b)) pre.insert(site.lo);
          continue;
        }
        const SubcellShadows* sc = subcell_of(site.representative());
        if (!sc) continue;
        for (std::size_t k = 1; k < sc->functions.size(); ++k) {
          const AffineExpr& f = sc->functions[k];
          if (f.coef_a == 0) {
            if (f.constant == b) infinite = true;
            continue;
          }
          Rational a = (b - f.constant) / f.coef_a;
          a.canonicalize();
          if (site.contains(a) && a != b) {
            if (!shadow(a).contains(b))
              fail(p, "generic function " + f.str() + " gives " + to_string(a) + " but " + to_string(b) + " is not in S(a)");
            pre.insert(a);
          }
        }
      }
      for (const auto& a : points_)
        if (a != b && shadow(a).contains(b)) pre.insert(a);
      count(p);
      std::size_t limit = 2;
      if (spec_.space.contains(b) && sa_.classify_point(b) != PointClass::LocallyIsolated) limit = 1;
      if (infinite || pre.size() > limit) {
        std::ostringstream os;
        os << to_string(b) << " is a shadow of ";
        if (infinite) os << "infinitely many points";
        for (const auto& a : pre) os << to_string(a) << " ";
        os << "(limit " << limit << ")";
        fail(p, os.str());
      }
    }
  }

  void generic_containment() {
    const std::string p = "generic_containment";
    for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
      if (spec_.cells[i].is_point()) continue;
      for (const auto& sc : sa_.generic(i).subcells) {
        std::vector<Rational> as;
        for (int j = 1; j <= 3; ++j) as.push_back(sc.lo + (sc.hi - sc.lo) * rat(j, 4));
        for (const auto& a : points_)
          if (sc.lo < a && a < sc.hi) as.push_back(a);
        for (const auto& a : as) {
          SemilinearSet sa = shadow(a);
          for (std::size_t k = 0; k < sc.functions.size(); ++k) {
            Rational b = sc.functions[k].eval(a, 0);
            if (k == 0 && b != a) fail(p, "first shadow function is not the identity on " + spec_.cells[i].str());
            if (!sa.contains(b)) fail(p, "f(" + to_string(a) + ") = " + to_string(b) + " is not in S(a) = " + sa.str());
            if (!spec_.space.contains(b) || !subcell_of(b)) continue;
            count(p);
            if (!shadow(b).is_subset_of(sa))
              fail(p, "S(" + to_string(b) + ") = " + shadow(b).str() + " is not inside S(" + to_string(a) + ") = " + sa.str());
          }
          if (sa.finite() && sa.as_points().size() != sc.functions.size())
            fail(p, "S(" + to_string(a) + ") = " + sa.str() + " but the subcell lists " +
                        std::to_string(sc.functions.size()) + " functions");
        }
      }
    }
  }

  void neighborhood_capture() {
    const std::string p = "neighborhood_capture";
    for (std::size_t n = 0; n < points_.size(); n += 4) {
      const Rational& a = points_[n];
      const SemilinearSet& s = shadow(a);
      if (!s.finite()) continue;
      for (int k : {4, 8, opts_.depth}) {
        Rational w = pow2_neg(static_cast<unsigned>(k));
        SemilinearSet u;
        for (const auto& x : s.as_points()) u = u | SemilinearSet::open(x - w, x + w);
        count(p);
        bool found = false;
        for (const auto& e : valid_eps(a, 48))
          if (spec_.neighborhood(a, e).is_subset_of(u)) {
            found = true;
            break;
          }
        if (!found) fail(p, "no N(" + to_string(a) + ", eps) inside " + u.str());
      }
    }
  }

  void exceptional_and_rays() {
    ExceptionalSets ex = d_.exceptional();
    const LocalSets& l = sa_.local_sets();
    count("exceptional_finiteness");
    if (ex.E != spec_.space - l.coarser) fail("exceptional_finiteness", "E differs from X minus the coarser set");
    if (ex.E.finite() && !ex.A.finite())
      fail("exceptional_finiteness", "E = " + ex.E.str() + " is finite but A = " + ex.A.str() + " is not");
    for (const auto& a : points_) {
      Comparison c = sa_.compare_at(a);
      count("exceptional_finiteness");
      if (ex.E.contains(a) == c.coarser) fail("exceptional_finiteness", "E disagrees at " + to_string(a));
      if (ex.A.contains(a) == (c.coarser && c.finer)) fail("exceptional_finiteness", "A disagrees at " + to_string(a));
    }
    if (!ex.A.finite()) return;

    const std::string p = "rays";
    Rational g = pow2_neg(40);
    for (const auto& a : ex.A.as_points()) {
      std::vector<Ray> rays = d_.rays_at(a);
      for (const auto& r : rays) {
        SemilinearSet window = (r.side == RaySide::Left ? SemilinearSet::open(r.end, r.end + g)
                                                        : SemilinearSet::open(r.end - g, r.end)) &
                               spec_.space;
        if (window.empty()) fail(p, "ray " + r.str() + " of " + to_string(a) + " misses X");
        for (const auto& e : valid_eps(a, opts_.depth)) {
          count(p);
          if (!window.is_subset_of(spec_.neighborhood(a, e)))
            fail(p, "N(" + to_string(a) + ", " + to_string(e) + ") does not hold the ray " + r.str());
        }
      }
      const SemilinearSet& s = shadow(a);
      if (!s.finite()) continue;
      for (const auto& x : s.as_points()) {
        if (spec_.space.contains(x)) continue;
        count(p);
        bool has = std::any_of(rays.begin(), rays.end(), [&](const Ray& r) { return r.end == x; });
        if (!has) fail(p, "shadow " + to_string(x) + " of " + to_string(a) + " lies outside X without a ray");
      }
    }
  }
};

}  // namespace

PropertyReport run_properties(const Decider& d, const PropertyOptions& opts) {
  Run r(d, opts);
  r.all();
  return r.report;
}

}  // namespace testing

#include "deftop/shadow.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "compile.hpp"
#include "deftop/error.hpp"

namespace deftop {

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::LocallyIsolated: return "LocallyIsolated";
    case PointClass::LocallyRightClosed: return "LocallyRightClosed";
    case PointClass::LocallyLeftClosed: return "LocallyLeftClosed";
    case PointClass::LocallyEuclidean: return "LocallyEuclidean";
  }
  return "?";
}

std::string to_string(BasisClass c) {
  switch (c) {
    case BasisClass::Iso: return "Iso";
    case BasisClass::LeftClosedHalf: return "LeftClosedHalf";
    case BasisClass::RightClosedHalf: return "RightClosedHalf";
    case BasisClass::Affine: return "Affine";
    case BasisClass::NonLocal: return "NonLocal";
  }
  return "?";
}

Rational Site::representative() const { return is_point ? lo : midpoint(lo, hi); }

SemilinearSet Site::as_set() const {
  return is_point ? SemilinearSet::point(lo) : SemilinearSet::open(lo, hi);
}

std::string Site::str() const {
  if (is_point) return "{" + to_string(lo) + "}";
  return "(" + to_string(lo) + "," + to_string(hi) + ")";
}

namespace detail {

namespace {

LinTerm V(const std::string& n) { return LinTerm::var(n); }

LinTerm as_term(const AffineExpr& f, const std::string& a) {
  return LinTerm::var(a, f.coef_a) + LinTerm(f.constant);
}

Rational value(const AffineExpr& f, const Rational& a) { return f.coef_a * a + f.constant; }

void add_inside(std::vector<Rational>& out, const Rational& q, const Cell& c) {
  if (c.lo < q && q < c.hi) out.push_back(q);
}

bool images_disjoint(const AffineExpr& f, const AffineExpr& g, const Rational& lo,
                     const Rational& hi) {
  Rational f1 = value(f, lo), f2 = value(f, hi), g1 = value(g, lo), g2 = value(g, hi);
  Rational fmin = std::min(f1, f2), fmax = std::max(f1, f2);
  Rational gmin = std::min(g1, g2), gmax = std::max(g1, g2);
  // open images (or single points for constant functions)
  bool fc = f.coef_a == 0, gc = g.coef_a == 0;
  if (fc && gc) return f1 != g1;
  if (fc) return !(gmin < f1 && f1 < gmax);
  if (gc) return !(fmin < g1 && g1 < fmax);
  return fmax <= gmin || gmax <= fmin;
}

// Largest y in (x, hi] such that the images over (x, y) are pairwise
// disjoint; nullopt when no such y exists.
std::optional<Rational> reach(const std::vector<AffineExpr>& fs, const Rational& x,
                              const Rational& hi) {
  bool all = true;
  for (std::size_t i = 0; i < fs.size() && all; ++i)
    for (std::size_t j = i + 1; j < fs.size() && all; ++j)
      all = images_disjoint(fs[i], fs[j], x, hi);
  if (all) return hi;
  Rational best = hi;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      const AffineExpr *f = &fs[i], *g = &fs[j];
      // order so that f < g just right of x
      Rational d0 = value(*g, x) - value(*f, x);
      Rational slope = g->coef_a - f->coef_a;
      if (d0 < 0 || (d0 == 0 && slope < 0)) std::swap(f, g);
      if (value(*f, x) == value(*g, x)) return std::nullopt;
      // need sup f < inf g on (x, y): f(x) <= g(y), f(y) <= g(x)
      auto bound = [&](const AffineExpr& rising, const Rational& cap) {
        // largest y with rising(y) <= cap when rising increases
        if (rising.coef_a > 0) best = std::min(best, Rational((cap - rising.constant) / rising.coef_a));
      };
      bound(*f, value(*g, x));
      AffineExpr neg_g{-g->coef_a, 0, -g->constant};
      bound(neg_g, -value(*f, x));
    }
  }
  if (best <= x) return std::nullopt;
  return best;
}

}  // namespace

class ShadowEngine {
 public:
  explicit ShadowEngine(const TopologySpec& spec) : spec_(spec), m_(spec_) {
    require_validated(spec_);
    sh_.resize(spec_.cells.size());
    generic_.resize(spec_.cells.size());
  }

  const TopologySpec& spec() const { return spec_; }

  SemilinearSet closure(const SemilinearSet& z) {
    if (!z.is_subset_of(spec_.space))
      throw DomainError("closure: " + z.str() + " is not a subset of X = " + spec_.space.str());
    SemilinearSet out;
    for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
      std::string d = m_.fresh(), y = m_.fresh();
      LinFormula f =
          m_.in_cell(i, "x") &&
          LinFormula::forall(d, implies(m_.domain(i, "x", d),
                                        LinFormula::exists(y, m_.member(i, "x", d, y) &&
                                                                  in_set(y, z))));
      out = out | solution_set_1d(f, "x");
    }
    return out;
  }

  // shadow relation of cell i, quantifier free in a and z
  const LinFormula& shadow_relation(std::size_t i) {
    if (!sh_[i]) {
      std::string e = m_.fresh();
      LinFormula f = m_.in_cell(i, "a") &&
                     LinFormula::forall(e, implies(m_.domain(i, "a", e),
                                                   m_.member_closure(i, "a", e, "z")));
      sh_[i] = eliminate_quantifiers(f);
    }
    return *sh_[i];
  }

  SemilinearSet shadow_set(const Rational& q) {
    std::size_t i = spec_.cell_of(q);
    return solution_set_1d(shadow_relation(i).substitute("a", q), "z");
  }

  std::vector<Rational> shadows_at(const Rational& q) {
    SemilinearSet s = shadow_set(q);
    if (!s.finite()) throw DomainError("shadow set of " + to_string(q) + " is infinite: " + s.str());
    return s.as_points();
  }

  const LocalSets& local() {
    if (!local_) {
      LocalSets l;
      for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
        l.left = l.left | side_set(i, true);
        l.right = l.right | side_set(i, false);
        l.coarser = l.coarser | coarser_set(i);
        l.finer = l.finer | finer_set(i);
      }
      local_ = l;
    }
    return *local_;
  }

  bool contains_side(const Rational& q, const Rational& b, bool left) {
    std::size_t i = spec_.cell_of(q);
    std::string e = m_.fresh(), g = m_.fresh(), z = m_.fresh();
    LinFormula window = left ? lt(V("b") - V(g), V(z)) && lt(V(z), V("b"))
                             : lt(V("b"), V(z)) && lt(V(z), V("b") + V(g));
    LinFormula f = LinFormula::forall(
        e, implies(m_.domain(i, "q", e),
                   LinFormula::exists(g, gt(V(g), 0) &&
                                             LinFormula::forall(z, implies(window, m_.member(i, "q", e, z))))));
    return decide_sentence(f.substitute("q", q).substitute("b", b));
  }

  const CellShadows& generic(std::size_t i) {
    if (spec_.cells[i].is_point()) throw DomainError("shadows_generic needs an open cell");
    if (!generic_[i]) generic_[i] = build_generic(i);
    return *generic_[i];
  }

  const ShadowMap& map() {
    if (!map_) {
      ShadowMap sm;
      for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
        if (spec_.cells[i].is_point()) {
          sm.points[spec_.cells[i].point()] = shadows_at(spec_.cells[i].point());
        } else {
          const CellShadows& cs = generic(i);
          sm.cells.push_back(cs);
          for (const auto& b : cs.breakpoints) sm.points[b] = shadows_at(b);
        }
      }
      map_ = sm;
    }
    return *map_;
  }

  const std::vector<Site>& sites() {
    if (!sites_) {
      std::vector<Site> out;
      for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
        const Cell& c = spec_.cells[i];
        if (c.is_point()) {
          out.push_back({true, c.point(), c.point(), i});
          continue;
        }
        const CellShadows& cs = generic(i);
        for (const auto& s : cs.subcells) out.push_back({false, s.lo, s.hi, i});
        for (const auto& b : cs.breakpoints) out.push_back({true, b, b, i});
      }
      std::sort(out.begin(), out.end(), [](const Site& x, const Site& y) {
        if (x.lo != y.lo) return x.lo < y.lo;
        return x.is_point && !y.is_point;
      });
      sites_ = out;
    }
    return *sites_;
  }

  PointClass classify_point(const Rational& q) {
    spec_.cell_of(q);
    const LocalSets& l = local();
    bool left = l.left.contains(q), right = l.right.contains(q);
    if (left && right) return PointClass::LocallyEuclidean;
    if (left) return PointClass::LocallyRightClosed;
    if (right) return PointClass::LocallyLeftClosed;
    return PointClass::LocallyIsolated;
  }

  Comparison compare_at(const Rational& q, const Site& site) {
    const LocalSets& l = local();
    Comparison c;
    c.site = site;
    c.coarser = l.coarser.contains(q);
    c.finer = l.finer.contains(q);
    PointClass pc = classify_point(q);
    if (!c.finer)
      c.basis = BasisClass::NonLocal;
    else if (pc == PointClass::LocallyIsolated)
      c.basis = BasisClass::Iso;
    else if (c.coarser)
      c.basis = BasisClass::Affine;
    else if (pc == PointClass::LocallyLeftClosed)
      c.basis = BasisClass::LeftClosedHalf;
    else
      c.basis = BasisClass::RightClosedHalf;
    return c;
  }

 private:
  SemilinearSet side_set(std::size_t i, bool left) {
    std::string e = m_.fresh(), g = m_.fresh(), z = m_.fresh();
    LinFormula window = left ? lt(V("a") - V(g), V(z)) && lt(V(z), V("a"))
                             : lt(V("a"), V(z)) && lt(V(z), V("a") + V(g));
    LinFormula f =
        m_.in_cell(i, "a") &&
        LinFormula::forall(
            e, implies(m_.domain(i, "a", e),
                       LinFormula::exists(
                           g, gt(V(g), 0) &&
                                  LinFormula::forall(z, implies(window, m_.member(i, "a", e, z))))));
    return solution_set_1d(f, "a");
  }

  SemilinearSet coarser_set(std::size_t i) {
    std::string e = m_.fresh(), g = m_.fresh(), z = m_.fresh();
    LinFormula ball = m_.in_space(z) && lt(V("a") - V(g), V(z)) && lt(V(z), V("a") + V(g));
    LinFormula f =
        m_.in_cell(i, "a") &&
        LinFormula::forall(
            e, implies(m_.domain(i, "a", e),
                       LinFormula::exists(
                           g, gt(V(g), 0) &&
                                  LinFormula::forall(z, implies(ball, m_.member(i, "a", e, z))))));
    return solution_set_1d(f, "a");
  }

  SemilinearSet finer_set(std::size_t i) {
    std::string e = m_.fresh(), g = m_.fresh(), z = m_.fresh();
    LinFormula inside = LinFormula::forall(
        z, implies(m_.member(i, "a", e, z), lt(V("a") - V(g), V(z)) && lt(V(z), V("a") + V(g))));
    LinFormula f =
        m_.in_cell(i, "a") &&
        LinFormula::forall(g, implies(gt(V(g), 0),
                                      LinFormula::exists(e, m_.domain(i, "a", e) && inside)));
    return solution_set_1d(f, "a");
  }

  CellShadows build_generic(std::size_t i) {
    const Cell& c = spec_.cells[i];
    std::vector<AffineExpr> cand{AffineExpr{1, 0, 0}};
    auto add = [&](const AffineExpr& f) {
      AffineExpr g = f.limit();
      if (std::find(cand.begin(), cand.end(), g) == cand.end()) cand.push_back(g);
    };
    for (const auto& p : spec_.templates[i].pieces) {
      add(p.lo);
      if (!p.is_singleton()) add(p.hi);
    }

    std::vector<Rational> bps;
    const LocalSets& l = local();
    for (const SemilinearSet* s : {&l.left, &l.right, &l.coarser, &l.finer})
      for (const auto& q : s->coordinates()) add_inside(bps, q, c);
    std::vector<Rational> walls = spec_.cell_boundaries();
    for (const auto& q : spec_.space.coordinates()) walls.push_back(q);
    for (std::size_t x = 0; x < cand.size(); ++x) {
      const AffineExpr& f = cand[x];
      for (std::size_t y = x + 1; y < cand.size(); ++y) {
        const AffineExpr& g = cand[y];
        if (f.coef_a != g.coef_a)
          add_inside(bps, (g.constant - f.constant) / (f.coef_a - g.coef_a), c);
      }
      if (f.coef_a != 0)
        for (const auto& w : walls) add_inside(bps, (w - f.constant) / f.coef_a, c);
    }
    const LinFormula& sh = shadow_relation(i);
    std::vector<SemilinearSet> hits;
    for (const auto& f : cand) {
      SemilinearSet t = solution_set_1d(sh.substitute("z", as_term(f, "a")), "a");
      for (const auto& q : t.coordinates()) add_inside(bps, q, c);
      hits.push_back(t);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    std::vector<Rational> ends{c.lo};
    ends.insert(ends.end(), bps.begin(), bps.end());
    ends.push_back(c.hi);

    CellShadows out;
    out.cell = i;
    for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
      Rational lo = ends[k], hi = ends[k + 1], mid = midpoint(lo, hi);
      std::vector<AffineExpr> fs;
      for (std::size_t x = 0; x < cand.size(); ++x)
        if (hits[x].contains(mid)) fs.push_back(cand[x]);
      if (fs.empty() || fs.front() != cand.front())
        throw Error("shadow of a point misses the point itself on " + c.str());
      std::sort(fs.begin() + 1, fs.end(), [&](const AffineExpr& f, const AffineExpr& g) {
        return value(f, mid) < value(g, mid);
      });
      check_exact(i, lo, hi, fs);
      split_disjoint(lo, hi, fs, out);
    }
    for (std::size_t k = 1; k < out.subcells.size(); ++k) out.breakpoints.push_back(out.subcells[k].lo);
    return out;
  }

  void check_exact(std::size_t i, const Rational& lo, const Rational& hi,
                   const std::vector<AffineExpr>& fs) {
    std::vector<LinFormula> graphs;
    for (const auto& f : fs) graphs.push_back(eq(V("z"), as_term(f, "a")));
    LinFormula ok = LinFormula::forall(
        std::vector<std::string>{"a", "z"},
        implies(lt(LinTerm(lo), V("a")) && lt(V("a"), LinTerm(hi)),
                iff(shadow_relation(i), LinFormula::disj(graphs))));
    if (!decide_sentence(ok))
      throw DomainError("shadow sets on (" + to_string(lo) + "," + to_string(hi) +
                        ") are not a finite union of affine graphs");
  }

  static void split_disjoint(const Rational& lo, const Rational& hi,
                             const std::vector<AffineExpr>& fs, CellShadows& out) {
    constexpr int kMaxPieces = 64;
    // two functions meeting at an end can never be separated by a finite split
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        if (images_disjoint(fs[i], fs[j], lo, hi)) continue;
        if (value(fs[i], lo) == value(fs[j], lo) || value(fs[i], hi) == value(fs[j], hi)) {
          out.subcells.push_back({lo, hi, fs, false});
          return;
        }
      }
    }
    Rational x = lo;
    for (int n = 0; n < kMaxPieces; ++n) {
      std::optional<Rational> y = reach(fs, x, hi);
      if (!y || n + 1 == kMaxPieces) {
        out.subcells.push_back({x, hi, fs, false});
        return;
      }
      out.subcells.push_back({x, *y, fs, true});
      if (*y == hi) return;
      x = *y;
    }
  }

  TopologySpec spec_;
  Model m_;
  std::vector<std::optional<LinFormula>> sh_;
  std::vector<std::optional<CellShadows>> generic_;
  std::optional<LocalSets> local_;
  std::optional<ShadowMap> map_;
  std::optional<std::vector<Site>> sites_;
};

}  // namespace detail

ShadowAnalysis::ShadowAnalysis(const TopologySpec& spec)
    : e_(std::make_unique<detail::ShadowEngine>(spec)) {}
ShadowAnalysis::~ShadowAnalysis() = default;
ShadowAnalysis::ShadowAnalysis(ShadowAnalysis&&) noexcept = default;
ShadowAnalysis& ShadowAnalysis::operator=(ShadowAnalysis&&) noexcept = default;

const TopologySpec& ShadowAnalysis::spec() const { return e_->spec(); }
SemilinearSet ShadowAnalysis::closure(const SemilinearSet& z) const { return e_->closure(z); }
std::vector<Rational> ShadowAnalysis::shadows_at(const Rational& q) const {
  return e_->shadows_at(q);
}
SemilinearSet ShadowAnalysis::shadow_set(const Rational& q) const { return e_->shadow_set(q); }
const CellShadows& ShadowAnalysis::generic(std::size_t cell) const { return e_->generic(cell); }
const ShadowMap& ShadowAnalysis::map() const { return e_->map(); }
const LocalSets& ShadowAnalysis::local_sets() const { return e_->local(); }
const std::vector<Site>& ShadowAnalysis::sites() const { return e_->sites(); }
PointClass ShadowAnalysis::classify_point(const Rational& q) const {
  return e_->classify_point(q);
}

Comparison ShadowAnalysis::compare_at(const Rational& q) const {
  for (const auto& s : sites())
    if (s.contains(q)) return e_->compare_at(q, s);
  throw DomainError("point " + to_string(q) + " is not in X");
}

std::vector<std::pair<Site, PointClass>> ShadowAnalysis::classify() const {
  std::vector<std::pair<Site, PointClass>> out;
  for (const auto& s : sites()) out.emplace_back(s, e_->classify_point(s.representative()));
  return out;
}

std::vector<Comparison> ShadowAnalysis::affine_comparison() const {
  std::vector<Comparison> out;
  for (const auto& s : sites()) out.push_back(e_->compare_at(s.representative(), s));
  return out;
}

bool ShadowAnalysis::contains_left_of(const Rational& q, const Rational& b) const {
  return e_->contains_side(q, b, true);
}
bool ShadowAnalysis::contains_right_of(const Rational& q, const Rational& b) const {
  return e_->contains_side(q, b, false);
}

SemilinearSet tau_closure(const TopologySpec& spec, const SemilinearSet& z) {
  return ShadowAnalysis(spec).closure(z);
}
std::vector<Rational> shadows_at(const TopologySpec& spec, const Rational& q) {
  return ShadowAnalysis(spec).shadows_at(q);
}
CellShadows shadows_generic(const TopologySpec& spec, std::size_t cell) {
  return ShadowAnalysis(spec).generic(cell);
}
std::vector<std::pair<Site, PointClass>> classify(const TopologySpec& spec) {
  return ShadowAnalysis(spec).classify();
}
std::vector<Comparison> affine_comparison(const TopologySpec& spec) {
  return ShadowAnalysis(spec).affine_comparison();
}

}  // namespace deftop

#include "deftop/decide.hpp"

#include <algorithm>
#include <numeric>

#include "compile.hpp"
#include "deftop/error.hpp"

namespace deftop {

std::string Ray::str() const {
  return side == RaySide::Left ? "(" + to_string(end) + ",·)" : "(·," + to_string(end) + ")";
}

std::vector<Ray> RayReport::rays_of(const Rational& a) const {
  std::vector<Ray> out;
  for (const auto& r : rays)
    if (r.point == a) out.push_back(r);
  return out;
}

namespace detail {

namespace {

LinTerm V(const std::string& n) { return LinTerm::var(n); }

Rational first_dyadic(const SemilinearSet& s) {
  for (int k = 1; k <= 60; ++k)
    if (s.contains(pow2_neg(k))) return pow2_neg(k);
  return pick(s);
}

SemilinearSet finite_part(const SemilinearSet& s) {
  std::vector<Rational> pts;
  for (const auto& c : s.components())
    if (c.is_point()) pts.push_back(c.lo);
  return SemilinearSet::points(pts);
}

struct UnionFind {
  std::vector<std::size_t> up;
  explicit UnionFind(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  std::size_t find(std::size_t x) { return up[x] == x ? x : up[x] = find(up[x]); }
  void join(std::size_t a, std::size_t b) { up[find(a)] = find(b); }
};

}  // namespace

class DecideEngine {
 public:
  DecideEngine(const TopologySpec& spec, DecideOptions opts)
      : spec_(spec), m_(spec_), sa_(spec_), opts_(opts) {}

  const TopologySpec& spec() const { return spec_; }
  const ShadowAnalysis& shadows() const { return sa_; }

  HausdorffResult hausdorff() {
    if (haus_) return *haus_;
    HausdorffResult out;
    std::size_t n = spec_.cells.size();
    for (std::size_t i = 0; i < n && out.hausdorff; ++i) {
      for (std::size_t j = i; j < n && out.hausdorff; ++j) {
        std::string e = m_.fresh(), d = m_.fresh();
        LinFormula sep = LinFormula::exists(
            std::vector<std::string>{e, d},
            m_.domain(i, "p", e) && m_.domain(j, "q", d) && m_.disjoint(i, "p", e, j, "q", d));
        LinFormula bad = m_.in_cell(i, "p") && m_.in_cell(j, "q") &&
                         (lt(V("p"), V("q")) || lt(V("q"), V("p"))) && !sep;
        bad = eliminate_quantifiers(bad);
        if (!decide_sentence(LinFormula::exists(std::vector<std::string>{"p", "q"}, bad))) continue;
        Rational p = pick(solution_set_1d(LinFormula::exists("q", bad), "p"),
                          spec_.cells[i].midpoint());
        Rational q = pick(solution_set_1d(bad.substitute("p", p), "q"), spec_.cells[j].midpoint());
        out.hausdorff = false;
        out.witness = SeparationWitness{p, q};
      }
    }
    haus_ = out;
    return out;
  }

  RegularityResult regularity() {
    if (!hausdorff().hausdorff) throw DomainError("regularity needs a Hausdorff topology");
    if (reg_) return *reg_;
    RegularityResult out;
    for (std::size_t i = 0; i < spec_.cells.size() && out.regular; ++i) {
      // x adheres to N_i(a, delta), split on the cell of x
      std::vector<LinFormula> adh;
      for (std::size_t k = 0; k < spec_.cells.size(); ++k) {
        std::string h = m_.fresh(), y = m_.fresh();
        LinFormula f = m_.in_cell(k, "x") &&
                       LinFormula::forall(h, implies(m_.domain(k, "x", h),
                                                     LinFormula::exists(y, m_.member(k, "x", h, y) &&
                                                                               m_.member(i, "a", "delta", y))));
        adh.push_back(eliminate_quantifiers(f));
      }
      LinFormula escapes = LinFormula::exists(
          "x", !m_.member(i, "a", "eps", "x") && LinFormula::disj(adh));
      LinFormula bad = m_.domain(i, "a", "eps") &&
                       LinFormula::forall("delta", implies(m_.domain(i, "a", "delta"), escapes));
      bad = eliminate_quantifiers(bad);
      if (!decide_sentence(LinFormula::exists(std::vector<std::string>{"a", "eps"}, bad))) continue;
      Rational a = pick(solution_set_1d(LinFormula::exists("eps", bad), "a"),
                        spec_.cells[i].midpoint());
      Rational eps = first_dyadic(solution_set_1d(bad.substitute("a", a), "eps"));
      RegularityWitness w{a, eps, {}};
      LinFormula dom = m_.domain(i, "a", "eps").substitute("a", a);
      SemilinearSet target = spec_.neighborhood(a, eps);
      for (int k = 1; k <= opts_.schedule_depth; ++k) {
        Rational delta = pow2_neg(k);
        if (!dom.eval({{"eps", delta}})) continue;
        SemilinearSet extra = sa_.closure(spec_.neighborhood(a, delta)) - target;
        if (!extra.empty()) w.refutation.emplace_back(delta, sample_point(extra));
      }
      out.regular = false;
      out.witness = w;
    }
    reg_ = out;
    return out;
  }

  ExceptionalSets exceptional() {
    const LocalSets& l = sa_.local_sets();
    ExceptionalSets x;
    x.E = spec_.space - l.coarser;
    x.A = spec_.space - (l.coarser & l.finer);
    if (x.E.finite()) x.G = x.E;
    return x;
  }

  std::vector<Ray> rays_at(const Rational& a) {
    std::vector<Ray> out;
    for (const auto& b : sa_.shadows_at(a)) {
      if (b == a) continue;
      if (sa_.contains_right_of(a, b)) out.push_back({a, b, RaySide::Left, host(b, true)});
      if (sa_.contains_left_of(a, b)) out.push_back({a, b, RaySide::Right, host(b, false)});
    }
    return out;
  }

  RayReport rays() {
    RayReport r;
    ExceptionalSets ex = exceptional();
    for (const auto& c : ex.A.components()) {
      if (!c.is_point()) continue;
      for (auto& ray : rays_at(c.lo)) r.rays.push_back(ray);
    }
    return r;
  }

  bool condition4() {
    SemilinearSet g = finite_part(exceptional().E);
    for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
      std::string e = m_.fresh(), z = m_.fresh(), gm = m_.fresh(), w = m_.fresh();
      LinFormula leaks = LinFormula::exists(
          w, m_.in_space(w) && lt(V(z) - V(gm), V(w)) && lt(V(w), V(z) + V(gm)) &&
                 !m_.member(i, "a", e, w));
      LinFormula not_affine_open = LinFormula::exists(
          z, m_.member(i, "a", e, z) && !in_set(z, g) &&
                 LinFormula::forall(gm, implies(gt(V(gm), 0), leaks)));
      LinFormula bad = m_.in_cell(i, "a") && !in_set("a", g) &&
                       LinFormula::exists(e, m_.domain(i, "a", e) && not_affine_open);
      if (decide_sentence(LinFormula::exists("a", bad))) return false;
    }
    return true;
  }

  std::optional<ClopenWitness> clopen_witness(std::size_t cell) {
    if (spec_.cells[cell].is_point()) return std::nullopt;
    SemilinearSet E = exceptional().E;
    for (const auto& sc : sa_.generic(cell).subcells) {
      SemilinearSet piece = SemilinearSet::open(sc.lo, sc.hi);
      if (!piece.is_subset_of(E)) continue;
      PointClass pc = sa_.classify_point(midpoint(sc.lo, sc.hi));
      if (pc != PointClass::LocallyLeftClosed && pc != PointClass::LocallyRightClosed) continue;
      if (sc.functions.size() > 2) continue;
      bool left_closed = pc == PointClass::LocallyLeftClosed;
      Rational a = sc.lo + (sc.hi - sc.lo) / 4;
      Rational a2 = sc.lo + (sc.hi - sc.lo) / 2;
      SemilinearSet first = SemilinearSet::interval(a, a2, left_closed, !left_closed);
      std::vector<SemilinearSet> variants;
      if (sc.functions.size() == 1) {
        variants.push_back(first);
        variants.push_back(SemilinearSet::interval(a, a2, !left_closed, left_closed));
      } else {
        const AffineExpr& f = sc.functions[1];
        Rational u = f.eval(a, 0), v = f.eval(a2, 0);
        if (u == v) continue;
        Rational lo = std::min(u, v), hi = std::max(u, v);
        // opposite orientation first, then the rest of the grammar
        std::vector<std::pair<bool, bool>> ends{{!left_closed, left_closed},
                                                {left_closed, !left_closed},
                                                {true, true},
                                                {false, false}};
        for (auto [lc, rc] : ends) variants.push_back(first | SemilinearSet::interval(lo, hi, lc, rc));
      }
      std::optional<ClopenWitness> best;
      for (const auto& z : variants) {
        if (!z.is_subset_of(spec_.space) || z == spec_.space) continue;
        ClopenWitness w = certify(z, cell);
        if (w.certified()) return w;
        if (!best) best = w;
      }
      if (best) return best;
    }
    return std::nullopt;
  }

  Components components() {
    if (!hausdorff().hausdorff) throw DomainError("components need a Hausdorff topology");
    Components out;
    ExceptionalSets ex = exceptional();
    if (ex.E.finite()) {
      out.finite = true;
      const auto& sites = sa_.sites();
      std::vector<SemilinearSet> sets, closures;
      for (const auto& s : sites) {
        sets.push_back(s.as_set());
        closures.push_back(sa_.closure(s.as_set()));
      }
      UnionFind uf(sites.size());
      for (std::size_t x = 0; x < sites.size(); ++x)
        for (std::size_t y = 0; y < sites.size(); ++y)
          if (x != y && !(closures[x] & sets[y]).empty()) uf.join(x, y);
      std::vector<SemilinearSet> parts;
      std::vector<std::size_t> roots;
      for (std::size_t x = 0; x < sites.size(); ++x) {
        std::size_t r = uf.find(x);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
          roots.push_back(r);
          parts.push_back(sets[x]);
        } else {
          parts[it - roots.begin()] = parts[it - roots.begin()] | sets[x];
        }
      }
      std::sort(parts.begin(), parts.end(), [](const SemilinearSet& p, const SemilinearSet& q) {
        return p.min_coordinate() < q.min_coordinate();
      });
      for (const auto& p : parts) {
        SemilinearSet rest = spec_.space - p;
        bool ok = sa_.closure(p) == p && (rest.empty() || sa_.closure(rest) == rest);
        out.parts.push_back(p);
        out.certified.push_back(ok);
      }
      return out;
    }
    for (const auto& s : sa_.sites()) {
      if (s.is_point || !s.as_set().is_subset_of(ex.E)) continue;
      out.intervals.push_back(disconnected(s));
    }
    for (std::size_t i = 0; i < spec_.cells.size() && !out.clopen; ++i) {
      auto w = clopen_witness(i);
      if (w && w->certified()) out.clopen = w;
    }
    return out;
  }

  Verdict verdict(bool with_components) {
    Verdict v;
    v.hausdorff = hausdorff();
    if (!v.hausdorff.hausdorff) return v;
    v.regular = regularity();
    v.exceptional = exceptional();
    v.rays = rays();
    v.affinizable = v.exceptional->E.finite();
    v.conditions.c3 = v.affinizable;
    v.conditions.c4 = condition4();
    if (with_components) {
      v.components = components();
      bool finite = v.components->finite;
      v.conditions.regular_and_finite_components = v.regular->regular && finite;
      const LocalSets& l = sa_.local_sets();
      SemilinearSet isolated = spec_.space - (l.left | l.right);
      SemilinearSet one_sided = (l.left - l.right) | (l.right - l.left);
      SemilinearSet half = (l.finer & one_sided) - l.coarser;
      v.conditions.isolated_halfclosed_components = isolated.finite() && half.finite() && finite;
    }
    return v;
  }

 private:
  // open cell holding points just right (or just left) of b
  std::size_t host(const Rational& b, bool right_of) {
    for (std::size_t k = 0; k < spec_.cells.size(); ++k) {
      const Cell& c = spec_.cells[k];
      if (c.is_point()) continue;
      if (right_of ? (c.lo <= b && b < c.hi) : (c.lo < b && b <= c.hi)) return k;
    }
    throw Error("ray at " + to_string(b) + " has no host cell");
  }

  ClopenWitness certify(const SemilinearSet& z, std::size_t cell) {
    ClopenWitness w;
    w.Z = z;
    w.cell = cell;
    w.closure_equals_z = sa_.closure(z) == z;
    SemilinearSet rest = spec_.space - z;
    w.is_open = sa_.closure(rest) == rest;
    return w;
  }

  DisconnectedInterval disconnected(const Site& s) {
    DisconnectedInterval d{s.lo, s.hi, sa_.classify_point(s.representative()), false};
    if (d.cls == PointClass::LocallyEuclidean) return d;
    std::size_t i = s.cell;
    std::string e = m_.fresh(), g = m_.fresh(), z = m_.fresh();
    LinFormula window;
    switch (d.cls) {
      case PointClass::LocallyIsolated: window = eq(V(z), V("a")); break;
      case PointClass::LocallyRightClosed: window = lt(V("a") - V(g), V(z)) && le(V(z), V("a")); break;
      default: window = le(V("a"), V(z)) && lt(V(z), V("a") + V(g)); break;
    }
    LinFormula in_j = lt(LinTerm(s.lo), V(z)) && lt(V(z), LinTerm(s.hi));
    LinFormula f = LinFormula::forall(
        "a", implies(lt(LinTerm(s.lo), V("a")) && lt(V("a"), LinTerm(s.hi)),
                     LinFormula::forall(
                         g, implies(gt(V(g), 0),
                                    LinFormula::exists(
                                        e, m_.domain(i, "a", e) &&
                                               LinFormula::forall(
                                                   z, implies(in_j && m_.member(i, "a", e, z),
                                                              window)))))));
    d.verified = decide_sentence(f);
    return d;
  }

  TopologySpec spec_;
  Model m_;
  ShadowAnalysis sa_;
  DecideOptions opts_;
  std::optional<HausdorffResult> haus_;
  std::optional<RegularityResult> reg_;
};

}  // namespace detail

Decider::Decider(const TopologySpec& spec, DecideOptions opts)
    : e_(std::make_unique<detail::DecideEngine>(spec, opts)) {}
Decider::~Decider() = default;
Decider::Decider(Decider&&) noexcept = default;
Decider& Decider::operator=(Decider&&) noexcept = default;

const TopologySpec& Decider::spec() const { return e_->spec(); }
const ShadowAnalysis& Decider::shadows() const { return e_->shadows(); }
HausdorffResult Decider::hausdorff() const { return e_->hausdorff(); }
RegularityResult Decider::regularity() const { return e_->regularity(); }
ExceptionalSets Decider::exceptional() const { return e_->exceptional(); }
RayReport Decider::rays() const { return e_->rays(); }
std::vector<Ray> Decider::rays_at(const Rational& a) const { return e_->rays_at(a); }
bool Decider::condition4() const { return e_->condition4(); }
Components Decider::components() const { return e_->components(); }
std::optional<ClopenWitness> Decider::clopen_witness(std::size_t cell) const {
  return e_->clopen_witness(cell);
}
Verdict Decider::verdict(bool with_components) const { return e_->verdict(with_components); }

HausdorffResult check_hausdorff(const TopologySpec& spec) { return Decider(spec).hausdorff(); }
RegularityResult check_regularity(const TopologySpec& spec) { return Decider(spec).regularity(); }
std::pair<ExceptionalSets, RayReport> exceptional_sets(const TopologySpec& spec) {
  Decider d(spec);
  return {d.exceptional(), d.rays()};
}
Verdict decide_affinizable(const TopologySpec& spec) { return Decider(spec).verdict(false); }
Components components(const TopologySpec& spec) { return Decider(spec).components(); }
std::optional<ClopenWitness> clopen_witness(const TopologySpec& spec, std::size_t cell) {
  return Decider(spec).clopen_witness(cell);
}
Verdict analyze(const TopologySpec& spec, DecideOptions opts) {
  return Decider(spec, opts).verdict(true);
}

}  // namespace deftop

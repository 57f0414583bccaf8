#include "deftop/embed.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "compile.hpp"
#include "deftop/error.hpp"

namespace deftop {

std::string Point3::str() const {
  return "(" + to_string(x) + ", " + to_string(y) + ", " + to_string(z) + ")";
}

Rational NormalizedSpec::forward(const Rational& x) const {
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i] == x) return h_image[i];
  for (const auto& [q, r] : intervals)
    if (q < x && x < r) return x;
  throw DomainError("forward: " + to_string(x) + " is not in X");
}

Rational NormalizedSpec::inverse(const Rational& y) const {
  for (std::size_t i = 0; i < h_image.size(); ++i)
    if (h_image[i] == y) return h[i];
  for (const auto& [q, r] : intervals)
    if (q < y && y < r) return y;
  throw DomainError("inverse: " + to_string(y) + " is not in the normalized space");
}

namespace {

Point3 lerp(const Point3& u, const Point3& v, const Rational& s) {
  return {Rational(u.x + (v.x - u.x) * s), Rational(u.y + (v.y - u.y) * s),
          Rational(u.z + (v.z - u.z) * s)};
}

}  // namespace

Point3 Curve::at(const Rational& t) const {
  if (!(q < t && t < r)) throw DomainError("curve parameter " + to_string(t) + " out of range");
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const auto& [t0, v0] = vertices[s];
    const auto& [t1, v1] = vertices[s + 1];
    if (t0 <= t && t <= t1) return lerp(v0, v1, Rational((t - t0) / (t1 - t0)));
  }
  throw Error("curve vertices do not cover " + to_string(t));
}

Point3 Embedding::image(const Rational& x) const {
  for (const auto& a : anchors)
    if (a.h == x) return a.at;
  for (const auto& c : curves)
    if (c.q < x && x < c.r) return c.at(x);
  throw DomainError("image: " + to_string(x) + " is not in X");
}

std::optional<Rational> Embedding::preimage(const Point3& p) const {
  for (const auto& a : anchors)
    if (a.at == p) return a.h;
  for (const auto& c : curves) {
    for (std::size_t s = 0; s + 1 < c.vertices.size(); ++s) {
      const auto& [t0, v0] = c.vertices[s];
      const auto& [t1, v1] = c.vertices[s + 1];
      Point3 d{Rational(v1.x - v0.x), Rational(v1.y - v0.y), Rational(v1.z - v0.z)};
      Rational sc;
      if (d.x != 0) sc = (p.x - v0.x) / d.x;
      else if (d.y != 0) sc = (p.y - v0.y) / d.y;
      else if (d.z != 0) sc = (p.z - v0.z) / d.z;
      else continue;
      if (sc < 0 || sc > 1 || !(lerp(v0, v1, sc) == p)) continue;
      Rational t = t0 + (t1 - t0) * sc;
      if (c.q < t && t < c.r) return t;
    }
  }
  return std::nullopt;
}

std::size_t Embedding::attachments(std::size_t anchor) const {
  std::size_t n = 0;
  for (const auto& c : curves) {
    if (c.left_anchor == anchor) ++n;
    if (c.right_anchor == anchor) ++n;
  }
  return n;
}

namespace {

bool starts_inside(const AffineExpr& lo, bool closed, const Rational& p) {
  return lo.constant < p || (lo.constant == p && (lo.coef_eps < 0 || (lo.coef_eps == 0 && closed)));
}

bool ends_inside(const AffineExpr& hi, bool closed, const Rational& p) {
  return p < hi.constant || (p == hi.constant && (hi.coef_eps > 0 || (hi.coef_eps == 0 && closed)));
}

// The pieces of N(h, eps) with every point of H replaced by its image.
std::vector<IntervalPiece> transport(const std::vector<IntervalPiece>& pieces, const Rational& at,
                                     const std::map<Rational, Rational>& image) {
  std::vector<IntervalPiece> out;
  for (const auto& raw : pieces) {
    IntervalPiece p = raw;
    p.lo = p.lo.bind_a(at);
    p.hi = p.hi.bind_a(at);
    if (p.is_singleton()) {
      auto it = image.find(p.at().constant);
      if (p.at().coef_eps == 0 && it != image.end())
        out.push_back(IntervalPiece::singleton(AffineExpr::constant_of(it->second)));
      else
        out.push_back(p);
      continue;
    }
    std::vector<Rational> inside;
    for (const auto& [q, img] : image)
      if (starts_inside(p.lo, p.left_closed, q) && ends_inside(p.hi, p.right_closed, q))
        inside.push_back(q);
    if (inside.empty()) {
      out.push_back(p);
      continue;
    }
    AffineExpr lo = p.lo;
    bool lc = p.left_closed;
    for (const auto& q : inside) {
      AffineExpr end = AffineExpr::constant_of(q);
      if (lo != end) out.push_back(IntervalPiece::interval(lo, end, lc, false));
      out.push_back(IntervalPiece::singleton(AffineExpr::constant_of(image.at(q))));
      lo = end;
      lc = false;
    }
    if (lo != p.hi) out.push_back(IntervalPiece::interval(lo, p.hi, lc, p.right_closed));
  }
  return out;
}

NormalizedSpec normalize(const ShadowAnalysis& sa, const ExceptionalSets& ex) {
  const TopologySpec& spec = sa.spec();
  if (!ex.G) throw DomainError("normalize: E = " + ex.E.str() + " is infinite");
  if (!ex.A.finite()) throw DomainError("normalize: A = " + ex.A.str() + " is infinite");

  std::set<Rational> hs;
  NormalizedSpec n;
  for (const auto& s : sa.sites()) {
    if (s.is_point) hs.insert(s.lo);
    else n.intervals.emplace_back(s.lo, s.hi);
  }
  for (const auto& q : ex.G->as_points()) hs.insert(q);
  for (const auto& q : ex.A.as_points()) hs.insert(q);
  for (const auto& q : hs)
    for (const auto& [lo, hi] : n.intervals)
      if (lo < q && q < hi) throw Error("normalize: " + to_string(q) + " lies inside an interval site");

  n.h.assign(hs.begin(), hs.end());
  Rational t = spec.space.max_coordinate() + 1;
  std::map<Rational, Rational> image;
  for (std::size_t i = 0; i < n.h.size(); ++i) {
    n.h_image.push_back(t + static_cast<long>(i + 1));
    image[n.h[i]] = n.h_image.back();
  }

  TopologySpec& out = n.spec;
  std::vector<Component> comps;
  for (const auto& [lo, hi] : n.intervals) {
    out.cells.push_back(Cell::open(lo, hi, "a"));
    NbhdTemplate tpl;
    tpl.owner = out.cells.size() - 1;
    tpl.pieces.push_back(IntervalPiece::interval({1, -1, 0}, {1, 1, 0}, false, false));
    out.templates.push_back(tpl);
    comps.push_back(Component::interval(lo, hi));
  }
  for (std::size_t i = 0; i < n.h.size(); ++i) {
    out.cells.push_back(Cell::isol(n.h_image[i], "h"));
    NbhdTemplate tpl;
    tpl.owner = out.cells.size() - 1;
    std::size_t c = spec.cell_of(n.h[i]);
    tpl.pieces = transport(spec.templates[c].pieces, n.h[i], image);
    out.templates.push_back(tpl);
    comps.push_back(Component::point(n.h_image[i]));
  }
  out.space = canonicalize(comps);

  ValidationReport r = validate(out);
  if (!r.ok) {
    std::string msg = "normalized spec failed validation:";
    for (const auto& f : r.failures) msg += " " + f.check + " (" + f.detail + ")";
    throw Error(msg);
  }
  n.spec = std::move(*r.spec);
  return n;
}

struct Gluing {
  std::size_t anchor;
  std::size_t curve;
  bool left_end;
};

}  // namespace

NormalizedSpec normalize_isolate(const TopologySpec& spec, const ExceptionalSets& exceptional) {
  ShadowAnalysis sa(spec);
  return normalize(sa, exceptional);
}

NormalizedSpec normalize_isolate(const Decider& d) { return normalize(d.shadows(), d.exceptional()); }

Embedding build_embedding(const NormalizedSpec& n, const RayReport& rays) {
  const std::size_t k = n.intervals.size();
  const std::size_t na = n.h.size();

  auto curve_at = [&](const Rational& e, bool left_end) -> std::size_t {
    for (std::size_t j = 0; j < k; ++j)
      if ((left_end ? n.intervals[j].first : n.intervals[j].second) == e) return j;
    throw DomainError("no interval has " + std::string(left_end ? "left" : "right") + " end " +
                      to_string(e));
  };

  std::vector<Gluing> glue;
  for (std::size_t i = 0; i < na; ++i) {
    const NbhdTemplate& tpl = n.spec.templates[k + i];
    for (const auto& p : tpl.pieces) {
      if (p.is_singleton()) {
        if (p.at().constant != n.h_image[i] || p.at().coef_eps != 0)
          throw DomainError("neighborhood of " + to_string(n.h[i]) + " has a stray point");
        continue;
      }
      const Rational &lo = p.lo.constant, &hi = p.hi.constant;
      if (lo != hi)
        throw DomainError("neighborhoods of " + to_string(n.h[i]) + " keep " + p.str("h") +
                          " for every eps");
      if (p.lo.coef_eps == 0) glue.push_back({i, curve_at(lo, true), true});
      else if (p.hi.coef_eps == 0) glue.push_back({i, curve_at(hi, false), false});
      else throw DomainError("neighborhoods of " + to_string(n.h[i]) + " surround " + to_string(lo));
    }
  }

  for (const auto& ray : rays.rays) {
    auto hit = std::find(n.h.begin(), n.h.end(), ray.point);
    if (hit == n.h.end()) throw Error("ray at " + to_string(ray.point) + " has no anchor");
    std::size_t i = static_cast<std::size_t>(hit - n.h.begin());
    bool left = ray.side == RaySide::Left;
    std::size_t j = curve_at(ray.end, left);
    bool found = std::any_of(glue.begin(), glue.end(), [&](const Gluing& g) {
      return g.anchor == i && g.curve == j && g.left_end == left;
    });
    if (!found) throw Error("ray " + ray.str() + " at " + to_string(ray.point) + " is not realized");
  }

  Embedding emb;
  std::vector<std::optional<std::size_t>> left(k), right(k);
  for (const auto& g : glue) {
    auto& slot = g.left_end ? left[g.curve] : right[g.curve];
    if (slot && *slot != g.anchor)
      throw DomainError("an end of (" + to_string(n.intervals[g.curve].first) + "," +
                        to_string(n.intervals[g.curve].second) + ") is glued to two points");
    slot = g.anchor;
  }

  Rational min_len = 1;
  for (std::size_t j = 0; j < k; ++j) {
    Rational len = n.intervals[j].second - n.intervals[j].first;
    if (j == 0 || len < min_len) min_len = len;
  }
  emb.sigma = (k > 0 && na > 0) ? Rational(min_len / static_cast<long>(2 * k * na)) : Rational(1);
  for (std::size_t i = 0; i < na; ++i)
    emb.anchors.push_back({n.h[i], {Rational(emb.sigma * static_cast<long>(i)), 0, 0}});

  for (std::size_t j = 0; j < k; ++j) {
    Curve c;
    c.q = n.intervals[j].first;
    c.r = n.intervals[j].second;
    c.left_anchor = left[j];
    c.right_anchor = right[j];
    Rational lam_l = static_cast<long>(2 * j), lam_r = static_cast<long>(2 * j + 1);
    Rational third = (c.r - c.q) / 3;
    if (!left[j] && !right[j]) {
      c.vertices = {{c.q, {c.q, 1, lam_l}}, {c.r, {c.r, 1, lam_l}}};
    } else {
      if (left[j]) {
        const Rational& p = emb.anchors[*left[j]].at.x;
        c.vertices.push_back({c.q, {p, 0, 0}});
        c.vertices.push_back({Rational(c.q + third), {p, 1, lam_l}});
      } else {
        c.vertices.push_back({c.q, {c.q, 1, lam_l}});
      }
      if (right[j]) {
        const Rational& p = emb.anchors[*right[j]].at.x;
        c.vertices.push_back({Rational(c.r - third), {p, 1, lam_r}});
        c.vertices.push_back({c.r, {p, 0, 0}});
      } else {
        c.vertices.push_back({c.r, {c.r, 1, lam_r}});
      }
    }
    emb.curves.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < na; ++i)
    if (emb.attachments(i) > 4)
      throw DomainError("point " + to_string(n.h[i]) + " hosts more than four ray ends");
  return emb;
}

namespace {

const Rational& pick_coord(const Point3& p, int c) { return c == 0 ? p.x : c == 1 ? p.y : p.z; }

const Rational kMaxGamma = rat(1, 2);

// z in X and |f(z) - f(a)|_inf < g, for g <= kMaxGamma; pieces of the
// embedding farther than that from f(a) are left out.
LinFormula preimage_ball(const Embedding& emb, const Point3& fa) {
  std::vector<LinFormula> alts;
  LinTerm g = LinTerm::var("g"), z = LinTerm::var("z");
  for (const auto& an : emb.anchors) {
    std::vector<LinFormula> parts{eq(z, LinTerm(an.h))};
    bool near = true;
    for (int c = 0; c < 3; ++c) {
      Rational d = pick_coord(an.at, c) - pick_coord(fa, c);
      if (abs(d) >= kMaxGamma) near = false;
      parts.push_back(lt(LinTerm(d), g));
      parts.push_back(lt(LinTerm(Rational(-d)), g));
    }
    if (near) alts.push_back(LinFormula::conj(parts));
  }
  for (const auto& cv : emb.curves) {
    for (std::size_t s = 0; s + 1 < cv.vertices.size(); ++s) {
      const auto& [t0, v0] = cv.vertices[s];
      const auto& [t1, v1] = cv.vertices[s + 1];
      Rational lo = t0, hi = t1;
      bool lo_open = s == 0, hi_open = s + 2 == cv.vertices.size();
      std::vector<LinFormula> parts;
      bool near = true;
      for (int c = 0; c < 3 && near; ++c) {
        Rational slope = (pick_coord(v1, c) - pick_coord(v0, c)) / (t1 - t0);
        Rational base = pick_coord(v0, c) - slope * t0 - pick_coord(fa, c);
        LinTerm diff = z * slope + LinTerm(base);
        parts.push_back(lt(diff, g));
        parts.push_back(lt(-diff, g));
        if (slope == 0) {
          if (abs(base) >= kMaxGamma) near = false;
          continue;
        }
        Rational u = (-kMaxGamma - base) / slope, v = (kMaxGamma - base) / slope;
        if (v < u) std::swap(u, v);
        if (u >= lo) lo = u, lo_open = true;
        if (v <= hi) hi = v, hi_open = true;
      }
      if (!near || lo > hi || (lo == hi && (lo_open || hi_open))) continue;
      parts.push_back(lo_open ? lt(LinTerm(lo), z) : le(LinTerm(lo), z));
      parts.push_back(hi_open ? lt(z, LinTerm(hi)) : le(z, LinTerm(hi)));
      alts.push_back(LinFormula::conj(parts));
    }
  }
  return LinFormula::disj(alts);
}

}  // namespace

Certificate verify_embedding(const TopologySpec& spec, const Embedding& emb, int schedule_depth) {
  require_validated(spec);
  detail::Model m(spec);
  Certificate cert;

  std::vector<Rational> samples;
  for (const auto& an : emb.anchors) samples.push_back(an.h);
  for (const auto& c : emb.curves)
    for (long i = 1; i <= 7; ++i) samples.push_back(c.q + (c.r - c.q) * rat(i, 8));

  auto record = [&](CertificateEntry e) {
    if (!e.ok) {
      cert.ok = false;
      if (!cert.failure) cert.failure = e;
    }
    cert.entries.push_back(std::move(e));
  };

  for (const auto& a : samples) {
    std::size_t i = spec.cell_of(a);
    Point3 fa = emb.image(a);
    LinFormula ball = preimage_ball(emb, fa);
    const LinFormula& dom = spec.eps_domain[i];

    LinFormula covers = eliminate_quantifiers(
        (lt(LinTerm(0), LinTerm::var("g")) && le(LinTerm::var("g"), LinTerm(kMaxGamma)) &&
         LinFormula::forall("z", implies(ball, m.member(i, "a", "eps", "z"))))
            .substitute("a", LinTerm(a)));
    LinFormula small = eliminate_quantifiers(
        (dom && LinFormula::forall("z", implies(m.member(i, "a", "eps", "z"), ball)))
            .substitute("a", LinTerm(a)));

    // (i) the image of N(a,eps) contains a ball around f(a)
    for (int k = 1; k <= schedule_depth; ++k) {
      Rational eps = pow2_neg(static_cast<unsigned>(k));
      if (!dom.eval({{"a", a}, {"eps", eps}})) continue;
      SemilinearSet gs = solution_set_1d(covers.substitute("eps", LinTerm(eps)), "g");
      CertificateEntry e{a, eps, 0, 1, !gs.empty()};
      if (e.ok) e.gamma = detail::pick(gs, pow2_neg(static_cast<unsigned>(k)));
      record(e);
    }

    // (ii) every ball around f(a) contains the image of some N(a,eps')
    for (int k = 1; k <= schedule_depth; ++k) {
      Rational g = pow2_neg(static_cast<unsigned>(k));
      SemilinearSet es = solution_set_1d(small.substitute("g", LinTerm(g)), "eps");
      CertificateEntry e{a, 0, g, 2, !es.empty()};
      if (e.ok) e.eps = detail::pick(es);
      record(e);
    }
  }
  return cert;
}

Embedding detach_end(const Embedding& emb, std::size_t curve, bool left_end) {
  Embedding out = emb;
  Curve& c = out.curves.at(curve);
  auto& slot = left_end ? c.left_anchor : c.right_anchor;
  if (!slot) throw DomainError("that end is already free");
  slot.reset();
  Rational lam = left_end ? c.vertices[1].second.z : c.vertices[c.vertices.size() - 2].second.z;
  if (left_end) {
    c.vertices.erase(c.vertices.begin(), c.vertices.begin() + 2);
    c.vertices.insert(c.vertices.begin(), {c.q, {c.q, 1, lam}});
  } else {
    c.vertices.erase(c.vertices.end() - 2, c.vertices.end());
    c.vertices.push_back({c.r, {c.r, 1, lam}});
  }
  return out;
}

EmbedResult embed(const Decider& d, int schedule_depth) {
  EmbedResult r{normalize_isolate(d), {}, {}};
  r.embedding = build_embedding(r.normalized, d.rays());
  r.certificate = verify_embedding(d.spec(), r.embedding, schedule_depth);
  return r;
}

}  // namespace deftop

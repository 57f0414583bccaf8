#include "deftop/report.hpp"

namespace deftop {

namespace {

Json q(const Rational& r) { return to_string(r); }

Json qs(const std::vector<Rational>& rs) {
  Json a = Json::array();
  for (const auto& r : rs) a.push_back(q(r));
  return a;
}

Json point(const Point3& p) { return Json::array({q(p.x), q(p.y), q(p.z)}); }

Json clopen_json(const ClopenWitness& w) {
  return {{"Z", w.Z.str()},
          {"cell", w.cell},
          {"is_open", w.is_open},
          {"closure_equals_Z", w.closure_equals_z},
          {"certified", w.certified()}};
}

Json interval_json(const DisconnectedInterval& d) {
  return {{"interval", "(" + to_string(d.lo) + "," + to_string(d.hi) + ")"},
          {"class", to_string(d.cls)},
          {"verified", d.verified}};
}

Json ray_json(const Ray& r) {
  return {{"point", q(r.point)},
          {"ray", r.str()},
          {"end", q(r.end)},
          {"side", r.side == RaySide::Left ? "left" : "right"},
          {"host_cell", r.host_cell}};
}

}  // namespace

Json to_json(const ValidationReport& r) {
  Json fs = Json::array();
  for (const auto& f : r.failures) {
    Json w = Json::object();
    for (const auto& [k, v] : f.witness) w[k] = q(v);
    fs.push_back({{"check", f.check}, {"witness", w}, {"detail", f.detail}});
  }
  return {{"ok", r.ok}, {"failures", fs}};
}

Json to_json(const Components& c) {
  Json j = {{"finite", c.finite}};
  if (c.finite) {
    Json parts = Json::array();
    for (std::size_t i = 0; i < c.parts.size(); ++i)
      parts.push_back({{"set", c.parts[i].str()}, {"certified", c.certified[i]}});
    j["parts"] = parts;
  } else {
    j["result"] = "NoFiniteDecomposition";
    Json iv = Json::array();
    for (const auto& d : c.intervals) iv.push_back(interval_json(d));
    j["disconnected_intervals"] = iv;
    j["clopen"] = c.clopen ? clopen_json(*c.clopen) : Json(nullptr);
  }
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["hausdorff"] = v.hausdorff.hausdorff;
  j["regular"] = v.regular ? Json(v.regular->regular) : Json(nullptr);
  if (v.exceptional)
    j["exceptional"] = {{"E", v.exceptional->E.str()},
                        {"A", v.exceptional->A.str()},
                        {"G", v.exceptional->G ? Json(v.exceptional->G->str()) : Json(nullptr)}};
  else
    j["exceptional"] = nullptr;
  j["conditions"] = {{"c3", v.conditions.c3},
                     {"c4", v.conditions.c4},
                     {"regular_and_finite_components", v.conditions.regular_and_finite_components},
                     {"isolated_halfclosed_components", v.conditions.isolated_halfclosed_components}};
  j["affinizable"] = v.affinizable;
  j["components"] = v.components ? to_json(*v.components) : Json(nullptr);

  Json rays = Json::array();
  for (const auto& r : v.rays.rays) rays.push_back(ray_json(r));
  j["rays"] = rays;

  Json w = Json::object();
  if (v.hausdorff.witness)
    w["separation"] = {{"p", q(v.hausdorff.witness->p)}, {"q", q(v.hausdorff.witness->q)}};
  if (v.regular && v.regular->witness) {
    const auto& rw = *v.regular->witness;
    Json ref = Json::array();
    for (const auto& [d, x] : rw.refutation) ref.push_back({{"delta", q(d)}, {"x", q(x)}});
    w["regularity"] = {{"a", q(rw.a)}, {"eps", q(rw.eps)}, {"refutation", ref}};
  }
  if (v.components && !v.components->finite) {
    if (v.components->clopen) w["clopen"] = clopen_json(*v.components->clopen);
    if (!v.components->intervals.empty())
      w["disconnected_interval"] = interval_json(v.components->intervals.front());
  }
  j["witnesses"] = w;
  return j;
}

Json to_json(const ShadowMap& m) {
  Json pts = Json::array();
  for (const auto& [p, s] : m.points) pts.push_back({{"point", q(p)}, {"shadows", qs(s)}});
  Json cells = Json::array();
  for (const auto& c : m.cells) {
    Json subs = Json::array();
    for (const auto& s : c.subcells) {
      Json fs = Json::array();
      for (const auto& f : s.functions) fs.push_back(f.str("a"));
      subs.push_back({{"interval", "(" + to_string(s.lo) + "," + to_string(s.hi) + ")"},
                      {"functions", fs},
                      {"disjoint_images", s.disjoint_images}});
    }
    cells.push_back({{"cell", c.cell}, {"breakpoints", qs(c.breakpoints)}, {"subcells", subs}});
  }
  return {{"points", pts}, {"cells", cells}};
}

Json to_json(const std::vector<Comparison>& cs) {
  Json a = Json::array();
  for (const auto& c : cs)
    a.push_back({{"site", c.site.str()},
                 {"coarser", c.coarser},
                 {"finer", c.finer},
                 {"basis", to_string(c.basis)}});
  return a;
}

Json to_json(const NormalizedSpec& n) {
  Json iv = Json::array();
  for (const auto& [lo, hi] : n.intervals) iv.push_back(Json::array({q(lo), q(hi)}));
  return {{"H", qs(n.h)}, {"H_image", qs(n.h_image)}, {"intervals", iv}, {"spec", emit(n.spec)}};
}

Json to_json(const Embedding& e) {
  Json anchors = Json::array();
  for (const auto& a : e.anchors) anchors.push_back({{"h", q(a.h)}, {"at", point(a.at)}});
  Json curves = Json::array(), table = Json::array(), map = Json::array();
  for (std::size_t j = 0; j < e.curves.size(); ++j) {
    const Curve& c = e.curves[j];
    Json vs = Json::array();
    for (const auto& [t, v] : c.vertices) vs.push_back({{"t", q(t)}, {"at", point(v)}});
    auto anchor = [](const std::optional<std::size_t>& a) { return a ? Json(*a) : Json(nullptr); };
    curves.push_back({{"interval", Json::array({q(c.q), q(c.r)})},
                      {"vertices", vs},
                      {"left_anchor", anchor(c.left_anchor)},
                      {"right_anchor", anchor(c.right_anchor)},
                      {"loop", c.loop()}});
    if (c.left_anchor) table.push_back({{"curve", j}, {"end", "left"}, {"anchor", *c.left_anchor}});
    if (c.right_anchor) table.push_back({{"curve", j}, {"end", "right"}, {"anchor", *c.right_anchor}});
    Json pieces = Json::array();
    for (std::size_t s = 0; s + 1 < c.vertices.size(); ++s) {
      const auto& [t0, v0] = c.vertices[s];
      const auto& [t1, v1] = c.vertices[s + 1];
      Json coords = Json::array();
      for (int k = 0; k < 3; ++k) {
        const Rational& a0 = k == 0 ? v0.x : k == 1 ? v0.y : v0.z;
        const Rational& a1 = k == 0 ? v1.x : k == 1 ? v1.y : v1.z;
        Rational slope = (a1 - a0) / (t1 - t0);
        coords.push_back(AffineExpr{slope, 0, Rational(a0 - slope * t0)}.str("t"));
      }
      pieces.push_back({{"t", Json::array({q(t0), q(t1)})}, {"map", coords}});
    }
    map.push_back({{"interval", Json::array({q(c.q), q(c.r)})}, {"pieces", pieces}});
  }
  return {{"k", e.curves.size()}, {"sigma", q(e.sigma)}, {"anchors", anchors},
          {"curves", curves},     {"attachments", table},  {"map", map}};
}

Json to_json(const Certificate& c) {
  auto entry = [](const CertificateEntry& e) {
    return Json{{"a", q(e.a)}, {"eps", q(e.eps)}, {"gamma", q(e.gamma)},
                {"direction", e.direction == 1 ? "i" : "ii"}, {"ok", e.ok}};
  };
  Json es = Json::array();
  for (const auto& e : c.entries) es.push_back(entry(e));
  return {{"ok", c.ok}, {"failure", c.failure ? entry(*c.failure) : Json(nullptr)}, {"entries", es}};
}

Json to_json(const OracleReport& r) {
  Json ds = Json::array();
  for (const auto& d : r.discrepancies)
    ds.push_back({{"check", d.check},
                  {"location", d.location},
                  {"symbolic", d.symbolic},
                  {"sampled", d.sampled}});
  Json checks = Json::object();
  for (const auto& [k, n] : r.checks) checks[k] = n;
  return {{"resolution", r.resolution},
          {"schedule", qs(r.schedule)},
          {"checks", checks},
          {"discrepancies", ds}};
}

}  // namespace deftop

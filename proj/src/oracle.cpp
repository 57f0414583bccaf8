#include "deftop/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "deftop/error.hpp"

namespace deftop {

namespace {

std::vector<Rational> valid_eps(const TopologySpec& spec, const Rational& p,
                                const std::vector<Rational>& schedule) {
  const LinFormula& dom = spec.eps_domain[spec.cell_of(p)];
  std::vector<Rational> out;
  for (const auto& e : schedule)
    if (dom.eval({{"a", p}, {"eps", e}})) out.push_back(e);
  return out;
}

std::string points_str(const std::vector<Rational>& ps) {
  std::string s = "{";
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", " : "") + to_string(ps[i]);
  return s + "}";
}

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

bool coin(std::mt19937_64& rng, int percent) { return static_cast<int>(rng() % 100) < percent; }

}  // namespace

SampleGrid SampleGrid::build(const ShadowAnalysis& sa, int resolution, int depth) {
  if (resolution < 1 || depth < 1) throw DomainError("resolution and depth must be at least 1");
  const TopologySpec& spec = sa.spec();
  std::set<Rational> pts;
  for (const auto& q : spec.cell_boundaries())
    if (spec.space.contains(q)) pts.insert(q);
  for (const auto& s : sa.sites())
    if (s.is_point) pts.insert(s.lo);
  Rational step = pow2_neg(static_cast<unsigned>(resolution));
  Rational lo = spec.space.min_coordinate(), hi = spec.space.max_coordinate();
  Rational q = lo / step;
  mpz_class first;
  mpz_fdiv_q(first.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  for (Rational x = Rational(first) * step; x <= hi; x += step)
    if (spec.space.contains(x)) pts.insert(x);

  SampleGrid g;
  g.resolution = resolution;
  g.points.assign(pts.begin(), pts.end());
  for (int i = 1; i <= depth; ++i) g.schedule.push_back(pow2_neg(static_cast<unsigned>(i)));
  return g;
}

ClosureComparison brute_closure(const ShadowAnalysis& sa, const SemilinearSet& z,
                                const SampleGrid& grid) {
  const TopologySpec& spec = sa.spec();
  ClosureComparison out;
  out.symbolic = sa.closure(z);
  for (const auto& p : grid.points) {
    std::vector<Rational> eps = valid_eps(spec, p, grid.schedule);
    if (eps.empty()) continue;
    bool adherent = std::all_of(eps.begin(), eps.end(), [&](const Rational& e) {
      return !(spec.neighborhood(p, e) & z).empty();
    });
    if (adherent) out.adherent.push_back(p);
    if (out.symbolic.contains(p) && !adherent) {
      Rational miss;
      for (const auto& e : eps)
        if ((spec.neighborhood(p, e) & z).empty()) {
          miss = e;
          break;
        }
      out.discrepancies.push_back({"closure", to_string(p) + " for Z = " + z.str(), "adherent",
                                   "N(p," + to_string(miss) + ") misses Z"});
    }
  }
  return out;
}

ShadowComparison brute_shadows(const ShadowAnalysis& sa, const Rational& p,
                               const std::vector<Rational>& schedule) {
  const TopologySpec& spec = sa.spec();
  ShadowComparison out;
  out.symbolic = sa.shadow_set(p);
  std::vector<Rational> eps = valid_eps(spec, p, schedule);
  if (eps.size() < 2) throw DomainError("fewer than two scheduled eps are valid at " + to_string(p));
  const Rational& e1 = eps[eps.size() - 2];
  const Rational& e2 = eps.back();

  std::vector<Component> raw;
  for (const auto& piece : spec.templates[spec.cell_of(p)].pieces) {
    SemilinearSet s1 = eval_template({piece}, p, e1), s2 = eval_template({piece}, p, e2);
    auto limit = [&](const Rational& v1, const Rational& v2) -> Rational {
      return v2 - e2 * (v1 - v2) / (e1 - e2);
    };
    Rational lo = limit(s1.min_coordinate(), s2.min_coordinate());
    Rational hi = limit(s1.max_coordinate(), s2.max_coordinate());
    raw.push_back(Component::point(lo));
    if (lo < hi) {
      raw.push_back(Component::interval(lo, hi));
      raw.push_back(Component::point(hi));
    }
  }
  out.sampled = canonicalize(raw);

  SemilinearSet meet = out.sampled;
  for (const auto& e : eps) meet = meet & affine_closure(spec.neighborhood(p, e));
  if (meet != out.sampled)
    out.discrepancies.push_back({"shadows", to_string(p), out.sampled.str(),
                                 "limits leave the closures: " + meet.str()});
  if (out.sampled != out.symbolic)
    out.discrepancies.push_back({"shadows", to_string(p), out.symbolic.str(), out.sampled.str()});
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

ComponentComparison brute_components(const Decider& d, const SampleGrid& grid) {
  const TopologySpec& spec = d.spec();
  ComponentComparison out;

  // nodes: grid points, then open gaps between consecutive coordinates that lie in X
  std::set<Rational> coords(grid.points.begin(), grid.points.end());
  for (const auto& q : spec.space.coordinates()) coords.insert(q);
  std::vector<Rational> cs(coords.begin(), coords.end());
  std::vector<SemilinearSet> node;
  std::vector<Rational> rep;
  std::vector<bool> is_point;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (std::binary_search(grid.points.begin(), grid.points.end(), cs[i])) {
      node.push_back(SemilinearSet::point(cs[i]));
      rep.push_back(cs[i]);
      is_point.push_back(true);
    }
    if (i + 1 < cs.size()) {
      SemilinearSet gap = SemilinearSet::open(cs[i], cs[i + 1]);
      if (gap.is_subset_of(spec.space)) {
        node.push_back(gap);
        rep.push_back(midpoint(cs[i], cs[i + 1]));
        is_point.push_back(false);
      }
    }
  }

  UnionFind uf(node.size());
  for (std::size_t u = 0; u < node.size(); ++u) {
    std::vector<Rational> eps = valid_eps(spec, rep[u], grid.schedule);
    if (eps.empty()) continue;
    SemilinearSet n = spec.neighborhood(rep[u], eps.back());
    for (const auto& c : n.components()) {
      Rational lo = c.lo, hi = c.is_point() ? c.lo : c.hi;
      // nodes are in order of position; skip those entirely left of c
      auto first = std::lower_bound(rep.begin(), rep.end(), lo) - rep.begin();
      std::size_t v = first > 0 ? static_cast<std::size_t>(first - 1) : 0;
      for (; v < node.size(); ++v) {
        if (node[v].min_coordinate() > hi) break;
        if (v != u && !(node[v] & n).empty()) uf.join(u, v);
      }
    }
  }

  std::map<std::size_t, std::vector<Rational>> groups;
  std::vector<std::size_t> order;
  for (std::size_t u = 0; u < node.size(); ++u) {
    if (!is_point[u]) continue;
    std::size_t r = uf.find(u);
    if (!groups.count(r)) order.push_back(r);
    groups[r].push_back(rep[u]);
  }
  for (auto r : order) out.groups.push_back(groups[r]);

  Components sym = d.components();
  out.symbolic_finite = sym.finite;
  if (!sym.finite) return out;
  out.symbolic_count = sym.parts.size();
  for (const auto& g : out.groups) {
    std::optional<std::size_t> home;
    for (const auto& p : g) {
      std::size_t k = 0;
      while (k < sym.parts.size() && !sym.parts[k].contains(p)) ++k;
      if (k == sym.parts.size()) {
        out.discrepancies.push_back({"components", to_string(p), "no component", "grid point"});
        continue;
      }
      if (!home) home = k;
      else if (*home != k) {
        out.discrepancies.push_back({"components", points_str(g),
                                     sym.parts[*home].str() + " and " + sym.parts[k].str(),
                                     "one group"});
        break;
      }
    }
  }
  return out;
}

SemilinearSet random_subset(const SemilinearSet& space, std::mt19937_64& rng) {
  static const long dens[] = {2, 3, 4, 8};
  Rational lo = space.min_coordinate(), hi = space.max_coordinate();
  auto random_coord = [&]() {
    long den = dens[draw(rng, 4)];
    Rational span = hi - lo;
    long steps = static_cast<long>(mpz_class(span * den).get_ui()) + 1;
    return Rational(lo + rat(static_cast<long>(draw(rng, static_cast<std::size_t>(steps))), den));
  };
  SemilinearSet z;
  std::size_t parts = 1 + draw(rng, 3);
  for (std::size_t i = 0; i < parts; ++i) {
    Rational a = random_coord(), b = random_coord();
    if (b < a) std::swap(a, b);
    if (a == b || coin(rng, 20)) z = z | SemilinearSet::point(a);
    else z = z | SemilinearSet::interval(a, b, coin(rng, 50), coin(rng, 50));
  }
  return z & space;
}

OracleReport run_oracle(const Decider& d, const OracleOptions& opts) {
  const ShadowAnalysis& sa = d.shadows();
  const TopologySpec& spec = d.spec();
  SampleGrid grid = SampleGrid::build(sa, opts.resolution, opts.depth);
  OracleReport r;
  r.resolution = opts.resolution;
  r.schedule = grid.schedule;
  auto take = [&](std::vector<Discrepancy>&& ds) {
    for (auto& x : ds) r.discrepancies.push_back(std::move(x));
  };

  std::mt19937_64 rng(opts.seed);
  for (int t = 0; t < opts.closure_trials; ++t) {
    SemilinearSet z = random_subset(spec.space, rng);
    ClosureComparison c = brute_closure(sa, z, grid);
    r.checks["closure"] += grid.points.size();
    take(std::move(c.discrepancies));
  }

  std::set<Rational> special;
  for (const auto& q : spec.cell_boundaries())
    if (spec.space.contains(q)) special.insert(q);
  for (const auto& s : sa.sites()) special.insert(s.representative());
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    if (special.count(grid.points[i]) ||
        i % static_cast<std::size_t>(std::max(1, opts.shadow_stride)) == 0) {
      ShadowComparison s = brute_shadows(sa, grid.points[i], grid.schedule);
      r.checks["shadows"] += 1;
      take(std::move(s.discrepancies));
    }

  if (d.hausdorff().hausdorff) {
    ComponentComparison c = brute_components(d, grid);
    if (c.symbolic_finite) r.checks["components"] += c.groups.size();
    take(std::move(c.discrepancies));
  }
  return r;
}

namespace {

std::string shift(const std::string& v, const Rational& c) {
  if (c == 0) return v;
  return v + (c > 0 ? " + " + to_string(c) : " - " + to_string(Rational(-c)));
}

struct Layout {
  bool point = false;
  Rational lo, hi;
};

std::vector<Layout> random_layout(std::mt19937_64& rng, int max_cells) {
  std::vector<Layout> cells;
  std::size_t n = 1 + draw(rng, static_cast<std::size_t>(max_cells));
  Rational x = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool prev_point = !cells.empty() && cells.back().point;
    bool point = !prev_point && !cells.empty() && coin(rng, 40);
    if (point) {
      Rational at = coin(rng, 70) ? x : Rational(x + 1);
      cells.push_back({true, at, at});
      x = at;
    } else {
      Rational lo = cells.empty() || prev_point || coin(rng, 50) ? x : Rational(x + 1);
      Rational hi = lo + static_cast<long>(1 + draw(rng, 2));
      cells.push_back({false, lo, hi});
      x = hi;
    }
  }
  return cells;
}

std::string cell_str(const Layout& c) {
  return c.point ? "{" + to_string(c.lo) + "}" : "(" + to_string(c.lo) + "," + to_string(c.hi) + ")";
}

std::string random_template(std::mt19937_64& rng, const std::vector<Layout>& cells, std::size_t i,
                            int max_pieces) {
  const Layout& c = cells[i];
  std::vector<std::string> pieces;
  std::vector<std::size_t> opens;
  for (std::size_t j = 0; j < cells.size(); ++j)
    if (!cells[j].point) opens.push_back(j);

  if (!c.point) {
    std::size_t pick = draw(rng, 100);
    if (pick < 70) pieces.push_back("(a - eps, a + eps)");
    else if (pick < 80) pieces.push_back("[a, a + eps)");
    else if (pick < 90) pieces.push_back("(a - eps, a]");
    else pieces.push_back("{a}");
    int extra = coin(rng, 65) ? 0 : static_cast<int>(1 + draw(rng, static_cast<std::size_t>(max_pieces - 1)));
    for (int k = 0; k < extra; ++k) {
      std::vector<std::size_t> targets;
      for (auto j : opens)
        if (j != i && cells[j].hi - cells[j].lo >= c.hi - c.lo) targets.push_back(j);
      if (targets.empty()) break;
      const Layout& t = cells[targets[draw(rng, targets.size())]];
      Rational off = t.lo - c.lo;
      if (t.hi - t.lo > c.hi - c.lo && coin(rng, 30)) off += rat(1, 2);
      if (c.hi + off > t.hi) off = t.lo - c.lo;
      std::string base = shift("a", off);
      std::size_t form = draw(rng, 3);
      if (form == 0) pieces.push_back("(" + base + ", " + base + " + eps)");
      else if (form == 1) pieces.push_back("(" + base + " - eps, " + base + ")");
      else pieces.push_back("[" + base + ", " + base + " + eps)");
    }
  } else {
    bool left_open = i > 0 && !cells[i - 1].point && cells[i - 1].hi == c.lo;
    bool right_open = i + 1 < cells.size() && !cells[i + 1].point && cells[i + 1].lo == c.lo;
    std::vector<std::string> bases{"{a}"};
    if (left_open && right_open) bases.push_back("(a - eps, a + eps)");
    if (right_open) bases.push_back("[a, a + eps)");
    if (left_open) bases.push_back("(a - eps, a]");
    pieces.push_back(bases[draw(rng, bases.size())]);
    int extra = coin(rng, 40) ? 0 : static_cast<int>(1 + draw(rng, static_cast<std::size_t>(max_pieces - 1)));
    for (int k = 0; k < extra && !opens.empty(); ++k) {
      const Layout& t = cells[opens[draw(rng, opens.size())]];
      if (coin(rng, 50)) pieces.push_back("(" + to_string(t.lo) + ", " + to_string(t.lo) + " + eps)");
      else pieces.push_back("(" + to_string(t.hi) + " - eps, " + to_string(t.hi) + ")");
    }
  }
  std::string s = "{ ";
  for (std::size_t k = 0; k < pieces.size(); ++k) s += (k ? ", " : "") + pieces[k];
  return s + " }";
}

}  // namespace

std::string random_spec_text(std::mt19937_64& rng, const RandomSpecOptions& opts) {
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    std::vector<Layout> cells = random_layout(rng, opts.max_cells);
    std::ostringstream os;
    os << "space { ";
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? ", " : "") << cell_str(cells[i]);
    os << " }\ntopology {\n";
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << "  on " << cell_str(cells[i]) << " at a: "
         << random_template(rng, cells, i, std::max(1, opts.max_pieces)) << ";\n";
    os << "}\n";
    std::string text = os.str();
    if (!opts.require_valid) return text;
    ValidationReport r = validate(parse_spec(text));
    if (!r.ok) continue;
    if (opts.hausdorff_only && !check_hausdorff(*r.spec).hausdorff) continue;
    return text;
  }
  throw Error("no valid random spec after " + std::to_string(opts.max_attempts) + " attempts");
}

TopologySpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& opts) {
  return load_spec(random_spec_text(rng, opts));
}

}  // namespace deftop

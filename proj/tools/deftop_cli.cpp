#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "deftop/error.hpp"
#include "deftop/report.hpp"

using namespace deftop;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kInternal = 2;

struct Config {
  std::string input;
  std::string json_out;
  int resolution = 8;
  int depth = 12;
  std::uint64_t seed = 0;
  std::string set;
  std::string at;
  std::string fixtures = "fixtures";
  std::string manifest;
  bool with_oracle = false;
};

struct Invalid {
  std::string message;
  Json report;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const Config& c, const Json& j) {
  if (c.json_out.empty()) return;
  std::ofstream out(c.json_out);
  if (!out) throw Error("cannot write " + c.json_out);
  out << j.dump(2) << "\n";
}

// parse and validate; Invalid on failure
TopologySpec load(const std::string& path) {
  TopologySpec raw;
  try {
    raw = parse_spec(read_file(path));
  } catch (const ParseError& e) {
    throw Invalid{std::string("parse error: ") + e.what(),
                  {{"ok", false}, {"parse_error", e.what()}}};
  }
  ValidationReport r = validate(raw);
  if (!r.ok) {
    std::string msg = "invalid topology:";
    for (const auto& f : r.failures) {
      msg += "\n  " + f.check + ": " + f.detail;
      if (!f.witness.empty()) {
        msg += " at";
        for (const auto& [k, v] : f.witness) msg += " " + k + "=" + to_string(v);
      }
    }
    throw Invalid{msg, to_json(r)};
  }
  return *r.spec;
}

std::string yes(bool b) { return b ? "true" : "false"; }

void print_verdict(const Verdict& v) {
  std::cout << "hausdorff: " << yes(v.hausdorff.hausdorff);
  if (v.hausdorff.witness)
    std::cout << " (cannot separate " << to_string(v.hausdorff.witness->p) << " and "
              << to_string(v.hausdorff.witness->q) << ")";
  std::cout << "\n";
  if (!v.hausdorff.hausdorff) return;
  std::cout << "regular: " << yes(v.regular->regular);
  if (v.regular->witness)
    std::cout << " (a = " << to_string(v.regular->witness->a)
              << ", eps = " << to_string(v.regular->witness->eps) << ")";
  std::cout << "\n";
  const auto& ex = *v.exceptional;
  std::cout << "E: " << ex.E.str() << "\nA: " << ex.A.str() << "\nG: " << (ex.G ? ex.G->str() : "-")
            << "\n";
  for (const auto& r : v.rays.rays)
    std::cout << "ray: " << to_string(r.point) << " " << r.str() << " in cell " << r.host_cell << "\n";
  std::cout << "conditions: c3=" << yes(v.conditions.c3) << " c4=" << yes(v.conditions.c4)
            << " regular_and_finite_components=" << yes(v.conditions.regular_and_finite_components)
            << " isolated_halfclosed_components="
            << yes(v.conditions.isolated_halfclosed_components) << "\n";
  std::cout << "affinizable: " << yes(v.affinizable) << "\n";
  if (!v.components) return;
  const auto& c = *v.components;
  if (c.finite) {
    std::cout << "components: " << c.parts.size() << "\n";
    for (std::size_t i = 0; i < c.parts.size(); ++i)
      std::cout << "  " << c.parts[i].str() << (c.certified[i] ? "" : " (uncertified)") << "\n";
  } else {
    std::cout << "components: no finite decomposition\n";
    for (const auto& d : c.intervals)
      std::cout << "  totally disconnected: (" << to_string(d.lo) << "," << to_string(d.hi) << ") "
                << to_string(d.cls) << (d.verified ? "" : " (unverified)") << "\n";
    if (c.clopen)
      std::cout << "  clopen: " << c.clopen->Z.str()
                << (c.clopen->certified() ? " (certified)" : " (uncertified)") << "\n";
  }
}

int cmd_check(const Config& c) {
  TopologySpec s = load(c.input);
  std::cout << c.input << ": valid, " << s.cells.size() << " cells\n";
  ValidationReport r;
  r.ok = true;
  write_json(c, to_json(r));
  return kOk;
}

int cmd_verdict(const Config& c, bool with_components) {
  Decider d(load(c.input), {c.depth});
  Verdict v = d.verdict(with_components);
  std::cout << c.input << "\n";
  print_verdict(v);
  write_json(c, to_json(v));
  return kOk;
}

int cmd_shadows(const Config& c) {
  ShadowAnalysis sa(load(c.input));
  Json j;
  if (!c.at.empty()) {
    Rational p = parse_rational(c.at);
    SemilinearSet s = sa.shadow_set(p);
    std::cout << "S(" << to_string(p) << ") = " << s.str() << "\n";
    j = {{"point", to_string(p)}, {"shadows", s.str()}};
  } else {
    const ShadowMap& m = sa.map();
    for (const auto& [p, s] : m.points) {
      std::cout << "S(" << to_string(p) << ") = {";
      for (std::size_t i = 0; i < s.size(); ++i) std::cout << (i ? ", " : "") << to_string(s[i]);
      std::cout << "}\n";
    }
    for (const auto& cell : m.cells)
      for (const auto& sc : cell.subcells) {
        std::cout << "on (" << to_string(sc.lo) << "," << to_string(sc.hi) << "): {";
        for (std::size_t i = 0; i < sc.functions.size(); ++i)
          std::cout << (i ? ", " : "") << sc.functions[i].str("a");
        std::cout << "}\n";
      }
    j = {{"map", to_json(m)}, {"classes", to_json(sa.affine_comparison())}};
  }
  write_json(c, j);
  return kOk;
}

int cmd_closure(const Config& c) {
  ShadowAnalysis sa(load(c.input));
  SemilinearSet z = SemilinearSet::parse(c.set);
  SemilinearSet cl = sa.closure(z);
  std::cout << "cl(" << z.str() << ") = " << cl.str() << "\n";
  write_json(c, {{"Z", z.str()}, {"closure", cl.str()}});
  return kOk;
}

int cmd_embed(const Config& c) {
  Decider d(load(c.input), {c.depth});
  EmbedResult r = embed(d, c.depth);
  std::cout << c.input << ": " << r.embedding.anchors.size() << " anchors, "
            << r.embedding.curves.size() << " curves\n";
  for (const auto& a : r.embedding.anchors)
    std::cout << "  anchor " << to_string(a.h) << " at " << a.at.str() << "\n";
  for (const auto& cv : r.embedding.curves) {
    std::cout << "  curve (" << to_string(cv.q) << "," << to_string(cv.r) << ")";
    if (cv.loop()) std::cout << " loop";
    std::cout << "\n";
  }
  std::cout << "certificate: " << (r.certificate.ok ? "pass" : "FAIL") << ", "
            << r.certificate.entries.size() << " checks\n";
  if (r.certificate.failure)
    std::cout << "  failure at a = " << to_string(r.certificate.failure->a) << ", direction "
              << (r.certificate.failure->direction == 1 ? "(i)" : "(ii)") << "\n";
  write_json(c, {{"normalized", to_json(r.normalized)},
                 {"embedding", to_json(r.embedding)},
                 {"certificate", to_json(r.certificate)}});
  return r.certificate.ok ? kOk : kInternal;
}

int cmd_oracle(const Config& c) {
  Decider d(load(c.input), {c.depth});
  OracleReport r = run_oracle(d, {c.resolution, c.depth, c.seed});
  std::cout << c.input << ": ";
  for (const auto& [k, n] : r.checks) std::cout << k << " " << n << ", ";
  std::cout << r.discrepancies.size() << " discrepancies\n";
  for (const auto& x : r.discrepancies)
    std::cout << "  " << x.check << " at " << x.location << ": symbolic " << x.symbolic
              << ", sampled " << x.sampled << "\n";
  write_json(c, to_json(r));
  return r.ok() ? kOk : kInternal;
}

// One manifest row against what the engine says; mismatches as text.
std::vector<std::string> compare(const Json& want, const Json& got) {
  std::vector<std::string> bad;
  for (const auto& [key, value] : want.items()) {
    if (!got.contains(key)) {
      bad.push_back(key + ": missing");
      continue;
    }
    if (got[key] != value) bad.push_back(key + ": expected " + value.dump() + ", got " + got[key].dump());
  }
  return bad;
}

Json observe(const std::string& path, const Json& want, const Config& c, Json& oracle) {
  Json got;
  TopologySpec spec;
  try {
    spec = load(path);
  } catch (const Invalid& inv) {
    got["valid"] = false;
    if (inv.report.contains("failures") && !inv.report["failures"].empty())
      got["failed_check"] = inv.report["failures"][0]["check"];
    return got;
  }
  got["valid"] = true;
  Decider d(spec, {c.depth});
  Verdict v = d.verdict(true);
  got["hausdorff"] = v.hausdorff.hausdorff;
  if (v.hausdorff.hausdorff) {
    got["regular"] = v.regular->regular;
    got["affinizable"] = v.affinizable;
    got["E"] = v.exceptional->E.str();
    got["A"] = v.exceptional->A.str();
    got["G"] = v.exceptional->G ? Json(v.exceptional->G->str()) : Json(nullptr);
    got["c3"] = v.conditions.c3;
    got["c4"] = v.conditions.c4;
    const Components& comp = *v.components;
    if (comp.finite) got["components"] = comp.parts.size();
    else got["components"] = "NoFiniteDecomposition";
    Json dis = Json::array();
    for (const auto& iv : comp.intervals)
      if (iv.verified) dis.push_back("(" + to_string(iv.lo) + "," + to_string(iv.hi) + ")");
    got["disconnected"] = dis;
    if (comp.clopen) {
      got["clopen"] = comp.clopen->Z.str();
      got["clopen_certified"] = comp.clopen->certified();
    }
  }
  if (want.contains("shadows")) {
    Json sh = Json::object();
    for (const auto& [p, _] : want["shadows"].items())
      sh[p] = d.shadows().shadow_set(parse_rational(p)).str();
    got["shadows"] = sh;
  }
  if (c.with_oracle) oracle = to_json(run_oracle(d, {c.resolution, c.depth, c.seed}));
  return got;
}

int cmd_suite(const Config& c) {
  std::string manifest = c.manifest.empty() ? (fs::path(c.fixtures) / "expected.json").string() : c.manifest;
  Json want_all = Json::parse(read_file(manifest));
  Json rows = Json::array();
  bool all_ok = true;
  std::size_t discrepancies = 0;
  std::printf("%-24s %-9s %-9s %-7s %-11s %-22s %s\n", "fixture", "valid", "hausdorff", "regular",
              "affinizable", "components", "result");
  for (const auto& [name, want] : want_all.items()) {
    std::string path = (fs::path(c.fixtures) / name).string();
    Json oracle;
    Json got = observe(path, want, c, oracle);
    std::vector<std::string> bad = compare(want, got);
    std::size_t disc = oracle.is_null() ? 0 : oracle["discrepancies"].size();
    discrepancies += disc;
    bool ok = bad.empty() && disc == 0;
    all_ok = all_ok && ok;
    auto cell = [&](const char* k) { return got.contains(k) ? got[k].dump() : std::string("-"); };
    std::printf("%-24s %-9s %-9s %-7s %-11s %-22s %s\n", name.c_str(), cell("valid").c_str(),
                cell("hausdorff").c_str(), cell("regular").c_str(), cell("affinizable").c_str(),
                cell("components").c_str(), ok ? "match" : "MISMATCH");
    for (const auto& b : bad) std::printf("    %s\n", b.c_str());
    if (disc) std::printf("    oracle: %zu discrepancies\n", disc);
    Json row = {{"fixture", name}, {"observed", got}, {"match", ok}, {"mismatches", bad}};
    if (!oracle.is_null()) row["oracle"] = oracle;
    rows.push_back(row);
  }
  if (c.with_oracle) std::printf("oracle: %zu discrepancies\n", discrepancies);
  write_json(c, {{"rows", rows}, {"ok", all_ok}});
  return all_ok ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide properties of definable topologies on the line"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* sub, bool needs_input = true) {
    if (needs_input) sub->add_option("input", c.input, "spec file (.top)")->required();
    sub->add_option("--json", c.json_out, "write the JSON report here");
    sub->add_option("--resolution", c.resolution, "oracle grid 2^-n")->check(CLI::PositiveNumber);
    sub->add_option("--depth", c.depth, "eps schedule 2^-1 ... 2^-n")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "seed for random oracle subsets");
  };

  auto* check = app.add_subcommand("check", "parse and validate");
  auto* analyze = app.add_subcommand("analyze", "full verdict including components");
  auto* decide = app.add_subcommand("decide", "verdict without components");
  auto* shadows = app.add_subcommand("shadows", "shadow map, or the shadows of one point");
  auto* closure = app.add_subcommand("closure", "closure of a subset of X");
  auto* emb = app.add_subcommand("embed", "embedding into Q^3 with certificate");
  auto* oracle = app.add_subcommand("oracle", "brute-force cross-check");
  auto* suite = app.add_subcommand("suite", "run every fixture against the manifest");
  for (auto* s : {check, analyze, decide, shadows, closure, emb, oracle}) common(s);
  common(suite, false);
  shadows->add_option("--at", c.at, "a point of X");
  closure->add_option("--set", c.set, "the subset, e.g. \"(0,1/8)\"")->required();
  suite->add_option("--fixtures", c.fixtures, "fixture directory");
  suite->add_option("--manifest", c.manifest, "manifest (default: <fixtures>/expected.json)");
  suite->add_flag("--with-oracle", c.with_oracle, "also run the oracle on every valid fixture");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(c);
    if (*analyze) return cmd_verdict(c, true);
    if (*decide) return cmd_verdict(c, false);
    if (*shadows) return cmd_shadows(c);
    if (*closure) return cmd_closure(c);
    if (*emb) return cmd_embed(c);
    if (*oracle) return cmd_oracle(c);
    if (*suite) return cmd_suite(c);
  } catch (const Invalid& inv) {
    std::cout << c.input << ": " << inv.message << "\n";
    try {
      write_json(c, inv.report);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
    }
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "deftop/embed.hpp"
#include "deftop/error.hpp"
#include "deftop/oracle.hpp"
#include "deftop/report.hpp"

namespace py = pybind11;
using namespace deftop;

namespace {

// Results cross the boundary as JSON text; the Python side decodes it.
std::string validate_text(const std::string& text) { return to_json(validate(parse_spec(text))).dump(); }

std::string analyze_text(const std::string& text, bool with_components, int depth) {
  Decider d(load_spec(text), {depth});
  return to_json(d.verdict(with_components)).dump();
}

std::vector<std::string> shadows_text(const std::string& text, const std::string& at) {
  ShadowAnalysis sa(load_spec(text));
  std::vector<std::string> out;
  for (const auto& r : sa.shadows_at(parse_rational(at))) out.push_back(to_string(r));
  return out;
}

std::string shadow_map_text(const std::string& text) {
  ShadowAnalysis sa(load_spec(text));
  return Json{{"map", to_json(sa.map())}, {"classes", to_json(sa.affine_comparison())}}.dump();
}

std::string closure_text(const std::string& text, const std::string& set) {
  ShadowAnalysis sa(load_spec(text));
  return sa.closure(SemilinearSet::parse(set)).str();
}

std::string embed_text(const std::string& text, int depth) {
  Decider d(load_spec(text), {depth});
  EmbedResult r = embed(d, depth);
  return Json{{"normalized", to_json(r.normalized)},
              {"embedding", to_json(r.embedding)},
              {"certificate", to_json(r.certificate)}}
      .dump();
}

std::string oracle_text(const std::string& text, int resolution, int depth, std::uint64_t seed) {
  Decider d(load_spec(text), {depth});
  return to_json(run_oracle(d, {resolution, depth, seed})).dump();
}

std::string random_text(std::uint64_t seed, int max_cells, int max_pieces) {
  std::mt19937_64 rng(seed);
  RandomSpecOptions o;
  o.max_cells = max_cells;
  o.max_pieces = max_pieces;
  return random_spec_text(rng, o);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "definable topologies on subsets of the rational line";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());

  m.def("validate", &validate_text, py::arg("text"));
  m.def("normalize_source", [](const std::string& text) { return emit(parse_spec(text)); }, py::arg("text"));
  m.def("analyze", &analyze_text, py::arg("text"), py::arg("with_components") = true, py::arg("depth") = 12);
  m.def("shadows_at", &shadows_text, py::arg("text"), py::arg("at"));
  m.def("shadow_map", &shadow_map_text, py::arg("text"));
  m.def("closure", &closure_text, py::arg("text"), py::arg("set"));
  m.def("embed", &embed_text, py::arg("text"), py::arg("depth") = 12);
  m.def("oracle", &oracle_text, py::arg("text"), py::arg("resolution") = 8, py::arg("depth") = 12,
        py::arg("seed") = 0);
  m.def("random_spec", &random_text, py::arg("seed"), py::arg("max_cells") = 4, py::arg("max_pieces") = 3);
}

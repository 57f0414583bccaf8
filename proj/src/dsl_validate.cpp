#include <algorithm>

#include "compile.hpp"
#include "deftop/dsl.hpp"
#include "deftop/error.hpp"

namespace deftop {

using detail::Model;
using detail::pick;

namespace {

LinTerm V(const std::string& n) { return LinTerm::var(n); }

// 2^-k, k = 1, 2, ...: the first member of `bad` whose double still lies in
// the core domain of a, so the witness sits well inside the valid range.
Rational pick_eps(const SemilinearSet& bad, const LinFormula& core_at_a) {
  for (int k = 1; k <= 40; ++k) {
    Rational e = pow2_neg(k);
    if (!bad.contains(e)) continue;
    if (core_at_a.eval({{"eps", e * 2}})) return e;
  }
  for (int k = 1; k <= 40; ++k)
    if (bad.contains(pow2_neg(k))) return pow2_neg(k);
  return pick(bad);
}

Rational pick_a(const Cell& c, const SemilinearSet& bad) { return pick(bad, c.midpoint()); }

class Validator {
 public:
  explicit Validator(const TopologySpec& s) : spec_(s), m_(s) {}

  ValidationReport run() {
    ValidationReport r;
    boundedness(r);
    partition(r);
    for (std::size_t i = 0; i < spec_.cells.size(); ++i) {
      if (spec_.templates[i].pieces.empty()) {
        r.failures.push_back({"membership", {{"a", spec_.cells[i].midpoint()}},
                              "empty template on " + spec_.cells[i].str()});
        continue;
      }
      membership(i, r);
      containment(i, r);
      monotonicity(i, r);
    }
    // openness is only meaningful once the basic shape is right
    if (r.failures.empty()) {
      for (std::size_t i = 0; i < spec_.cells.size(); ++i) openness(i, r);
    }
    r.ok = r.failures.empty();
    if (r.ok) {
      TopologySpec out = spec_;
      out.eps_domain.clear();
      for (std::size_t i = 0; i < spec_.cells.size(); ++i)
        out.eps_domain.push_back(m_.domain(i, "a", "eps"));
      out.validated = true;
      r.spec = std::move(out);
    }
    return r;
  }

 private:
  void boundedness(ValidationReport& r) {
    LinFormula f = LinFormula::exists(
        "m", LinFormula::forall("x", implies(m_.in_space("x"), lt(-V("m"), V("x")) &&
                                                                   lt(V("x"), V("m")))));
    if (!decide_sentence(f)) r.failures.push_back({"boundedness", {}, "X is unbounded"});
  }

  void partition(ValidationReport& r) {
    const auto& cells = spec_.cells;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = i + 1; j < cells.size(); ++j) {
        LinFormula both = m_.in_cell(i, "x") && m_.in_cell(j, "x");
        if (decide_sentence(LinFormula::exists("x", both))) {
          Rational x = pick(solution_set_1d(both, "x"));
          r.failures.push_back({"partition", {{"x", x}},
                                "cells " + cells[i].str() + " and " + cells[j].str() + " overlap"});
        }
      }
    }
    std::vector<LinFormula> any;
    for (std::size_t i = 0; i < cells.size(); ++i) any.push_back(m_.in_cell(i, "x"));
    LinFormula covered = LinFormula::disj(any);
    LinFormula gap = (m_.in_space("x") && !covered) || (covered && !m_.in_space("x"));
    if (decide_sentence(LinFormula::exists("x", gap))) {
      Rational x = pick(solution_set_1d(gap, "x"));
      r.failures.push_back({"partition", {{"x", x}},
                            "cells and X differ at " + to_string(x)});
    }
  }

  void report(ValidationReport& r, std::size_t i, const std::string& check,
              const LinFormula& bad, const std::string& what) {
    // bad is a formula in a and eps
    SemilinearSet as = solution_set_1d(LinFormula::exists("eps", bad), "a");
    Rational a = pick_a(spec_.cells[i], as);
    LinFormula at = bad.substitute("a", a);
    LinFormula core_at = m_.core_domain(i, "a", "eps").substitute("a", a);
    Rational e = pick_eps(solution_set_1d(at, "eps"), core_at);
    r.failures.push_back({check, {{"a", a}, {"eps", e}}, what + " on " + spec_.cells[i].str()});
  }

  void membership(std::size_t i, ValidationReport& r) {
    LinFormula bad = m_.core_domain(i, "a", "eps") && !m_.member(i, "a", "eps", "a");
    if (!decide_sentence(LinFormula::exists(std::vector<std::string>{"a", "eps"}, bad))) return;
    report(r, i, "membership", bad, "a is not in N(a,eps)");
  }

  void containment(std::size_t i, ValidationReport& r) {
    LinFormula bad = m_.in_cell(i, "a") &&
                     !LinFormula::exists("eps", m_.core_domain(i, "a", "eps"));
    if (!decide_sentence(LinFormula::exists("a", bad))) return;
    Rational a = pick_a(spec_.cells[i], solution_set_1d(bad, "a"));
    r.failures.push_back({"containment", {{"a", a}},
                          "no eps keeps N(a,eps) nondegenerate inside X on " +
                              spec_.cells[i].str()});
  }

  void monotonicity(std::size_t i, ValidationReport& r) {
    std::string z = m_.fresh();
    LinFormula bad = m_.core_domain(i, "a", "eps") && gt(V("eps2"), 0) &&
                     lt(V("eps2"), V("eps")) &&
                     LinFormula::exists(z, m_.member(i, "a", "eps2", z) &&
                                               !m_.member(i, "a", "eps", z));
    LinFormula bad_ae = eliminate_quantifiers(LinFormula::exists("eps2", bad));
    if (!decide_sentence(LinFormula::exists(std::vector<std::string>{"a", "eps"}, bad_ae)))
      return;
    SemilinearSet as = solution_set_1d(LinFormula::exists("eps", bad_ae), "a");
    Rational a = pick_a(spec_.cells[i], as);
    LinFormula core_at = m_.core_domain(i, "a", "eps").substitute("a", a);
    Rational e = pick_eps(solution_set_1d(bad_ae.substitute("a", a), "eps"), core_at);
    LinFormula last = bad.substitute("a", a).substitute("eps", e);
    SemilinearSet e2s = solution_set_1d(last, "eps2");
    Rational e2 = pick(e2s, e / 2);
    r.failures.push_back({"monotonicity",
                          {{"a", a}, {"eps", e}, {"eps2", e2}},
                          "N(a,eps2) is not inside N(a,eps) on " + spec_.cells[i].str()});
  }

  void openness(std::size_t i, ValidationReport& r) {
    LinFormula bad = m_.in_cell(i, "a") && !LinFormula::exists("eps", m_.domain(i, "a", "eps"));
    if (!decide_sentence(LinFormula::exists("a", bad))) return;
    Rational a = pick_a(spec_.cells[i], solution_set_1d(bad, "a"));
    // an eps in the core domain whose neighborhood is not open
    LinFormula core_at = m_.core_domain(i, "a", "eps").substitute("a", a);
    Rational e = pick_eps(solution_set_1d(core_at, "eps"), core_at);
    r.failures.push_back({"openness", {{"a", a}, {"eps", e}},
                          "no basic neighborhood of a is open on " + spec_.cells[i].str()});
  }

  const TopologySpec& spec_;
  Model m_;
};

}  // namespace

ValidationReport validate(const TopologySpec& spec) {
  TopologySpec plain = spec;
  plain.validated = false;
  plain.eps_domain.clear();
  if (plain.templates.size() != plain.cells.size())
    throw DomainError("spec has " + std::to_string(plain.cells.size()) + " cells but " +
                      std::to_string(plain.templates.size()) + " templates");
  return Validator(plain).run();
}

}  // namespace deftop

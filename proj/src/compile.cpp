#include "compile.hpp"

#include "deftop/error.hpp"

namespace deftop::detail {

namespace {

LinTerm V(const std::string& n) { return LinTerm::var(n); }

}  // namespace

Model::Model(const TopologySpec& spec)
    : spec_(spec), core_(spec.cells.size()), full_(spec.cells.size()) {
  if (spec.validated) {
    for (std::size_t i = 0; i < spec.cells.size() && i < spec.eps_domain.size(); ++i)
      full_[i] = spec.eps_domain[i];
  }
}

std::string Model::fresh() { return "_v" + std::to_string(counter_++); }

LinTerm Model::affine(const AffineExpr& e, const std::string& a, const std::string& eps) const {
  return LinTerm::var(a, e.coef_a) + LinTerm::var(eps, e.coef_eps) + LinTerm(e.constant);
}

LinFormula Model::in_cell(std::size_t i, const std::string& x) const {
  const Cell& c = spec_.cells[i];
  if (c.is_point()) return eq(V(x), c.point());
  return gt(V(x), c.lo) && lt(V(x), c.hi);
}

LinFormula Model::in_space(const std::string& z) const { return in_set(z, spec_.space); }

LinFormula Model::piece_member(const IntervalPiece& p, const std::string& a, const std::string& e,
                               const std::string& z) const {
  if (p.is_singleton()) return eq(V(z), affine(p.at(), a, e));
  LinTerm lo = affine(p.lo, a, e);
  LinTerm hi = affine(p.hi, a, e);
  LinFormula left = p.left_closed ? le(lo, V(z)) : lt(lo, V(z));
  LinFormula right = p.right_closed ? le(V(z), hi) : lt(V(z), hi);
  return left && right;
}

LinFormula Model::member(std::size_t i, const std::string& a, const std::string& e,
                         const std::string& z) const {
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[i].pieces) parts.push_back(piece_member(p, a, e, z));
  return LinFormula::disj(parts);
}

LinFormula Model::member_closure(std::size_t i, const std::string& a, const std::string& e,
                                 const std::string& z) const {
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[i].pieces) {
    if (p.is_singleton()) {
      parts.push_back(eq(V(z), affine(p.at(), a, e)));
    } else {
      parts.push_back(le(affine(p.lo, a, e), V(z)) && le(V(z), affine(p.hi, a, e)));
    }
  }
  return LinFormula::disj(parts);
}

LinFormula Model::nondegenerate(std::size_t i, const std::string& a, const std::string& e) const {
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[i].pieces)
    if (!p.is_singleton()) parts.push_back(lt(affine(p.lo, a, e), affine(p.hi, a, e)));
  return LinFormula::conj(parts);
}

LinFormula Model::inside_space(std::size_t i, const std::string& a, const std::string& e) {
  std::string z = fresh();
  return LinFormula::forall(z, implies(member(i, a, e, z), in_space(z)));
}

LinFormula Model::contained(std::size_t j, const std::string& b, const std::string& d,
                            std::size_t i, const std::string& a, const std::string& e) {
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[j].pieces) {
    std::string z = fresh();
    parts.push_back(
        LinFormula::forall(z, implies(piece_member(p, b, d, z), member(i, a, e, z))));
  }
  return LinFormula::conj(parts);
}

LinFormula Model::disjoint(std::size_t i, const std::string& a, const std::string& e,
                           std::size_t j, const std::string& b, const std::string& d) {
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[i].pieces) {
    for (const auto& q : spec_.templates[j].pieces) {
      std::string z = fresh();
      parts.push_back(
          !LinFormula::exists(z, piece_member(p, a, e, z) && piece_member(q, b, d, z)));
    }
  }
  return LinFormula::conj(parts);
}

LinFormula Model::cached(std::vector<std::optional<LinFormula>>& slot, std::size_t i,
                         const std::string& a, const std::string& e, bool core) {
  if (!slot[i]) {
    LinFormula f;
    if (core) {
      std::string e2 = fresh();
      f = in_cell(i, "a") && gt(V("eps"), 0) &&
          LinFormula::forall(
              e2, implies(gt(V(e2), 0) && le(V(e2), V("eps")),
                          nondegenerate(i, "a", e2) && inside_space(i, "a", e2)));
    } else {
      std::string e2 = fresh();
      f = core_domain(i, "a", "eps") &&
          LinFormula::forall(e2, implies(gt(V(e2), 0) && le(V(e2), V("eps")), open_at(i, "a", e2)));
    }
    slot[i] = eliminate_quantifiers(f);
  }
  if (a == "a" && e == "eps") return *slot[i];
  return slot[i]->rename({{"a", a}, {"eps", e}});
}

LinFormula Model::core_domain(std::size_t i, const std::string& a, const std::string& e) {
  return cached(core_, i, a, e, true);
}

LinFormula Model::domain(std::size_t i, const std::string& a, const std::string& e) {
  return cached(full_, i, a, e, false);
}

LinFormula Model::open_at(std::size_t i, const std::string& a, const std::string& e) {
  // case split on the piece of N_i(a, e) holding b and on the cell of b
  std::vector<LinFormula> parts;
  for (const auto& p : spec_.templates[i].pieces) {
    for (std::size_t j = 0; j < cells(); ++j) {
      std::string b = fresh();
      std::string d = fresh();
      LinFormula inner = LinFormula::exists(d, core_domain(j, b, d) && contained(j, b, d, i, a, e));
      parts.push_back(
          LinFormula::forall(b, implies(piece_member(p, a, e, b) && in_cell(j, b), inner)));
    }
  }
  return LinFormula::conj(parts);
}

Rational pick(const SemilinearSet& s, const std::optional<Rational>& preferred) {
  if (s.empty()) throw DomainError("no witness in empty set");
  if (preferred && s.contains(*preferred)) return *preferred;
  return sample_point(s);
}

}  // namespace deftop::detail

#pragma once

// Formula builders shared by validation and the decision procedures. All
// helpers take the names of the free variables they should use; bound
// variables are drawn from a private `_vN` supply so nothing is captured.

#include <optional>
#include <string>
#include <vector>

#include "deftop/dsl.hpp"
#include "deftop/lra.hpp"

namespace deftop::detail {

class Model {
 public:
  explicit Model(const TopologySpec& spec);

  const TopologySpec& spec() const { return spec_; }
  std::size_t cells() const { return spec_.cells.size(); }

  std::string fresh();

  LinTerm affine(const AffineExpr& e, const std::string& a, const std::string& eps) const;

  LinFormula in_cell(std::size_t i, const std::string& x) const;
  LinFormula in_space(const std::string& z) const;
  LinFormula piece_member(const IntervalPiece& p, const std::string& a, const std::string& e,
                          const std::string& z) const;
  /// z ∈ N_i(a, e)
  LinFormula member(std::size_t i, const std::string& a, const std::string& e,
                    const std::string& z) const;
  LinFormula nondegenerate(std::size_t i, const std::string& a, const std::string& e) const;
  /// z in the affine closure of N_i(a, e) (pieces closed up)
  LinFormula member_closure(std::size_t i, const std::string& a, const std::string& e,
                            const std::string& z) const;

  /// N_i(a, e) ⊆ X
  LinFormula inside_space(std::size_t i, const std::string& a, const std::string& e);
  /// N_j(b, d) ⊆ N_i(a, e)
  LinFormula contained(std::size_t j, const std::string& b, const std::string& d, std::size_t i,
                       const std::string& a, const std::string& e);
  /// N_i(a, e) ∩ N_j(b, d) = ∅
  LinFormula disjoint(std::size_t i, const std::string& a, const std::string& e, std::size_t j,
                      const std::string& b, const std::string& d);

  /// a in cell i, e > 0, and every e' in (0, e] gives a nondegenerate
  /// neighborhood inside X.
  LinFormula core_domain(std::size_t i, const std::string& a, const std::string& e);
  /// core_domain plus openness of N_i(a, e') for every e' in (0, e]. Uses
  /// the spec's eps_domain when validated.
  LinFormula domain(std::size_t i, const std::string& a, const std::string& e);
  /// every point of N_i(a, e) has a basic neighborhood inside N_i(a, e)
  LinFormula open_at(std::size_t i, const std::string& a, const std::string& e);

 private:
  LinFormula cached(std::vector<std::optional<LinFormula>>& slot, std::size_t i,
                    const std::string& a, const std::string& e, bool core);

  const TopologySpec& spec_;
  std::size_t counter_ = 0;
  std::vector<std::optional<LinFormula>> core_;
  std::vector<std::optional<LinFormula>> full_;
};

/// A member of s, preferring `preferred` and then simple rationals.
Rational pick(const SemilinearSet& s, const std::optional<Rational>& preferred = std::nullopt);

}  // namespace deftop::detail

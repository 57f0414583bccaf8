#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "deftop/dsl.hpp"

namespace deftop {

enum class PointClass { LocallyIsolated, LocallyRightClosed, LocallyLeftClosed, LocallyEuclidean };
enum class BasisClass { Iso, LeftClosedHalf, RightClosedHalf, Affine, NonLocal };

std::string to_string(PointClass c);
std::string to_string(BasisClass c);

/// A point of X analyzed on its own, or an open subinterval of an open cell
/// on which everything local is uniform.
struct Site {
  bool is_point = false;
  Rational lo;  // the point when is_point
  Rational hi;
  std::size_t cell = 0;

  bool contains(const Rational& q) const { return is_point ? q == lo : (lo < q && q < hi); }
  Rational representative() const;
  SemilinearSet as_set() const;
  std::string str() const;
};

struct SubcellShadows {
  Rational lo;
  Rational hi;
  /// Shadow functions of a; the first is the identity. Only coef_a and
  /// constant are used.
  std::vector<AffineExpr> functions;
  /// False when the images could not be made disjoint by a finite split
  /// (two functions meet at an end of the subcell).
  bool disjoint_images = true;
};

struct CellShadows {
  std::size_t cell = 0;
  std::vector<Rational> breakpoints;  // inside the cell, sorted
  std::vector<SubcellShadows> subcells;
};

struct ShadowMap {
  std::vector<CellShadows> cells;  // open cells only
  /// isolated points of the spec and breakpoints, with their shadow sets
  std::map<Rational, std::vector<Rational>> points;
};

struct Comparison {
  Site site;
  bool coarser = false;  // B_a ⪯ B_a^af
  bool finer = false;    // B_a^af ⪯ B_a
  BasisClass basis = BasisClass::Affine;
};

/// Exact subsets of X describing the local picture.
struct LocalSets {
  SemilinearSet left;     // small neighborhoods contain (a-g, a)
  SemilinearSet right;    // small neighborhoods contain (a, a+g)
  SemilinearSet coarser;  // B_a ⪯ B_a^af
  SemilinearSet finer;    // B_a^af ⪯ B_a
};

namespace detail {
class ShadowEngine;
}

/// Caching front end for repeated queries on one validated spec. The free
/// functions below build a temporary analysis per call.
class ShadowAnalysis {
 public:
  explicit ShadowAnalysis(const TopologySpec& spec);
  ~ShadowAnalysis();
  ShadowAnalysis(ShadowAnalysis&&) noexcept;
  ShadowAnalysis& operator=(ShadowAnalysis&&) noexcept;

  const TopologySpec& spec() const;

  SemilinearSet closure(const SemilinearSet& z) const;
  std::vector<Rational> shadows_at(const Rational& q) const;
  /// Exact shadow set; may be infinite for non-Hausdorff input.
  SemilinearSet shadow_set(const Rational& q) const;
  const CellShadows& generic(std::size_t cell) const;
  const ShadowMap& map() const;
  const LocalSets& local_sets() const;
  /// Points and subcells covering X in order.
  const std::vector<Site>& sites() const;

  PointClass classify_point(const Rational& q) const;
  Comparison compare_at(const Rational& q) const;
  std::vector<std::pair<Site, PointClass>> classify() const;
  std::vector<Comparison> affine_comparison() const;

  /// For each q: does every small N(q,eps) contain an interval ending at b
  /// from the left (b-g, b), respectively from the right (b, b+g)?
  bool contains_left_of(const Rational& q, const Rational& b) const;
  bool contains_right_of(const Rational& q, const Rational& b) const;

 private:
  std::unique_ptr<detail::ShadowEngine> e_;
};

SemilinearSet tau_closure(const TopologySpec& spec, const SemilinearSet& z);
std::vector<Rational> shadows_at(const TopologySpec& spec, const Rational& q);
CellShadows shadows_generic(const TopologySpec& spec, std::size_t cell);
std::vector<std::pair<Site, PointClass>> classify(const TopologySpec& spec);
std::vector<Comparison> affine_comparison(const TopologySpec& spec);

}  // namespace deftop

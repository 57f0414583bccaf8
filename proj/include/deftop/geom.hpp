#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deftop/rational.hpp"

namespace deftop {

/// One piece of a subset of the line: a single point, or an open interval
/// whose ends may be infinite. Closed ends are separate Point components.
struct Component {
  enum class Kind { Point, Interval };

  Kind kind = Kind::Point;
  Rational lo;  // the point itself when kind == Point
  Rational hi;
  bool lo_inf = false;
  bool hi_inf = false;

  static Component point(const Rational& q);
  static Component interval(const Rational& lo, const Rational& hi);
  static Component ray_above(const Rational& lo);
  static Component ray_below(const Rational& hi);
  static Component line();

  bool is_point() const { return kind == Kind::Point; }
  bool contains(const Rational& q) const;
  bool operator==(const Component& o) const;
};

/// Finite union of points and open intervals, held in canonical form:
/// sorted, pairwise disjoint, and with no two pieces that merge into one.
class SemilinearSet {
 public:
  SemilinearSet() = default;

  static SemilinearSet point(const Rational& q);
  static SemilinearSet points(const std::vector<Rational>& qs);
  static SemilinearSet open(const Rational& lo, const Rational& hi);
  static SemilinearSet closed(const Rational& lo, const Rational& hi);
  static SemilinearSet interval(const Rational& lo, const Rational& hi, bool left_closed,
                                bool right_closed);
  static SemilinearSet line();

  /// Text form as produced by str(): `(0,1] ∪ {3}`; `U` works as the union
  /// sign, `{p, q}` lists points, `-inf`/`+inf` are allowed as ends.
  static SemilinearSet parse(std::string_view text);

  const std::vector<Component>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }
  bool contains(const Rational& q) const;
  bool bounded() const;
  bool finite() const;  // only points
  bool is_subset_of(const SemilinearSet& other) const;

  /// Finite endpoints and points, sorted and deduplicated.
  std::vector<Rational> coordinates() const;
  /// Points of a finite set (throws DomainError otherwise).
  std::vector<Rational> as_points() const;

  Rational min_coordinate() const;
  Rational max_coordinate() const;

  std::string str() const;

  bool operator==(const SemilinearSet& o) const { return comps_ == o.comps_; }
  bool operator!=(const SemilinearSet& o) const { return !(*this == o); }

  friend SemilinearSet canonicalize(const std::vector<Component>& raw);

 private:
  std::vector<Component> comps_;
};

enum class SetOp { Union, Intersection, Difference };

SemilinearSet canonicalize(const std::vector<Component>& raw);
SemilinearSet combine(SetOp op, const SemilinearSet& a, const SemilinearSet& b);

inline SemilinearSet operator|(const SemilinearSet& a, const SemilinearSet& b) {
  return combine(SetOp::Union, a, b);
}
inline SemilinearSet operator&(const SemilinearSet& a, const SemilinearSet& b) {
  return combine(SetOp::Intersection, a, b);
}
inline SemilinearSet operator-(const SemilinearSet& a, const SemilinearSet& b) {
  return combine(SetOp::Difference, a, b);
}

/// Closure in the order topology of the line. Bounded input only.
SemilinearSet affine_closure(const SemilinearSet& a);
/// Interior in the order topology of the line.
SemilinearSet affine_interior(const SemilinearSet& a);
bool subset_of(const SemilinearSet& a, const SemilinearSet& b);

/// A rational of least denominator strictly between lo and hi.
Rational simplest_between(const Rational& lo, const Rational& hi);
/// Some member of a nonempty set, preferring simple rationals.
Rational sample_point(const SemilinearSet& s);

/// coef_a * a + coef_eps * eps + constant
struct AffineExpr {
  Rational coef_a;
  Rational coef_eps;
  Rational constant;

  static AffineExpr constant_of(const Rational& c) { return {0, 0, c}; }

  Rational eval(const Rational& a, const Rational& eps) const {
    return coef_a * a + coef_eps * eps + constant;
  }
  /// Value at eps = 0.
  AffineExpr limit() const { return {coef_a, 0, constant}; }
  /// Substitutes a := value.
  AffineExpr bind_a(const Rational& value) const { return {0, coef_eps, constant + coef_a * value}; }

  AffineExpr operator+(const AffineExpr& o) const {
    return {coef_a + o.coef_a, coef_eps + o.coef_eps, constant + o.constant};
  }
  AffineExpr operator-(const AffineExpr& o) const {
    return {coef_a - o.coef_a, coef_eps - o.coef_eps, constant - o.constant};
  }
  AffineExpr operator*(const Rational& k) const { return {coef_a * k, coef_eps * k, constant * k}; }
  bool operator==(const AffineExpr& o) const {
    return coef_a == o.coef_a && coef_eps == o.coef_eps && constant == o.constant;
  }
  bool operator!=(const AffineExpr& o) const { return !(*this == o); }

  /// Renders with the given names, e.g. `a + 2*eps - 1/2`.
  std::string str(const std::string& a_name = "a", const std::string& eps_name = "eps") const;
};

struct IntervalPiece {
  enum class Kind { Interval, Singleton };

  Kind kind = Kind::Interval;
  AffineExpr lo;  // the point for Singleton
  AffineExpr hi;
  bool left_closed = false;
  bool right_closed = false;

  static IntervalPiece interval(const AffineExpr& lo, const AffineExpr& hi, bool left_closed,
                                bool right_closed);
  static IntervalPiece singleton(const AffineExpr& at);

  bool is_singleton() const { return kind == Kind::Singleton; }
  const AffineExpr& at() const { return lo; }
  bool operator==(const IntervalPiece& o) const;
  bool operator!=(const IntervalPiece& o) const { return !(*this == o); }

  std::string str(const std::string& a_name = "a") const;
};

/// Union of the pieces at (a, eps). Throws DomainError when an interval
/// piece has lo >= hi there.
SemilinearSet eval_template(const std::vector<IntervalPiece>& pieces, const Rational& a,
                            const Rational& eps);

}  // namespace deftop

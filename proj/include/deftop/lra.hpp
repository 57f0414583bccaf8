#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deftop/geom.hpp"
#include "deftop/rational.hpp"

namespace deftop {

using Assignment = std::map<std::string, Rational>;

/// sum of coefficient * variable, plus a constant
class LinTerm {
 public:
  LinTerm() = default;
  LinTerm(const Rational& c) : constant_(c) {}  // NOLINT: constants convert freely
  LinTerm(int c) : constant_(c) {}              // NOLINT

  static LinTerm var(const std::string& name, const Rational& coef = 1);

  const std::map<std::string, Rational>& coefficients() const { return coeffs_; }
  const Rational& constant() const { return constant_; }
  Rational coefficient(const std::string& name) const;
  bool mentions(const std::string& name) const { return coeffs_.count(name) != 0; }
  bool is_constant() const { return coeffs_.empty(); }

  LinTerm operator+(const LinTerm& o) const;
  LinTerm operator-(const LinTerm& o) const;
  LinTerm operator-() const;
  LinTerm operator*(const Rational& k) const;
  LinTerm& operator+=(const LinTerm& o) { return *this = *this + o; }
  bool operator==(const LinTerm& o) const { return coeffs_ == o.coeffs_ && constant_ == o.constant_; }
  bool operator<(const LinTerm& o) const;

  /// Throws DomainError if a variable has no value.
  Rational eval(const Assignment& env) const;
  LinTerm substitute(const std::string& name, const LinTerm& by) const;
  LinTerm rename(const std::map<std::string, std::string>& names) const;

  /// s-expression: `(+ (* 2 x) y -1/2)`
  std::string str() const;

 private:
  void add(const std::string& name, const Rational& coef);

  std::map<std::string, Rational> coeffs_;
  Rational constant_;
};

/// An atom reads `term rel 0`.
enum class Rel { Lt, Le, Eq };

namespace detail {
struct Dnf;
}

class LinFormula {
 public:
  enum class Kind { True, False, Atom, And, Or, Not, Exists, Forall };

  LinFormula();  // true

  static LinFormula truth(bool value);
  static LinFormula atom(const LinTerm& t, Rel rel);
  static LinFormula conj(std::vector<LinFormula> parts);
  static LinFormula disj(std::vector<LinFormula> parts);
  static LinFormula negation(const LinFormula& f);
  static LinFormula exists(const std::string& var, const LinFormula& body);
  static LinFormula forall(const std::string& var, const LinFormula& body);
  static LinFormula exists(const std::vector<std::string>& vars, const LinFormula& body);
  static LinFormula forall(const std::vector<std::string>& vars, const LinFormula& body);

  /// Reads the s-expression form written by str().
  static LinFormula parse(std::string_view text);

  Kind kind() const;
  const LinTerm& term() const;  // Atom only
  Rel rel() const;              // Atom only
  const std::vector<LinFormula>& children() const;
  const std::string& bound_var() const;  // Exists/Forall only
  const LinFormula& body() const;        // Not/Exists/Forall

  std::set<std::string> free_vars() const;
  bool is_quantifier_free() const;
  std::size_t size() const;

  /// Quantifier-free formulas only (throws DomainError otherwise).
  bool eval(const Assignment& env) const;
  /// Renames free variables; bound variables are left alone.
  LinFormula rename(const std::map<std::string, std::string>& names) const;
  /// Replaces free occurrences of `name` by a term.
  LinFormula substitute(const std::string& name, const LinTerm& by) const;

  std::string str() const;

  /// Structural equality.
  bool operator==(const LinFormula& o) const;
  bool operator!=(const LinFormula& o) const { return !(*this == o); }

  struct Node;
  explicit LinFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

LinFormula operator&&(const LinFormula& a, const LinFormula& b);
LinFormula operator||(const LinFormula& a, const LinFormula& b);
LinFormula operator!(const LinFormula& a);

LinFormula lt(const LinTerm& a, const LinTerm& b);
LinFormula le(const LinTerm& a, const LinTerm& b);
LinFormula eq(const LinTerm& a, const LinTerm& b);
LinFormula gt(const LinTerm& a, const LinTerm& b);
LinFormula ge(const LinTerm& a, const LinTerm& b);
LinFormula implies(const LinFormula& a, const LinFormula& b);
LinFormula iff(const LinFormula& a, const LinFormula& b);

/// Membership of variable `var` in a set, as a quantifier-free formula.
LinFormula in_set(const std::string& var, const SemilinearSet& s);

/// Fourier–Motzkin projection of a quantifier-free body. The result is a
/// quantifier-free formula in disjunctive normal form without `var`.
LinFormula eliminate_exists(const std::string& var, const LinFormula& body);

/// Eliminates every quantifier; the result is in disjunctive normal form.
LinFormula eliminate_quantifiers(const LinFormula& f);

/// Truth value of a closed formula (DomainError if a variable is free).
bool decide_sentence(const LinFormula& f);

/// The set of rationals satisfying a formula in one free variable.
SemilinearSet solution_set_1d(const LinFormula& f, const std::string& var);

}  // namespace deftop

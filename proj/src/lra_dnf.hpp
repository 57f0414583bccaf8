#pragma once

// Disjunctive normal form used by the elimination engine. Each conjunct
// keeps, per linear form L (leading coefficient 1), the tightest lower and
// upper bound seen so far, so parallel constraints collapse on insertion.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "deftop/lra.hpp"

namespace deftop::detail {

using LinPart = std::vector<std::pair<std::string, Rational>>;

struct Bounds {
  bool has_lo = false;
  bool lo_strict = false;
  bool has_hi = false;
  bool hi_strict = false;
  Rational lo;
  Rational hi;

  bool is_eq() const { return has_lo && has_hi && !lo_strict && !hi_strict && lo == hi; }
  // tighter-or-equal on both sides
  bool implies(const Bounds& weaker) const;

  bool operator==(const Bounds& o) const {
    return has_lo == o.has_lo && has_hi == o.has_hi &&
           (!has_lo || (lo == o.lo && lo_strict == o.lo_strict)) &&
           (!has_hi || (hi == o.hi && hi_strict == o.hi_strict));
  }
  bool operator<(const Bounds& o) const;
};

class Conj {
 public:
  /// False once the conjunct became inconsistent on insertion.
  bool ok() const { return ok_; }

  bool add_atom(const LinTerm& t, Rel r);
  bool add_lower(const LinPart& l, const Rational& v, bool strict);
  bool add_upper(const LinPart& l, const Rational& v, bool strict);
  bool add_row(const LinPart& l, const Bounds& b);
  bool merge(const Conj& o);

  const std::map<LinPart, Bounds>& rows() const { return rows_; }
  std::map<LinPart, Bounds>& mutable_rows() { return rows_; }

  std::set<std::string> vars() const;
  bool mentions(const std::string& x) const;
  bool eval(const Assignment& env) const;
  /// Atoms equivalent to this conjunct.
  std::vector<std::pair<LinTerm, Rel>> atoms() const;

  bool operator==(const Conj& o) const { return ok_ == o.ok_ && rows_ == o.rows_; }
  bool operator<(const Conj& o) const { return rows_ < o.rows_; }

 private:
  bool check(const Bounds& b);

  std::map<LinPart, Bounds> rows_;
  bool ok_ = true;
};

LinTerm to_term(const LinPart& l);

struct Dnf {
  std::vector<Conj> conjs;

  static Dnf top();
  static Dnf bottom() { return {}; }
  bool is_false() const { return conjs.empty(); }
  bool is_true() const;

  std::set<std::string> vars() const;
  bool eval(const Assignment& env) const;
};

bool satisfiable(const Conj& c);
/// Projection of one conjunct; the result may be inconsistent.
Conj project(const Conj& c, const std::string& x);

Dnf dnf_atom(const LinTerm& t, Rel r);
Dnf dnf_and(const Dnf& a, const Dnf& b);
Dnf dnf_or(const Dnf& a, const Dnf& b);
Dnf dnf_not(const Dnf& a);
Dnf dnf_exists(const Dnf& a, const std::string& x);
Dnf dnf_forall(const Dnf& a, const std::string& x);
Dnf dnf_substitute(const Dnf& a, const std::string& x, const LinTerm& by);
Dnf dnf_rename(const Dnf& a, const std::map<std::string, std::string>& names);
Dnf dnf_simplify(std::vector<Conj> conjs);

Dnf dnf_of_set(const std::string& var, const SemilinearSet& s);
/// Requires vars() ⊆ {var}.
SemilinearSet set_of_dnf(const Dnf& d, const std::string& var);

/// Normal form of an arbitrary formula.
Dnf to_dnf(const LinFormula& f);
LinFormula from_dnf(Dnf d);

}  // namespace deftop::detail

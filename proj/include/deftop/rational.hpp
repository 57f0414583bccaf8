#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace deftop {

/// Exact rational number. Every coordinate, coefficient and parameter in the
/// engine is one of these; there is no floating point on any decision path.
using Rational = mpq_class;

/// Parses `p`, `-p`, `p/q` or `-p/q` (decimal integers). Throws
/// std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text form: `p` for integers, `p/q` otherwise.
std::string to_string(const Rational& q);

inline Rational midpoint(const Rational& x, const Rational& y) {
  Rational m = (x + y) / 2;
  m.canonicalize();
  return m;
}

/// n/d in lowest terms (mpq_class(n, d) alone does not reduce).
inline Rational rat(long n, long d = 1) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// 2^-k as an exact rational.
Rational pow2_neg(unsigned k);

}  // namespace deftop

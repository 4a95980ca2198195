// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Minimal double-double ("compensated") arithmetic: an unevaluated sum of two
// doubles giving ~106 bits of significand.  The float evaluation path uses it
// because the alternating sums of the closed form cancel catastrophically for
// larger indices (condition numbers beyond 1e16 well inside the useful index
// range), which plain double cannot survive.  Only the operations the
// evaluator needs are provided.

#pragma once

#include "oscme/rational.hpp"

#include <cmath>

namespace oscme {

struct DDouble {
  double hi = 0.0, lo = 0.0;

  DDouble() = default;
  explicit DDouble(double x) : hi(x), lo(0.0) {}
  DDouble(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

namespace dd_detail {
// Error-free transforms (Knuth / Dekker).
inline DDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}
inline DDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}
inline DDouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}
} // namespace dd_detail

inline DDouble dd_add(const DDouble &a, const DDouble &b) {
  DDouble s = dd_detail::two_sum(a.hi, b.hi);
  DDouble t = dd_detail::two_sum(a.lo, b.lo);
  double lo = s.lo + t.hi;
  DDouble r = dd_detail::quick_two_sum(s.hi, lo);
  lo = r.lo + t.lo;
  return dd_detail::quick_two_sum(r.hi, lo);
}

inline DDouble dd_neg(const DDouble &a) { return {-a.hi, -a.lo}; }

inline DDouble dd_sub(const DDouble &a, const DDouble &b) {
  return dd_add(a, dd_neg(b));
}

inline DDouble dd_mul(const DDouble &a, const DDouble &b) {
  DDouble p = dd_detail::two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return dd_detail::quick_two_sum(p.hi, lo);
}

inline DDouble dd_mul(const DDouble &a, double b) {
  DDouble p = dd_detail::two_prod(a.hi, b);
  double lo = p.lo + a.lo * b;
  return dd_detail::quick_two_sum(p.hi, lo);
}

inline DDouble dd_div(const DDouble &a, const DDouble &b) {
  double q1 = a.hi / b.hi;
  DDouble r = dd_sub(a, dd_mul(b, q1));
  double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(b, q2));
  double q3 = r.hi / b.hi;
  DDouble q = dd_detail::quick_two_sum(q1, q2);
  return dd_add(q, DDouble(q3));
}

// Exact-to-working-precision conversion: hi is the rounded double value, lo
// the rounded remainder (computed exactly in rational arithmetic).
inline DDouble to_ddouble(const BigRational &q) {
  double hi = to_double(q);
  BigRational rem = q - BigRational(hi);
  return {hi, to_double(rem)};
}

inline DDouble to_ddouble(const BigInt &v) { return to_ddouble(BigRational(v)); }

} // namespace oscme

// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Arbitrary-precision integer/rational support built on GMP (gmpxx), plus the
// handful of combinatorial primitives the closed form needs: factorials,
// double factorials with the (-1)!! = 1 empty-product convention, binomial
// coefficients that vanish outside their support, and square-free splitting
// of smooth rationals (used to keep exact values in a canonical form).

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oscme {

using BigInt = mpz_class;
using BigRational = mpq_class;

// n! for n >= 0; throws std::invalid_argument for negative n.
BigInt factorial(long n);

// m!! for m >= -1, with (-1)!! = 0!! = 1 (empty products); throws
// std::invalid_argument for m < -1.
BigInt double_factorial(long m);

// C(n, k) for n >= 0; returns 0 when k < 0 or k > n; throws
// std::invalid_argument for negative n.
BigInt binomial(long n, long k);

// 2^e for e >= 0.
BigInt pow2(unsigned long e);

// Range-safe conversions that stay accurate far beyond double's exponent
// limits (mantissa extracted with mpz_get_d_2exp, recombined with ldexp).
double to_double(const BigInt &v);
double to_double(const BigRational &q);

// Split a positive rational q = outer^2 * squarefree so that
// sqrt(q) = outer * sqrt(squarefree), with squarefree a square-free positive
// *integer* (this normal form is unique).  Requires every prime factor of q
// to be <= smooth_limit() (true for all rationals arising from factorials and
// powers of two at supported index sizes); otherwise throws std::domain_error.
struct SquarefreeSplit {
  BigRational outer;      // positive rational
  BigRational squarefree; // square-free positive integer
};
SquarefreeSplit squarefree_split(const BigRational &q);

// Largest prime factor squarefree_split can digest.
long smooth_limit();

} // namespace oscme

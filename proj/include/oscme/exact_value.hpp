// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Canonical exact representation of matrix-element values.  Every element is
// of the form
//
//     V = coeff * sqrt(radicand) * sqrt(2/pi) * (1/a)
//
// with coeff rational and radicand a positive square-free rational (the
// normalization square roots of the oscillator states are generally
// irrational, so a bare rational cannot represent normalized elements).  With
// radicand square-free the pair (coeff, radicand) is unique for each real
// value, so equality of values is componentwise equality.

#pragma once

#include "oscme/rational.hpp"

#include <string>

namespace oscme {

class ExactValue {
public:
  // Zero, canonically (0, 1).
  ExactValue() : coeff_(0), radicand_(1) {}

  // coeff * sqrt(radicand); radicand must be positive (or coeff zero).
  // The radicand is reduced to square-free form on construction.
  static ExactValue make(const BigRational &coeff, const BigRational &radicand);

  // Purely rational value (radicand 1).
  static ExactValue from_rational(const BigRational &coeff);

  const BigRational &coeff() const { return coeff_; }
  const BigRational &radicand() const { return radicand_; }

  bool is_zero() const { return sgn(coeff_) == 0; }
  int sign() const { return sgn(coeff_); }

  // Addition requires compatible radicands (equal, or one side zero);
  // incompatible radicands would leave the ring and throw std::domain_error.
  ExactValue operator+(const ExactValue &other) const;
  ExactValue operator-() const;
  ExactValue operator-(const ExactValue &other) const;

  // Multiply by a rational scalar.
  ExactValue scaled(const BigRational &factor) const;
  // Multiply by sqrt(factor), factor > 0 rational.
  ExactValue scaled_sqrt(const BigRational &factor) const;

  bool operator==(const ExactValue &other) const = default;

  // coeff * sqrt(radicand) as a double (no sqrt(2/pi) or 1/a applied).
  double to_double() const;

  // Human-readable form, e.g. "(-1/12)*sqrt(2)".
  std::string str() const;

private:
  BigRational coeff_;
  BigRational radicand_; // square-free, positive; exactly 1 when coeff_ == 0
};

} // namespace oscme

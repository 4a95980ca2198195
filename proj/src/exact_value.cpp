#include "oscme/exact_value.hpp"

#include "oscme/rational.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oscme {

ExactValue ExactValue::make(const BigRational &coeff,
                            const BigRational &radicand) {
  ExactValue v;
  if (sgn(coeff) == 0)
    return v; // canonical zero (0, 1)
  if (sgn(radicand) <= 0)
    throw std::invalid_argument("ExactValue: radicand must be positive");
  const SquarefreeSplit split = squarefree_split(radicand);
  v.coeff_ = coeff * split.outer;
  v.coeff_.canonicalize();
  v.radicand_ = split.squarefree;
  return v;
}

ExactValue ExactValue::from_rational(const BigRational &coeff) {
  ExactValue v;
  v.coeff_ = coeff;
  v.radicand_ = 1;
  return v;
}

ExactValue ExactValue::operator+(const ExactValue &other) const {
  if (is_zero())
    return other;
  if (other.is_zero())
    return *this;
  if (radicand_ != other.radicand_)
    throw std::domain_error("ExactValue: adding values with different radicands");
  ExactValue v;
  v.coeff_ = coeff_ + other.coeff_;
  v.coeff_.canonicalize();
  if (sgn(v.coeff_) == 0)
    v.radicand_ = 1;
  else
    v.radicand_ = radicand_;
  return v;
}

ExactValue ExactValue::operator-() const {
  ExactValue v = *this;
  v.coeff_ = -v.coeff_;
  return v;
}

ExactValue ExactValue::operator-(const ExactValue &other) const {
  return *this + (-other);
}

ExactValue ExactValue::scaled(const BigRational &factor) const {
  if (sgn(factor) == 0 || is_zero())
    return ExactValue();
  ExactValue v;
  v.coeff_ = coeff_ * factor;
  v.coeff_.canonicalize();
  v.radicand_ = radicand_;
  return v;
}

ExactValue ExactValue::scaled_sqrt(const BigRational &factor) const {
  if (sgn(factor) <= 0)
    throw std::invalid_argument("ExactValue: sqrt scale factor must be positive");
  if (is_zero())
    return ExactValue();
  // radicand * factor may pick up square parts; re-split to stay canonical.
  return make(coeff_, radicand_ * factor);
}

double ExactValue::to_double() const {
  if (is_zero())
    return 0.0;
  return oscme::to_double(coeff_) * std::sqrt(oscme::to_double(radicand_));
}

std::string ExactValue::str() const {
  std::ostringstream os;
  os << '(' << coeff_.get_str() << ')';
  if (radicand_ != 1)
    os << "*sqrt(" << radicand_.get_str() << ')';
  return os.str();
}

} // namespace oscme

// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Closed-form evaluation of <lambda1 lambda2 | 1/r12 | lambda3 lambda4> for
// isotropic-oscillator product states.  Per axis, the element reduces to a
// finite weighted sum indexed by (k, k'); the three axes couple only through
// a single rational factor 1/(1 + 2*Omega), so the full element is a triple
// convolution of per-axis weight vectors followed by one weighted sum.  Both
// an exact (rational + square root) backend and a fast compensated float
// backend are provided; they share the same combinatorial tables.

#pragma once

#include "oscme/error.hpp"
#include "oscme/exact_value.hpp"
#include "oscme/indices.hpp"
#include "oscme/rational.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace oscme {

// Overall unit of every element: sqrt(2/pi) / a.
inline const double kRoot2OverPi = std::sqrt(2.0 / std::numbers::pi);

enum class Backend { Float, Exact };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string &name); // throws std::invalid_argument

// Oscillator length a > 0 (finite).  All element values carry units 1/a.
struct OscillatorScale {
  double a;
  explicit OscillatorScale(double a_);
};

// A single matrix-element value.  Float backend: one double.  Exact backend:
// the canonical (coeff, radicand) pair, with the numeric value
//   coeff * sqrt(radicand) * sqrt(2/pi) / a.
class ElementValue {
public:
  static ElementValue from_float(double v, double a);
  static ElementValue from_exact(const ExactValue &ev, double a);

  Backend backend() const { return backend_; }
  double scale() const { return a_; }

  // Numeric value, whichever the backend.
  double value() const;

  // Exact payload; contract violation to call on the float backend.
  const ExactValue &exact() const;

  bool is_zero() const;

private:
  ElementValue() = default;
  Backend backend_ = Backend::Float;
  double a_ = 1.0;
  double float_value_ = 0.0;
  ExactValue exact_;
};

// One term of the per-axis double sum: coefficient of the (k, k') entry.
struct AxisTerm {
  int k = 0, kp = 0;
  BigRational coeff;
};

// All (k, k') terms of one axis for pairs p14, p23 with axis parity s:
//   (-1)^(k+k') / (k! k'!) * C(np14, nm14 - k) * C(np23, nm23 - k')
//     * (2s + 2k + 2k' - 1)!! / 2^(2s + k + k')
// Terms whose binomial factor vanishes are omitted.  Requires s >= 0.
std::vector<AxisTerm> axis_sum(const AxisPair &p14, const AxisPair &p23, int s);

// Factorials, double factorials and binomials pre-sized for keys with
// indices <= max_index (double factorial arguments reach 4*max_index - 1).
class CombinatoricsTable {
public:
  explicit CombinatoricsTable(int max_index);

  int max_index() const { return max_index_; }
  const BigInt &fact(int n) const;        // n in [0, max_index]
  const BigInt &dfact(int m) const;       // m in [-1, 4*max_index + 1]
  const BigInt &binom(int n, int k) const; // n in [0, max_index]; 0 outside support

private:
  int max_index_;
  std::vector<BigInt> fact_, dfact_;
  std::vector<std::vector<BigInt>> binom_;
  BigInt zero_;
};

// Closed-form evaluator for keys with all indices <= max_index.
class Evaluator {
public:
  explicit Evaluator(int max_index, OscillatorScale scale = OscillatorScale(1.0));

  int max_index() const { return tables_->max_index(); }
  double scale() const { return a_; }
  const CombinatoricsTable &tables() const { return *tables_; }

  // Single element via the closed form.  Selection-rule violations return an
  // exact zero on both backends.  Indices beyond max_index throw
  // std::out_of_range; non-finite float intermediates throw OverflowError.
  ElementValue element_direct(const ElementKey &key,
                              Backend backend = Backend::Float) const;

  // Batch evaluation, order-preserving; work is split across `workers`
  // threads.  Per-key failures are collected and rethrown as BatchError with
  // key attribution.
  std::vector<ElementValue> element_batch(std::span<const ElementKey> keys,
                                          Backend backend = Backend::Float,
                                          int workers = 1) const;

private:
  std::shared_ptr<const CombinatoricsTable> tables_;
  double a_;
};

} // namespace oscme

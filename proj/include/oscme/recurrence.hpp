// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Single-axis recurrence relations that propagate matrix elements in the
// (n_minus, n_plus) pair of one particle pair while every other quantum
// number is held fixed.  Bulk construction seeds the n_minus = 0 row with
// direct closed-form evaluations and fills the interior with O(1) steps,
// which is far cheaper than evaluating every element directly.
//
// The recurrences act most simply on *unnormalized* elements
//   Vbar = V * sqrt(M),   M = product over all 12 indices of 2^n n!,
// which are plain rationals in units of sqrt(2/pi)/a.

#pragma once

#include "oscme/closed_form.hpp"
#include "oscme/error.hpp"
#include "oscme/indices.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oscme::recurrence {

// Unnormalized element value; `exact` is used by the exact backend, `f` by
// the float backend.  Both carry the dimensionless rational part r with
// value = r * sqrt(2/pi) / a.
struct UnnormalizedValue {
  Backend backend = Backend::Float;
  double f = 0.0;
  BigRational exact = 0;

  double numeric() const;
  static UnnormalizedValue from_float(double v);
  static UnnormalizedValue from_exact(const BigRational &v);
};

// M(key) = prod over the 12 indices of 2^n n!.
BigInt rescale_square(const ElementKey &key);

// Conversions between normalized and unnormalized values for a given key.
UnnormalizedValue unnormalize(const ElementValue &v, const ElementKey &key);
ElementValue normalize(const UnnormalizedValue &v, const ElementKey &key,
                       double a);

// One unnormalized in-pair step: produces Vbar(n_minus + 1, n_plus) from
//   Vbar(n_minus, n_plus + 1) + 2 n_plus * Vbar(n_minus, n_plus - 1)
//                             - 2 n_minus * Vbar(n_minus - 1, n_plus).
// Neighbor values are for the unordered index pairs written above.  A
// neighbor whose coefficient vanishes (n_plus = 0 or n_minus = 0) may be
// omitted; a missing required neighbor throws MissingNeighborError.
UnnormalizedValue
recur_step_unnormalized(int n_minus, int n_plus,
                        const std::optional<UnnormalizedValue> &up,
                        const std::optional<UnnormalizedValue> &down,
                        const std::optional<UnnormalizedValue> &left);

// The same step on normalized values:
//   V(n_minus+1, n_plus) = [ sqrt(n_plus + 1) * V(n_minus, n_plus + 1)
//                          + sqrt(n_plus)     * V(n_minus, n_plus - 1)
//                          - sqrt(n_minus)    * V(n_minus - 1, n_plus) ]
//                          / sqrt(n_minus + 1).
// On the exact backend the square-root coefficients stay inside the
// (coeff, radicand) representation, so the step is exact.
ElementValue
recur_step_normalized(int n_minus, int n_plus,
                      const std::optional<ElementValue> &up,
                      const std::optional<ElementValue> &down,
                      const std::optional<ElementValue> &left, double a);

// Cross-pair transfer for families with a (0, n_plus) first pair and
// (m_minus, m_plus) second pair on the same axis:
//   Vbar[(0, n_plus); (m_minus, m_plus + 1)] =
//       - Vbar[(0, n_plus + 1); (m_minus, m_plus)]        ("opposite")
//       + 2 m_minus * Vbar[(0, n_plus); (m_minus - 1, m_plus)]  ("lowered").
// The second neighbor may be omitted when m_minus = 0.  See
// validate_four_index for the machinery that checks this relation against
// direct evaluation (the sign and coefficient here were fixed by exactly
// that validation).
UnnormalizedValue
recur_step_four_index(int n_plus, int m_minus, int m_plus,
                      const UnnormalizedValue &opposite,
                      const std::optional<UnnormalizedValue> &lowered);

// A family: one axis of one particle pair varies, all other ten quantum
// numbers are fixed by `base`.  materialize(lo, hi) writes hi into the lower
// particle slot (1 or 2) and lo into the partner slot (4 or 3); the element
// value depends only on the unordered pair.
struct FamilyContext {
  ElementKey base;
  Axis axis = Axis::X;
  ParticlePair pair = ParticlePair::P14;

  ElementKey materialize(int lo, int hi) const;
};

// Triangular memo of unnormalized values for one family: row lo covers
// hi in [lo, 2*n_max - lo], so every unordered pair with max <= n_max is
// present.  Seeded along lo = 0 by direct evaluation (exactly
// 2*n_max + 1 evaluations), filled by recur_step_unnormalized.
class FamilyTable {
public:
  int n_max() const { return n_max_; }
  Backend backend() const { return backend_; }
  const FamilyContext &context() const { return ctx_; }

  bool contains(int a, int b) const;
  // Value for the unordered pair {a, b}; throws std::out_of_range outside
  // the built range.
  const UnnormalizedValue &value(int a, int b) const;

  // Normalized element for the materialized key of pair {a, b}.
  ElementValue element(int a, int b, double scale_a) const;

  // Number of direct closed-form evaluations consumed while seeding.
  int seed_evaluations() const { return seed_evaluations_; }

private:
  friend FamilyTable build_family(const Evaluator &, const FamilyContext &,
                                  int, Backend);
  FamilyTable(const FamilyContext &ctx, int n_max, Backend backend)
      : ctx_(ctx), n_max_(n_max), backend_(backend) {}
  FamilyContext ctx_;
  int n_max_;
  Backend backend_;
  int seed_evaluations_ = 0;
  std::vector<std::vector<UnnormalizedValue>> rows_; // rows_[lo][hi - lo]
};

FamilyTable build_family(const Evaluator &eval, const FamilyContext &ctx,
                         int n_max, Backend backend);

// Exhaustive check of the cross-pair transfer against direct evaluation:
// all shapes (n_plus, m_minus, m_plus) <= limit, on the all-zero context and
// `context_samples` seeded random contexts with off-axis indices <= limit.
// Exact arithmetic throughout; any mismatch is reported with its key.
struct FourIndexReport {
  bool valid = true;
  std::size_t checks = 0;
  std::string counterexample; // empty when valid
};

FourIndexReport validate_four_index(const Evaluator &eval, int limit,
                                    int context_samples, std::uint64_t seed);

} // namespace oscme::recurrence

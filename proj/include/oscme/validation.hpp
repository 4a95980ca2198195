// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Cross-validation of the closed-form evaluator against the quadrature
// oracle, and the cancellation audit of the float backend against the exact
// backend.

#pragma once

#include "oscme/closed_form.hpp"
#include "oscme/indices.hpp"
#include "oscme/oracle.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oscme::validate {

struct Options {
  int exhaustive_limit = 2;  // check every key with indices <= this
  int random_samples = 200;  // additional random keys ...
  int random_limit = 4;      // ... with indices <= this
  std::uint64_t seed = 20260823;
  double threshold = 1e-8;   // relative disagreement that counts as failure
  double floor = 1e-12;      // |values| below floor/a compare as zero
  // Test hook: when set, replaces the closed-form value fed into the
  // comparison (used to prove the validator catches a broken evaluator).
  std::function<double(const ElementKey &, double)> closed_override;
};

struct Mismatch {
  ElementKey key;
  double closed = 0.0, oracle = 0.0, rel = 0.0;
};

struct Report {
  std::size_t checked = 0;
  std::size_t selection_zeros = 0;
  double max_rel = 0.0;
  ElementKey worst_key{};
  std::vector<Mismatch> failures; // capped at 32
  bool pass = true;
};

// Runs the comparison with the evaluator's scale; float backend on the
// closed-form side.  Exhaustive sweep uses the amortized bulk oracle, the
// random sample uses refined single-key quadrature.
Report run(const Evaluator &eval, const Options &options);

// Float-vs-exact relative error by index level.  Level n checks the
// all-diagonal key, lopsided patterned keys, and `samples` random
// selection-passing keys whose largest index is exactly n.
struct LevelStat {
  int level = 0;
  double max_rel = 0.0;
  ElementKey worst_key{};
};

struct CancellationAudit {
  std::vector<LevelStat> levels;
  int max_clean_level = -1; // largest L with every level <= L within tol
  double tolerance = 1e-6;
};

CancellationAudit audit_float_cancellation(int max_level, int samples,
                                           std::uint64_t seed,
                                           double tolerance = 1e-6);

} // namespace oscme::validate

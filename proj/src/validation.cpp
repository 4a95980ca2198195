#include "oscme/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oscme::validate {

namespace {

// Relative disagreement with a floor: values that are both below the floor
// compare as equal (covers selection-rule zeros, where the oracle returns
// roundoff-level noise).
double rel_disagreement(double x, double y, double floor) {
  const double mag = std::max(std::abs(x), std::abs(y));
  if (mag < floor)
    return 0.0;
  return std::abs(x - y) / mag;
}

// Odometer over all keys with indices <= limit.
bool advance(std::array<int, 12> &digits, int limit) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < limit) {
      ++digits[i];
      std::fill(digits.begin(), digits.begin() + static_cast<long>(i), 0);
      return true;
    }
  }
  return false;
}

} // namespace

Report run(const Evaluator &eval, const Options &options) {
  if (options.exhaustive_limit < 0 || options.random_limit < 0)
    throw std::invalid_argument("validate: limits must be >= 0");
  if (options.exhaustive_limit > eval.max_index() ||
      options.random_limit > eval.max_index())
    throw std::invalid_argument(
        "validate: limits exceed the evaluator's max_index");

  const double a = eval.scale();
  const double floor = options.floor / a;
  Report report;

  auto closed_value = [&](const ElementKey &key) {
    double v = eval.element_direct(key, Backend::Float).value();
    if (options.closed_override)
      v = options.closed_override(key, v);
    return v;
  };

  auto compare = [&](const ElementKey &key, double closed, double oracle) {
    ++report.checked;
    if (!selection_rule(key).pass())
      ++report.selection_zeros;
    const double rel = rel_disagreement(closed, oracle, floor);
    const bool sign_conflict = std::abs(closed) >= floor &&
                               std::abs(oracle) >= floor &&
                               std::signbit(closed) != std::signbit(oracle);
    if (rel > report.max_rel) {
      report.max_rel = rel;
      report.worst_key = key;
    }
    if (rel > options.threshold || sign_conflict) {
      report.pass = false;
      if (report.failures.size() < 32)
        report.failures.push_back({key, closed, oracle, rel});
    }
  };

  // Exhaustive sweep via the amortized oracle.
  {
    const oracle::BulkOracle bulk(
        options.exhaustive_limit, a,
        oracle::QuadratureSpec::for_max_index(options.exhaustive_limit));
    std::array<int, 12> digits{};
    do {
      const ElementKey key = ElementKey::from_flat(digits);
      compare(key, closed_value(key), bulk.value(key));
    } while (advance(digits, options.exhaustive_limit));
  }

  // Random spot checks at the larger limit with refined single-key
  // quadrature.
  if (options.random_samples > 0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick(0, options.random_limit);
    const auto spec =
        oracle::QuadratureSpec::for_max_index(options.random_limit);
    for (int i = 0; i < options.random_samples; ++i) {
      std::array<int, 12> digits{};
      for (auto &d : digits)
        d = pick(rng);
      const ElementKey key = ElementKey::from_flat(digits);
      compare(key, closed_value(key),
              oracle::element_quadrature(key, a, spec).value);
    }
  }
  return report;
}

CancellationAudit audit_float_cancellation(int max_level, int samples,
                                           std::uint64_t seed,
                                           double tolerance) {
  if (max_level < 0)
    throw std::invalid_argument("audit: max_level must be >= 0");
  CancellationAudit audit;
  audit.tolerance = tolerance;
  const Evaluator eval(max_level);
  std::mt19937_64 rng(seed);

  for (int level = 0; level <= max_level; ++level) {
    LevelStat stat;
    stat.level = level;

    std::vector<ElementKey> keys;
    // Patterned keys: the all-diagonal key, the single-axis diagonal, the
    // (1,4)-only diagonal, and the high-s cross pattern (orbitals 1 and 3
    // excited), all of which pass the selection rule at any level.
    {
      ElementKey k{};
      for (auto &t : k.orbital)
        t = {level, level, level};
      keys.push_back(k);
    }
    {
      ElementKey k{};
      for (auto &t : k.orbital)
        t.nx = level;
      keys.push_back(k);
    }
    {
      ElementKey k{};
      k[0] = {level, level, level};
      k[3] = {level, level, level};
      keys.push_back(k);
    }
    {
      ElementKey k{};
      k[0].nx = level;
      k[1].nx = level;
      keys.push_back(k);
    }
    // Random selection-passing keys whose largest index is exactly `level`.
    std::uniform_int_distribution<int> pick(0, level);
    int found = 0, attempts = 0;
    while (found < samples && attempts < samples * 200) {
      ++attempts;
      std::array<int, 12> digits{};
      for (auto &d : digits)
        d = pick(rng);
      const ElementKey key = ElementKey::from_flat(digits);
      if (key.max_index() != level || !selection_rule(key).pass())
        continue;
      keys.push_back(key);
      ++found;
    }

    for (const ElementKey &key : keys) {
      const ElementValue exact = eval.element_direct(key, Backend::Exact);
      const double ref = exact.value();
      const double flt = eval.element_direct(key, Backend::Float).value();
      double rel;
      if (exact.exact().is_zero())
        rel = std::abs(flt) > 1e-18 ? 1.0 : 0.0;
      else
        rel = std::abs(flt - ref) / std::abs(ref);
      if (rel > stat.max_rel) {
        stat.max_rel = rel;
        stat.worst_key = key;
      }
    }
    audit.levels.push_back(stat);
  }

  audit.max_clean_level = -1;
  for (const auto &ls : audit.levels) {
    if (ls.max_rel > tolerance)
      break;
    audit.max_clean_level = ls.level;
  }
  return audit;
}

} // namespace oscme::validate

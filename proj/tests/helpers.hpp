// Shared helpers for the test suite.

#pragma once

#include "oscme/indices.hpp"

#include <array>
#include <cmath>
#include <random>

namespace test_util {

inline oscme::ElementKey key12(const std::array<int, 12> &v) {
  return oscme::ElementKey::from_flat(v);
}

inline oscme::ElementKey random_key(std::mt19937_64 &rng, int limit) {
  std::uniform_int_distribution<int> dist(0, limit);
  std::array<int, 12> v{};
  for (auto &x : v)
    x = dist(rng);
  return oscme::ElementKey::from_flat(v);
}

inline oscme::ElementKey random_passing_key(std::mt19937_64 &rng, int limit) {
  for (;;) {
    const auto k = random_key(rng, limit);
    if (oscme::selection_rule(k).pass())
      return k;
  }
}

inline oscme::ElementKey random_failing_key(std::mt19937_64 &rng, int limit) {
  for (;;) {
    const auto k = random_key(rng, limit);
    if (!oscme::selection_rule(k).pass())
      return k;
  }
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace test_util

// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Microbenchmark comparing recurrence-based family construction against an
// equivalent direct-evaluation loop over the same set of index pairs.

#pragma once

#include "oscme/closed_form.hpp"

#include <cstdint>

namespace oscme::bench {

struct BenchResult {
  int n_max = 0;
  int repetitions = 0;
  std::uint64_t direct_ns = 0;     // total over repetitions
  std::uint64_t recurrence_ns = 0; // total over repetitions
  double ratio = 0.0;              // direct_ns / recurrence_ns
};

// Times the construction of one family (all-zero context, x axis, pair 1-4)
// covering every unordered pair reachable with the given n_max: once by
// direct closed-form evaluation of each pair, once by seeded recurrence.
BenchResult run_family_bench(int n_max, int repetitions,
                             Backend backend = Backend::Float);

} // namespace oscme::bench

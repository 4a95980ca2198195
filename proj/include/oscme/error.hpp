// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Error types shared across the library.  Contract violations (bad arguments,
// out-of-range indices) throw std::invalid_argument / std::out_of_range
// directly; the types below cover runtime failures that callers may want to
// distinguish programmatically.

#pragma once

#include <stdexcept>
#include <string>

namespace oscme {

// Float-backend evaluation produced a non-finite intermediate or result.
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string &msg) : std::runtime_error(msg) {}
};

// A recurrence step was asked to produce a value whose required neighbor was
// not supplied.  Carries the (n_minus, n_plus) pair of the missing entry.
struct MissingNeighborError : std::runtime_error {
  int n_minus, n_plus;
  MissingNeighborError(int nm, int np, const std::string &msg)
      : std::runtime_error(msg), n_minus(nm), n_plus(np) {}
};

// Successive quadrature refinements disagreed beyond the requested target.
struct NonConvergenceError : std::runtime_error {
  double achieved;
  NonConvergenceError(double got, const std::string &msg)
      : std::runtime_error(msg), achieved(got) {}
};

// A serialized tensor file is malformed (bad magic, truncation, bad field).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string &msg) : std::runtime_error(msg) {}
};

// A serialized tensor file failed its integrity digest check.
struct DigestError : std::runtime_error {
  explicit DigestError(const std::string &msg) : std::runtime_error(msg) {}
};

// A lookup was made for a key outside the cutoff of the store being queried.
struct OutOfCutoffError : std::out_of_range {
  explicit OutOfCutoffError(const std::string &msg) : std::out_of_range(msg) {}
};

// A bulk-build request whose estimated size exceeds the configured limit.
struct MemoryLimitError : std::runtime_error {
  std::size_t estimated_keys;
  MemoryLimitError(std::size_t n, const std::string &msg)
      : std::runtime_error(msg), estimated_keys(n) {}
};

// One or more per-key failures inside a batch evaluation.
struct BatchError : std::runtime_error {
  explicit BatchError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace oscme

// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Bulk interaction tensors over a finite basis.  A store holds one value per
// canonical nonzero key inside its cutoff; lookups canonicalize, so any of
// the up-to-eight equivalent index orders resolves to the same entry.
// Stores serialize to a binary format (with an integrity digest), JSON, and
// CSV, all of which round-trip bit-exactly.

#pragma once

#include "oscme/closed_form.hpp"
#include "oscme/error.hpp"
#include "oscme/indices.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace oscme::tensor {

enum class CutoffMode : std::uint8_t { PerAxis = 0, TotalQuanta = 1 };

// Basis truncation: PerAxis keeps states with every n_i <= value;
// TotalQuanta keeps states with n_x + n_y + n_z <= value.
struct BasisCutoff {
  CutoffMode mode = CutoffMode::TotalQuanta;
  int value = 0;

  bool contains(const QuantumTriple &t) const;
  bool contains(const ElementKey &k) const;
  std::vector<QuantumTriple> states() const; // deterministic (sorted) order
  std::size_t state_count() const;
  std::string str() const;
};

enum class BuildStrategy { Direct, Recurrence };
enum class Format { Binary, Json, Csv };

struct BuildOptions {
  Backend backend = Backend::Float;
  BuildStrategy strategy = BuildStrategy::Direct;
  int workers = 1;
  // Refuse builds whose candidate key count exceeds this (memory estimate).
  std::size_t max_keys = 200'000'000;
};

// Candidate key count for a cutoff: |basis|^4 quadruples to visit.
std::size_t estimate_keys(const BasisCutoff &cutoff);

class TensorStore {
public:
  TensorStore(const BasisCutoff &cutoff, double a, Backend backend);

  const BasisCutoff &cutoff() const { return cutoff_; }
  double scale() const { return a_; }
  Backend backend() const { return backend_; }
  const std::string &code_version() const { return code_version_; }
  std::size_t count() const { return elements_.size(); }
  const std::map<ElementKey, double> &elements() const { return elements_; }

  // Canonicalizing lookup: nonzero stored values, 0.0 for in-cutoff keys
  // that are absent (selection-rule zeros), OutOfCutoffError otherwise.
  double lookup(const ElementKey &key) const;

  // Insert a canonical nonzero entry (build-time use).
  void insert(const ElementKey &canonical, double value);

  // SHA-256 over the canonical binary serialization (header + records).
  std::array<std::uint8_t, 32> digest() const;

  std::vector<std::uint8_t> serialize_binary() const;
  std::string serialize_json() const;
  std::string serialize_csv() const;

  static TensorStore parse_binary(const std::vector<std::uint8_t> &bytes);
  static TensorStore parse_json(const std::string &text);
  static TensorStore parse_csv(const std::string &text);

  // Format chosen by extension: .oscv/.bin -> Binary, .json -> Json,
  // .csv -> Csv.
  void export_file(const std::filesystem::path &path, Format fmt) const;
  static TensorStore import_file(const std::filesystem::path &path);
  static Format format_for_path(const std::filesystem::path &path);

private:
  BasisCutoff cutoff_;
  double a_ = 1.0;
  Backend backend_ = Backend::Float;
  std::string code_version_;
  std::map<ElementKey, double> elements_;
};

// Build the full tensor for a cutoff.  Deterministic: the result (and its
// serialized bytes) is identical for any worker count.  Throws
// MemoryLimitError when estimate_keys exceeds options.max_keys.
TensorStore build_tensor(const BasisCutoff &cutoff, double a,
                         const BuildOptions &options = {});

} // namespace oscme::tensor

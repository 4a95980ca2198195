// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Index bookkeeping: quantum-number triples, four-orbital element keys, the
// per-axis (n_-, n_+) pair decomposition, the parity selection rule, and the
// canonical representative of an element's symmetry orbit.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace oscme {

// Cartesian quantum numbers (n_x, n_y, n_z) of one 3D oscillator state.
struct QuantumTriple {
  int nx = 0, ny = 0, nz = 0;

  auto operator<=>(const QuantumTriple &) const = default;

  int operator[](int axis) const;
  int &operator[](int axis);
  int total() const { return nx + ny + nz; } // shell number N = n_x+n_y+n_z
};

// The four single-particle states of a two-body matrix element
// <lambda1 lambda2 | 1/r12 | lambda3 lambda4>.  Particles pair as (1,4) --
// both attached to coordinate r1 -- and (2,3), attached to r2.
struct ElementKey {
  std::array<QuantumTriple, 4> orbital{};

  auto operator<=>(const ElementKey &) const = default;

  QuantumTriple &operator[](int i) { return orbital[static_cast<std::size_t>(i)]; }
  const QuantumTriple &operator[](int i) const {
    return orbital[static_cast<std::size_t>(i)];
  }

  // Flat views in the fixed order nx1 ny1 nz1 nx2 ... nz4.
  std::array<int, 12> flat() const;
  static ElementKey from_flat(const std::array<int, 12> &v);

  int max_index() const;   // largest single quantum number in the key
  std::string str() const; // "(0,0,0)(0,1,0)(0,1,0)(0,0,0)"
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };
enum class ParticlePair : int { P14 = 0, P23 = 1 };

// Ordered pair n_minus = min(a,b), n_plus = max(a,b) for one axis of one
// particle pair, plus the quantities derived from it that the closed form
// uses: diff = n_plus - n_minus and the parity of a+b.
struct AxisPair {
  int n_minus = 0, n_plus = 0;

  auto operator<=>(const AxisPair &) const = default;

  int diff() const { return n_plus - n_minus; }
  int sum() const { return n_plus + n_minus; }
};

// Build the (min,max) pair from two quantum numbers of one axis.  Symmetric:
// axis_pair(a,b) == axis_pair(b,a).  Negative input is a contract violation.
AxisPair axis_pair(int a, int b);

// Extract the (1,4) or (2,3) pair of the given axis from a key.
AxisPair axis_pair(const ElementKey &key, Axis axis, ParticlePair pair);

// Parity selection rule, applied per axis.  For axis i the element vanishes
// identically unless diff14 + diff23 is even; when it is even,
// s_i = (diff14 + diff23) / 2.  Result holds s_i per axis, or nullopt for an
// axis that violates the rule.
struct SelectionResult {
  std::array<std::optional<int>, 3> s{};

  bool pass() const { return s[0] && s[1] && s[2]; }
  int s_total() const; // sum of s_i; only valid when pass()
  std::string str() const;
};

SelectionResult selection_rule(const ElementKey &key);

// Canonical representative of the symmetry orbit of a key under the group
// generated by: swap of orbitals 1 and 4, swap of orbitals 2 and 3, and the
// particle-label exchange (1,2,3,4) -> (2,1,4,3).  All eight images share the
// same matrix element.  The representative is the lexicographic minimum of
// the flat 12-tuples; multiplicity is the orbit size (1, 2, 4 or 8).
struct CanonicalKey {
  ElementKey key;
  int multiplicity = 1;
};

CanonicalKey canonical_key(const ElementKey &key);

// The eight (not necessarily distinct) symmetry images of a key.
std::array<ElementKey, 8> symmetry_images(const ElementKey &key);

} // namespace oscme

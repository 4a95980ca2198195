// oscme -- Coulomb matrix elements in the 3D harmonic-oscillator product basis.
//
// Independent numerical evaluation of the same matrix elements by
// quadrature, used to validate the closed form.  The 1/r12 kernel is written
// as a Gaussian integral, which factorizes the six-dimensional integral into
// a product of three two-dimensional axis integrals per Gaussian width.
// After rotating each axis integral to center-of-mass-like coordinates it is
// a polynomial times a Gaussian, so tensor Gauss-Hermite quadrature is exact
// there; the only approximation is the outer width integral, mapped to a
// finite interval and handled by Gauss-Legendre.

#pragma once

#include "oscme/error.hpp"
#include "oscme/indices.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace oscme::oracle {

struct QuadratureSpec {
  int hermite_nodes = 16; // per dimension of each axis integral
  int theta_nodes = 64;   // for the transformed width integral
  double target_rel_error = 1e-10;

  // Node counts that make the inner quadrature exact for all keys with
  // indices <= max_index, with margin.
  static QuadratureSpec for_max_index(int max_index);
  void validate() const; // throws std::invalid_argument on nonsense
};

// Oscillator eigenfunction psi_n(x) for length scale a, evaluated through
// the normalized three-term recurrence (stable and overflow-free where the
// raw Hermite polynomials are not).
double hermite_wavefunction(int n, double x, double a);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0; // |refined - base|, absolute
};

// One element by quadrature, with an error estimate from comparing the
// requested resolution against a refined one (doubled width nodes, +8
// Hermite nodes).  Throws NonConvergenceError when the two disagree beyond
// spec.target_rel_error relative to the result (with an absolute floor for
// values that vanish).
QuadratureResult element_quadrature(const ElementKey &key, double a,
                                    const QuadratureSpec &spec);

// Amortized oracle for sweeps: precomputes every distinct per-axis integral
// for indices <= max_index on the width grid once; value() is then a single
// O(theta_nodes) contraction per key.
class BulkOracle {
public:
  BulkOracle(int max_index, double a, const QuadratureSpec &spec);

  int max_index() const { return max_index_; }
  double value(const ElementKey &key) const; // throws std::out_of_range

private:
  int max_index_;
  double a_;
  int theta_nodes_;
  std::vector<double> theta_weight_; // GL weight * jacobian, per width node
  std::vector<double> axis_table_;   // [combo][width node]
  std::size_t stride_;

  std::size_t combo_index(int n1, int n4, int n2, int n3) const;
};

// Single-axis Fourier factor C^{n1}_{n4}(q): the overlap of two oscillator
// states against a plane wave, in closed form (associated Laguerre times
// Gaussian).  convolution_d of the companion pair is C at -q.
std::complex<double> convolution_c(int n1, int n4, double q, double a);
std::complex<double> convolution_d(int n2, int n3, double q, double a);

// The same quantity by direct Gauss-Hermite quadrature of the defining
// integral, for cross-checking the closed form.
std::complex<double> convolution_c_quadrature(int n1, int n4, double q,
                                              double a, int nodes);

// Gauss-Hermite rule: nodes/weights for weight e^{-x^2} on (-inf, inf).
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);
// Gauss-Legendre rule on (-1, 1).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

} // namespace oscme::oracle

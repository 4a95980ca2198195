#include "oscme/oracle.hpp"

#include "oscme/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oscme::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
const double kPiQuarterRoot = std::pow(kPi, -0.25); // pi^(-1/4)

// Normalized Hermite-sans-Gaussian polynomials htilde_n(u) for n = 0..nmax:
// htilde_0 = pi^(-1/4), htilde_n = u sqrt(2/n) htilde_{n-1}
//                                  - sqrt((n-1)/n) htilde_{n-2}.
// psi_n(x) = htilde_n(x/a) exp(-x^2/(2a^2)) / sqrt(a).  The recurrence keeps
// every intermediate O(1) where raw Hermite polynomials overflow.
void htilde_all(int nmax, double u, double *out) {
  out[0] = kPiQuarterRoot;
  if (nmax == 0)
    return;
  out[1] = u * std::numbers::sqrt2 * kPiQuarterRoot;
  for (int n = 2; n <= nmax; ++n)
    out[n] = u * std::sqrt(2.0 / n) * out[n - 1] -
             std::sqrt((n - 1.0) / n) * out[n - 2];
}

double htilde_single(int n, double u) {
  std::vector<double> buf(static_cast<std::size_t>(n) + 1);
  htilde_all(n, u, buf.data());
  return buf[static_cast<std::size_t>(n)];
}

// One evaluation of the element at fixed node counts.  See the header: the
// width integral over t in (0, inf) is mapped to theta in (0, pi/2) by
// t = tan(theta) / a, and each axis factor is a rotated 2D Gauss-Hermite sum
// that is exact for polynomial degree below the node count.
double eval_once(const ElementKey &key, double a, int hermite_nodes,
                 int theta_nodes) {
  const auto [hx, hw] = gauss_hermite(hermite_nodes);
  const auto [lx, lw] = gauss_legendre(theta_nodes);

  const int ntop = key.max_index();
  std::vector<double> h1(static_cast<std::size_t>(ntop) + 1);
  std::vector<double> h2(static_cast<std::size_t>(ntop) + 1);

  double total = 0.0;
  for (int it = 0; it < theta_nodes; ++it) {
    const double theta = (lx[static_cast<std::size_t>(it)] + 1.0) * (kPi / 4.0);
    const double jac = lw[static_cast<std::size_t>(it)] * (kPi / 4.0);
    const double tau = std::tan(theta);
    const double sec2 = 1.0 + tau * tau; // d(tan)/d(theta) = sec^2
    const double beta = 1.0 + 2.0 * tau * tau;
    const double inv_root_beta = 1.0 / std::sqrt(beta);

    double acc[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < hermite_nodes; ++i) {
      const double p = hx[static_cast<std::size_t>(i)];
      const double wi = hw[static_cast<std::size_t>(i)];
      for (int j = 0; j < hermite_nodes; ++j) {
        const double v = hx[static_cast<std::size_t>(j)];
        const double wij = wi * hw[static_cast<std::size_t>(j)];
        const double u1 = (p + v * inv_root_beta) / std::numbers::sqrt2;
        const double u2 = (p - v * inv_root_beta) / std::numbers::sqrt2;
        htilde_all(ntop, u1, h1.data());
        htilde_all(ntop, u2, h2.data());
        for (int ax = 0; ax < 3; ++ax)
          acc[ax] += wij * h1[static_cast<std::size_t>(key[0][ax])] *
                     h1[static_cast<std::size_t>(key[3][ax])] *
                     h2[static_cast<std::size_t>(key[1][ax])] *
                     h2[static_cast<std::size_t>(key[2][ax])];
      }
    }
    const double irb3 = inv_root_beta * inv_root_beta * inv_root_beta;
    total += jac * sec2 * acc[0] * acc[1] * acc[2] * irb3;
  }
  return total * 2.0 / (a * std::sqrt(kPi));
}

} // namespace

QuadratureSpec QuadratureSpec::for_max_index(int max_index) {
  if (max_index < 0)
    throw std::invalid_argument("QuadratureSpec: max_index must be >= 0");
  QuadratureSpec s;
  s.hermite_nodes = 2 * max_index + 8;
  s.theta_nodes = 64;
  return s;
}

void QuadratureSpec::validate() const {
  if (hermite_nodes < 1 || theta_nodes < 1)
    throw std::invalid_argument("QuadratureSpec: node counts must be >= 1");
  if (!(target_rel_error > 0.0) || !std::isfinite(target_rel_error))
    throw std::invalid_argument("QuadratureSpec: target_rel_error must be positive");
}

double hermite_wavefunction(int n, double x, double a) {
  if (n < 0)
    throw std::invalid_argument("hermite_wavefunction: n must be >= 0");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("hermite_wavefunction: a must be finite and > 0");
  const double u = x / a;
  return htilde_single(n, u) * std::exp(-0.5 * u * u) / std::sqrt(a);
}

QuadratureResult element_quadrature(const ElementKey &key, double a,
                                    const QuadratureSpec &spec) {
  spec.validate();
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("element_quadrature: a must be finite and > 0");
  for (const auto &t : key.orbital)
    for (int ax = 0; ax < 3; ++ax)
      if (t[ax] < 0)
        throw std::invalid_argument("element_quadrature: negative quantum number");

  // The inner Gauss-Hermite stage must be exact: per-axis polynomial degree
  // reaches the sum of the four indices of that axis.
  int need = 0;
  for (int ax = 0; ax < 3; ++ax) {
    const int deg = key[0][ax] + key[1][ax] + key[2][ax] + key[3][ax];
    need = std::max(need, deg / 2 + 1);
  }
  const int hn = std::max(spec.hermite_nodes, need);

  const double base = eval_once(key, a, hn, spec.theta_nodes);
  const double refined = eval_once(key, a, hn + 8, 2 * spec.theta_nodes);

  QuadratureResult r;
  r.value = refined;
  r.error_estimate = std::abs(refined - base);

  // Converged when the refinement shift is small relative to the value, or
  // when both live at roundoff level (selection-rule zeros come out as
  // ~1e-20 noise, far below any element's natural 1/a magnitude).
  const double floor = 1e-13 / a;
  const bool noise_zero = std::max(std::abs(refined), r.error_estimate) <= floor;
  const double achieved = r.error_estimate / std::max(std::abs(refined), floor);
  if (!noise_zero && achieved > spec.target_rel_error) {
    char msg[256];
    std::snprintf(msg, sizeof(msg),
                  "element_quadrature: refinement disagreement %.3e exceeds "
                  "target %.3e for key %s",
                  achieved, spec.target_rel_error, key.str().c_str());
    throw NonConvergenceError(achieved, msg);
  }
  return r;
}

BulkOracle::BulkOracle(int max_index, double a, const QuadratureSpec &spec)
    : max_index_(max_index), a_(a), theta_nodes_(spec.theta_nodes) {
  spec.validate();
  if (max_index < 0)
    throw std::invalid_argument("BulkOracle: max_index must be >= 0");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("BulkOracle: a must be finite and > 0");

  const int hn = std::max(spec.hermite_nodes, 2 * max_index + 1);
  const auto [hx, hw] = gauss_hermite(hn);
  const auto [lx, lw] = gauss_legendre(theta_nodes_);

  const std::size_t m = static_cast<std::size_t>(max_index) + 1;
  stride_ = static_cast<std::size_t>(theta_nodes_);
  axis_table_.assign(m * m * m * m * stride_, 0.0);
  theta_weight_.resize(stride_);

  std::vector<double> h1(m), h2(m);
  for (int it = 0; it < theta_nodes_; ++it) {
    const double theta = (lx[static_cast<std::size_t>(it)] + 1.0) * (kPi / 4.0);
    const double jac = lw[static_cast<std::size_t>(it)] * (kPi / 4.0);
    const double tau = std::tan(theta);
    const double sec2 = 1.0 + tau * tau;
    const double beta = 1.0 + 2.0 * tau * tau;
    const double inv_root_beta = 1.0 / std::sqrt(beta);
    theta_weight_[static_cast<std::size_t>(it)] =
        jac * sec2 * 2.0 / (a_ * std::sqrt(kPi));

    for (int i = 0; i < hn; ++i) {
      const double p = hx[static_cast<std::size_t>(i)];
      const double wi = hw[static_cast<std::size_t>(i)];
      for (int j = 0; j < hn; ++j) {
        const double v = hx[static_cast<std::size_t>(j)];
        const double w = wi * hw[static_cast<std::size_t>(j)] * inv_root_beta;
        const double u1 = (p + v * inv_root_beta) / std::numbers::sqrt2;
        const double u2 = (p - v * inv_root_beta) / std::numbers::sqrt2;
        htilde_all(max_index_, u1, h1.data());
        htilde_all(max_index_, u2, h2.data());
        // Accumulate every (n1, n4, n2, n3) combination at this node pair.
        std::size_t idx = 0;
        for (std::size_t c1 = 0; c1 < m; ++c1)
          for (std::size_t c4 = 0; c4 < m; ++c4) {
            const double f14 = w * h1[c1] * h1[c4];
            for (std::size_t c2 = 0; c2 < m; ++c2) {
              const double f142 = f14 * h2[c2];
              for (std::size_t c3 = 0; c3 < m; ++c3) {
                axis_table_[idx * stride_ + static_cast<std::size_t>(it)] +=
                    f142 * h2[c3];
                ++idx;
              }
            }
          }
      }
    }
  }
}

std::size_t BulkOracle::combo_index(int n1, int n4, int n2, int n3) const {
  const std::size_t m = static_cast<std::size_t>(max_index_) + 1;
  return ((static_cast<std::size_t>(n1) * m + static_cast<std::size_t>(n4)) * m +
          static_cast<std::size_t>(n2)) *
             m +
         static_cast<std::size_t>(n3);
}

double BulkOracle::value(const ElementKey &key) const {
  for (const auto &t : key.orbital)
    for (int ax = 0; ax < 3; ++ax)
      if (t[ax] < 0 || t[ax] > max_index_)
        throw std::out_of_range("BulkOracle: index outside precomputed range");
  const double *ax_x =
      &axis_table_[combo_index(key[0].nx, key[3].nx, key[1].nx, key[2].nx) * stride_];
  const double *ax_y =
      &axis_table_[combo_index(key[0].ny, key[3].ny, key[1].ny, key[2].ny) * stride_];
  const double *ax_z =
      &axis_table_[combo_index(key[0].nz, key[3].nz, key[1].nz, key[2].nz) * stride_];
  double total = 0.0;
  for (std::size_t it = 0; it < stride_; ++it)
    total += theta_weight_[it] * ax_x[it] * ax_y[it] * ax_z[it];
  return total;
}

std::complex<double> convolution_c(int n1, int n4, double q, double a) {
  if (n1 < 0 || n4 < 0)
    throw std::invalid_argument("convolution_c: indices must be >= 0");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("convolution_c: a must be finite and > 0");
  const int nm = std::min(n1, n4), np = std::max(n1, n4);
  const int d = np - nm;
  const double x = 0.5 * a * a * q * q; // Laguerre argument a^2 q^2 / 2
  double norm = std::sqrt(to_double(BigRational(pow2(static_cast<unsigned long>(d)) *
                                                    factorial(nm),
                                                factorial(np))));
  double poly = std::assoc_laguerre(static_cast<unsigned>(nm),
                                    static_cast<unsigned>(d), x);
  double radial = std::exp(-0.5 * x) * std::pow(0.5 * a * q, d);
  // Phase i^(n1+n4) (-1)^(n_plus).
  std::complex<double> phase(1.0, 0.0);
  switch ((n1 + n4) % 4) {
  case 1:
    phase = {0.0, 1.0};
    break;
  case 2:
    phase = {-1.0, 0.0};
    break;
  case 3:
    phase = {0.0, -1.0};
    break;
  default:
    break;
  }
  if (np % 2)
    phase = -phase;
  return phase * (norm * poly * radial);
}

std::complex<double> convolution_d(int n2, int n3, double q, double a) {
  return convolution_c(n2, n3, -q, a);
}

std::complex<double> convolution_c_quadrature(int n1, int n4, double q,
                                              double a, int nodes) {
  if (nodes < 1)
    throw std::invalid_argument("convolution_c_quadrature: nodes must be >= 1");
  const auto [hx, hw] = gauss_hermite(nodes);
  const int ntop = std::max(n1, n4);
  std::vector<double> h(static_cast<std::size_t>(ntop) + 1);
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < nodes; ++i) {
    const double u = hx[static_cast<std::size_t>(i)];
    htilde_all(ntop, u, h.data());
    const double f = hw[static_cast<std::size_t>(i)] *
                     h[static_cast<std::size_t>(n1)] *
                     h[static_cast<std::size_t>(n4)];
    const double phi = q * a * u;
    acc += f * std::complex<double>(std::cos(phi), -std::sin(phi));
  }
  return acc;
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_hermite: need at least one node");
  std::vector<double> x(static_cast<std::size_t>(n)),
      w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    // Standard initial guesses for the largest roots downward.
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[static_cast<std::size_t>(i) - 2];

    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate the orthonormal Hermite function and its derivative.
      double p1 = std::pow(kPi, -0.25), p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15)
        break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: need at least one node");
  std::vector<double> x(static_cast<std::size_t>(n)),
      w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15)
        break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  return {x, w};
}

} // namespace oscme::oracle

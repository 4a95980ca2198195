#include "oscme/closed_form.hpp"

#include "oscme/dd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace oscme {

namespace {

struct AxisData {
  AxisPair p14, p23;
  int s = 0;
};

std::array<AxisData, 3> decompose(const ElementKey &key,
                                  const SelectionResult &sel) {
  std::array<AxisData, 3> out;
  for (int ax = 0; ax < 3; ++ax) {
    auto &d = out[static_cast<std::size_t>(ax)];
    d.p14 = axis_pair(key, static_cast<Axis>(ax), ParticlePair::P14);
    d.p23 = axis_pair(key, static_cast<Axis>(ax), ParticlePair::P23);
    d.s = *sel.s[static_cast<std::size_t>(ax)];
  }
  return out;
}

// Parity of the phase exponent sum(n of orbital 1) + sum(n of orbital 4)
// - s_total.
int phase_sign(const ElementKey &key, int s_total) {
  const int e = key[0].total() + key[3].total() - s_total;
  return (e % 2 == 0) ? +1 : -1;
}

// Per-axis weight vector w[m] = sum over k + k' = m of the axis terms.
// All terms of a given m carry the same sign (-1)^m, so this aggregation
// involves no cancellation.
std::vector<BigRational> axis_weights(const AxisData &d) {
  std::vector<BigRational> w(
      static_cast<std::size_t>(d.p14.n_minus + d.p23.n_minus) + 1, BigRational(0));
  for (const AxisTerm &t : axis_sum(d.p14, d.p23, d.s))
    w[static_cast<std::size_t>(t.k + t.kp)] += t.coeff;
  return w;
}

std::vector<BigRational> convolve(const std::vector<BigRational> &x,
                                  const std::vector<BigRational> &y) {
  std::vector<BigRational> out(x.size() + y.size() - 1, BigRational(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      out[i + j] += x[i] * y[j];
  return out;
}

std::vector<DDouble> convolve(const std::vector<DDouble> &x,
                              const std::vector<DDouble> &y) {
  std::vector<DDouble> out(x.size() + y.size() - 1, DDouble(0.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      out[i + j] = dd_add(out[i + j], dd_mul(x[i], y[j]));
  return out;
}

// Radicand of the normalization factor: product over axes of
// 2^(2s) * (nm14! / np14!) * (nm23! / np23!).
BigRational norm_radicand(const std::array<AxisData, 3> &axes,
                          const CombinatoricsTable &tab) {
  BigRational r(1);
  for (const AxisData &d : axes) {
    r *= BigRational(pow2(static_cast<unsigned long>(2 * d.s)));
    r *= BigRational(tab.fact(d.p14.n_minus), tab.fact(d.p14.n_plus));
    r *= BigRational(tab.fact(d.p23.n_minus), tab.fact(d.p23.n_plus));
  }
  r.canonicalize();
  return r;
}

} // namespace

std::string backend_name(Backend b) {
  return b == Backend::Float ? "float" : "exact";
}

Backend backend_from_name(const std::string &name) {
  if (name == "float")
    return Backend::Float;
  if (name == "exact")
    return Backend::Exact;
  throw std::invalid_argument("unknown backend '" + name +
                              "' (expected float or exact)");
}

OscillatorScale::OscillatorScale(double a_) : a(a_) {
  if (!std::isfinite(a) || a <= 0.0)
    throw std::invalid_argument("OscillatorScale: length must be finite and > 0");
}

ElementValue ElementValue::from_float(double v, double a) {
  ElementValue e;
  e.backend_ = Backend::Float;
  e.a_ = a;
  e.float_value_ = v;
  return e;
}

ElementValue ElementValue::from_exact(const ExactValue &ev, double a) {
  ElementValue e;
  e.backend_ = Backend::Exact;
  e.a_ = a;
  e.exact_ = ev;
  return e;
}

double ElementValue::value() const {
  if (backend_ == Backend::Float)
    return float_value_;
  return exact_.to_double() * kRoot2OverPi / a_;
}

const ExactValue &ElementValue::exact() const {
  if (backend_ != Backend::Exact)
    throw std::logic_error("ElementValue: no exact payload on the float backend");
  return exact_;
}

bool ElementValue::is_zero() const {
  return backend_ == Backend::Float ? float_value_ == 0.0 : exact_.is_zero();
}

std::vector<AxisTerm> axis_sum(const AxisPair &p14, const AxisPair &p23,
                               int s) {
  if (s < 0)
    throw std::invalid_argument("axis_sum: s must be non-negative");
  std::vector<AxisTerm> out;
  out.reserve(static_cast<std::size_t>((p14.n_minus + 1) * (p23.n_minus + 1)));
  for (int k = 0; k <= p14.n_minus; ++k) {
    const BigInt b1 = binomial(p14.n_plus, p14.n_minus - k);
    if (b1 == 0)
      continue;
    for (int kp = 0; kp <= p23.n_minus; ++kp) {
      const BigInt b2 = binomial(p23.n_plus, p23.n_minus - kp);
      if (b2 == 0)
        continue;
      AxisTerm t;
      t.k = k;
      t.kp = kp;
      BigInt num = b1 * b2 * double_factorial(2 * s + 2 * (k + kp) - 1);
      if ((k + kp) % 2)
        num = -num;
      const BigInt den = factorial(k) * factorial(kp) *
                         pow2(static_cast<unsigned long>(2 * s + k + kp));
      t.coeff = BigRational(num, den);
      t.coeff.canonicalize();
      out.push_back(std::move(t));
    }
  }
  return out;
}

CombinatoricsTable::CombinatoricsTable(int max_index) : max_index_(max_index) {
  if (max_index < 0)
    throw std::invalid_argument("CombinatoricsTable: max_index must be >= 0");
  fact_.reserve(static_cast<std::size_t>(max_index) + 1);
  for (int n = 0; n <= max_index; ++n)
    fact_.push_back(factorial(n));
  // Double factorials for m = -1 .. 4*max_index + 1 (stored at offset m+1).
  dfact_.reserve(static_cast<std::size_t>(4 * max_index) + 3);
  for (int m = -1; m <= 4 * max_index + 1; ++m)
    dfact_.push_back(double_factorial(m));
  binom_.resize(static_cast<std::size_t>(max_index) + 1);
  for (int n = 0; n <= max_index; ++n) {
    auto &row = binom_[static_cast<std::size_t>(n)];
    row.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
      row.push_back(binomial(n, k));
  }
}

const BigInt &CombinatoricsTable::fact(int n) const {
  if (n < 0 || n > max_index_)
    throw std::out_of_range("CombinatoricsTable: factorial index out of range");
  return fact_[static_cast<std::size_t>(n)];
}

const BigInt &CombinatoricsTable::dfact(int m) const {
  if (m < -1 || m > 4 * max_index_ + 1)
    throw std::out_of_range("CombinatoricsTable: double-factorial index out of range");
  return dfact_[static_cast<std::size_t>(m + 1)];
}

const BigInt &CombinatoricsTable::binom(int n, int k) const {
  if (n < 0 || n > max_index_)
    throw std::out_of_range("CombinatoricsTable: binomial row out of range");
  if (k < 0 || k > n)
    return zero_;
  return binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

Evaluator::Evaluator(int max_index, OscillatorScale scale)
    : tables_(std::make_shared<const CombinatoricsTable>(max_index)),
      a_(scale.a) {}

ElementValue Evaluator::element_direct(const ElementKey &key,
                                       Backend backend) const {
  for (const auto &t : key.orbital)
    for (int ax = 0; ax < 3; ++ax) {
      if (t[ax] < 0)
        throw std::invalid_argument("element_direct: negative quantum number");
      if (t[ax] > max_index())
        throw std::out_of_range("element_direct: index " + std::to_string(t[ax]) +
                                " exceeds evaluator max_index " +
                                std::to_string(max_index()));
    }

  const SelectionResult sel = selection_rule(key);
  if (!sel.pass()) {
    return backend == Backend::Exact
               ? ElementValue::from_exact(ExactValue(), a_)
               : ElementValue::from_float(0.0, a_);
  }

  const auto axes = decompose(key, sel);
  const int s_total = sel.s_total();
  const int sign = phase_sign(key, s_total);

  // Per-axis weight vectors, exact.
  std::array<std::vector<BigRational>, 3> w;
  for (int ax = 0; ax < 3; ++ax)
    w[static_cast<std::size_t>(ax)] = axis_weights(axes[static_cast<std::size_t>(ax)]);

  if (backend == Backend::Exact) {
    const std::vector<BigRational> t3 = convolve(convolve(w[0], w[1]), w[2]);
    BigRational s_sum(0);
    for (std::size_t m = 0; m < t3.size(); ++m) {
      BigRational term = t3[m];
      term /= BigRational(2 * (s_total + static_cast<long>(m)) + 1);
      s_sum += term;
    }
    s_sum.canonicalize();
    if (sign < 0)
      s_sum = -s_sum;
    if (sgn(s_sum) == 0)
      return ElementValue::from_exact(ExactValue(), a_);
    return ElementValue::from_exact(
        ExactValue::make(s_sum, norm_radicand(axes, *tables_)), a_);
  }

  // Float backend: the alternating sums cancel catastrophically at larger
  // indices, so every accumulation runs in double-double; the inputs are
  // exact-to-working-precision conversions of the rational weights.
  std::array<std::vector<DDouble>, 3> wd;
  for (int ax = 0; ax < 3; ++ax) {
    const auto &src = w[static_cast<std::size_t>(ax)];
    auto &dst = wd[static_cast<std::size_t>(ax)];
    dst.reserve(src.size());
    for (const auto &q : src)
      dst.push_back(to_ddouble(q));
  }
  const std::vector<DDouble> t3 = convolve(convolve(wd[0], wd[1]), wd[2]);
  DDouble s_sum(0.0);
  for (std::size_t m = 0; m < t3.size(); ++m) {
    const double denom = 2.0 * (s_total + static_cast<double>(m)) + 1.0;
    s_sum = dd_add(s_sum, dd_div(t3[m], DDouble(denom)));
  }
  const double root_r =
      std::sqrt(to_double(norm_radicand(axes, *tables_)));
  double v = sign * s_sum.value() * root_r * kRoot2OverPi / a_;
  if (!std::isfinite(v))
    throw OverflowError("element_direct: non-finite float result for key " +
                        key.str() + "; use the exact backend");
  return ElementValue::from_float(v, a_);
}

std::vector<ElementValue> Evaluator::element_batch(
    std::span<const ElementKey> keys, Backend backend, int workers) const {
  if (workers < 1)
    throw std::invalid_argument("element_batch: workers must be >= 1");
  const std::size_t n = keys.size();
  std::vector<ElementValue> out(n, ElementValue::from_float(0.0, a_));
  if (n == 0)
    return out;

  const int nw = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  struct Failure {
    std::size_t index;
    std::string message;
  };
  std::vector<std::vector<Failure>> failures(static_cast<std::size_t>(nw));

  auto run = [&](int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < n;
         i += static_cast<std::size_t>(nw)) {
      try {
        out[i] = element_direct(keys[i], backend);
      } catch (const std::exception &e) {
        failures[static_cast<std::size_t>(w)].push_back({i, e.what()});
      }
    }
  };
  if (nw == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w)
      pool.emplace_back(run, w);
    for (auto &t : pool)
      t.join();
  }

  std::size_t total_failures = 0;
  const Failure *first = nullptr;
  for (const auto &fs : failures)
    for (const auto &f : fs) {
      ++total_failures;
      if (!first || f.index < first->index)
        first = &f;
    }
  if (total_failures) {
    std::ostringstream os;
    os << "element_batch: " << total_failures << " key(s) failed; first at #"
       << first->index << " " << keys[first->index].str() << ": "
       << first->message;
    throw BatchError(os.str());
  }
  return out;
}

} // namespace oscme

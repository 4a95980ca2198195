#include "oscme/recurrence.hpp"

#include "oscme/rational.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace oscme::recurrence {

namespace {

void require_backend(Backend want, Backend got, const char *where) {
  if (want != got)
    throw std::invalid_argument(std::string(where) +
                                ": mixed backends among neighbor values");
}

[[noreturn]] void missing(int nm, int np, const char *role) {
  std::ostringstream os;
  os << "recurrence step: required neighbor (" << nm << "," << np << ") ["
     << role << "] not supplied";
  throw MissingNeighborError(nm, np, os.str());
}

} // namespace

double UnnormalizedValue::numeric() const {
  return backend == Backend::Float ? f : to_double(exact);
}

UnnormalizedValue UnnormalizedValue::from_float(double v) {
  UnnormalizedValue u;
  u.backend = Backend::Float;
  u.f = v;
  return u;
}

UnnormalizedValue UnnormalizedValue::from_exact(const BigRational &v) {
  UnnormalizedValue u;
  u.backend = Backend::Exact;
  u.exact = v;
  return u;
}

BigInt rescale_square(const ElementKey &key) {
  BigInt m = 1;
  for (const auto &t : key.orbital)
    for (int ax = 0; ax < 3; ++ax) {
      const int n = t[ax];
      if (n < 0)
        throw std::invalid_argument("rescale_square: negative quantum number");
      m *= pow2(static_cast<unsigned long>(n)) * factorial(n);
    }
  return m;
}

UnnormalizedValue unnormalize(const ElementValue &v, const ElementKey &key) {
  const BigInt m = rescale_square(key);
  if (v.backend() == Backend::Exact) {
    if (v.exact().is_zero())
      return UnnormalizedValue::from_exact(BigRational(0));
    // V * sqrt(M) must come out rational: radicand * M is a perfect square
    // for any key consistent with the value.
    const SquarefreeSplit split =
        squarefree_split(v.exact().radicand() * BigRational(m));
    if (split.squarefree != 1)
      throw std::domain_error(
          "unnormalize: value radicand is inconsistent with the key");
    BigRational r = v.exact().coeff() * split.outer;
    r.canonicalize();
    return UnnormalizedValue::from_exact(r);
  }
  const double root_m = std::sqrt(to_double(BigRational(m)));
  const double r = v.value() * v.scale() / kRoot2OverPi * root_m;
  if (!std::isfinite(r))
    throw OverflowError("unnormalize: rescale factor overflows the float "
                        "backend; use the exact backend");
  return UnnormalizedValue::from_float(r);
}

ElementValue normalize(const UnnormalizedValue &v, const ElementKey &key,
                       double a) {
  const BigInt m = rescale_square(key);
  if (v.backend == Backend::Exact) {
    if (sgn(v.exact) == 0)
      return ElementValue::from_exact(ExactValue(), a);
    return ElementValue::from_exact(
        ExactValue::make(v.exact, BigRational(1, m)), a);
  }
  const double root_m = std::sqrt(to_double(BigRational(m)));
  if (!std::isfinite(root_m))
    throw OverflowError("normalize: rescale factor overflows the float "
                        "backend; use the exact backend");
  return ElementValue::from_float(v.f / root_m * kRoot2OverPi / a, a);
}

UnnormalizedValue
recur_step_unnormalized(int n_minus, int n_plus,
                        const std::optional<UnnormalizedValue> &up,
                        const std::optional<UnnormalizedValue> &down,
                        const std::optional<UnnormalizedValue> &left) {
  if (n_minus < 0 || n_plus < 0)
    throw std::invalid_argument("recur_step_unnormalized: negative indices");
  if (!up)
    missing(n_minus, n_plus + 1, "up");
  const bool need_down = n_plus > 0;
  const bool need_left = n_minus > 0;
  if (need_down && !down)
    missing(std::min(n_minus, n_plus - 1), std::max(n_minus, n_plus - 1),
            "down");
  if (need_left && !left)
    missing(n_minus - 1, n_plus, "left");

  const Backend backend = up->backend;
  if (need_down)
    require_backend(backend, down->backend, "recur_step_unnormalized");
  if (need_left)
    require_backend(backend, left->backend, "recur_step_unnormalized");

  if (backend == Backend::Exact) {
    BigRational r = up->exact;
    if (need_down)
      r += BigRational(2 * n_plus) * down->exact;
    if (need_left)
      r -= BigRational(2 * n_minus) * left->exact;
    r.canonicalize();
    return UnnormalizedValue::from_exact(r);
  }
  double r = up->f;
  if (need_down)
    r += 2.0 * n_plus * down->f;
  if (need_left)
    r -= 2.0 * n_minus * left->f;
  return UnnormalizedValue::from_float(r);
}

ElementValue recur_step_normalized(int n_minus, int n_plus,
                                   const std::optional<ElementValue> &up,
                                   const std::optional<ElementValue> &down,
                                   const std::optional<ElementValue> &left,
                                   double a) {
  if (n_minus < 0 || n_plus < 0)
    throw std::invalid_argument("recur_step_normalized: negative indices");
  if (!up)
    missing(n_minus, n_plus + 1, "up");
  const bool need_down = n_plus > 0;
  const bool need_left = n_minus > 0;
  if (need_down && !down)
    missing(std::min(n_minus, n_plus - 1), std::max(n_minus, n_plus - 1),
            "down");
  if (need_left && !left)
    missing(n_minus - 1, n_plus, "left");

  const Backend backend = up->backend();
  if (need_down)
    require_backend(backend, down->backend(), "recur_step_normalized");
  if (need_left)
    require_backend(backend, left->backend(), "recur_step_normalized");

  if (backend == Backend::Exact) {
    // Coefficients sqrt((n_+ + 1)/(n_- + 1)), sqrt(n_+/(n_- + 1)) and
    // -sqrt(n_-/(n_- + 1)) stay exact inside the (coeff, radicand)
    // representation.
    ExactValue sum =
        up->exact().scaled_sqrt(BigRational(n_plus + 1, n_minus + 1));
    if (need_down)
      sum = sum + down->exact().scaled_sqrt(BigRational(n_plus, n_minus + 1));
    if (need_left)
      sum = sum - left->exact().scaled_sqrt(BigRational(n_minus, n_minus + 1));
    return ElementValue::from_exact(sum, a);
  }
  double v = std::sqrt((n_plus + 1.0) / (n_minus + 1.0)) * up->value();
  if (need_down)
    v += std::sqrt(n_plus / (n_minus + 1.0)) * down->value();
  if (need_left)
    v -= std::sqrt(n_minus / (n_minus + 1.0)) * left->value();
  return ElementValue::from_float(v, a);
}

UnnormalizedValue
recur_step_four_index(int n_plus, int m_minus, int m_plus,
                      const UnnormalizedValue &opposite,
                      const std::optional<UnnormalizedValue> &lowered) {
  if (n_plus < 0 || m_minus < 0 || m_plus < 0)
    throw std::invalid_argument("recur_step_four_index: negative indices");
  if (m_minus > m_plus)
    throw std::invalid_argument(
        "recur_step_four_index: second pair must satisfy m_minus <= m_plus");
  const bool need_lowered = m_minus > 0;
  if (need_lowered && !lowered)
    missing(m_minus - 1, m_plus, "lowered");
  if (need_lowered)
    require_backend(opposite.backend, lowered->backend,
                    "recur_step_four_index");

  if (opposite.backend == Backend::Exact) {
    BigRational r = -opposite.exact;
    if (need_lowered)
      r += BigRational(2 * m_minus) * lowered->exact;
    r.canonicalize();
    return UnnormalizedValue::from_exact(r);
  }
  double r = -opposite.f;
  if (need_lowered)
    r += 2.0 * m_minus * lowered->f;
  return UnnormalizedValue::from_float(r);
}

ElementKey FamilyContext::materialize(int lo, int hi) const {
  if (lo < 0 || hi < 0)
    throw std::invalid_argument("FamilyContext: negative pair indices");
  ElementKey k = base;
  const int ax = static_cast<int>(axis);
  if (pair == ParticlePair::P14) {
    k[0][ax] = hi;
    k[3][ax] = lo;
  } else {
    k[1][ax] = hi;
    k[2][ax] = lo;
  }
  return k;
}

bool FamilyTable::contains(int a, int b) const {
  const int lo = std::min(a, b), hi = std::max(a, b);
  return lo >= 0 && lo <= n_max_ && hi <= 2 * n_max_ - lo;
}

const UnnormalizedValue &FamilyTable::value(int a, int b) const {
  if (!contains(a, b))
    throw std::out_of_range("FamilyTable: pair (" + std::to_string(a) + "," +
                            std::to_string(b) + ") outside built range");
  const int lo = std::min(a, b), hi = std::max(a, b);
  return rows_[static_cast<std::size_t>(lo)][static_cast<std::size_t>(hi - lo)];
}

ElementValue FamilyTable::element(int a, int b, double scale_a) const {
  const int lo = std::min(a, b), hi = std::max(a, b);
  return normalize(value(lo, hi), ctx_.materialize(lo, hi), scale_a);
}

FamilyTable build_family(const Evaluator &eval, const FamilyContext &ctx,
                         int n_max, Backend backend) {
  if (n_max < 0)
    throw std::invalid_argument("build_family: n_max must be >= 0");
  if (2 * n_max > eval.max_index())
    throw std::invalid_argument(
        "build_family: seeding reaches index " + std::to_string(2 * n_max) +
        " but the evaluator supports only " + std::to_string(eval.max_index()));

  FamilyTable table(ctx, n_max, backend);
  table.rows_.resize(static_cast<std::size_t>(n_max) + 1);

  // Seed row: n_minus = 0, n_plus = 0 .. 2*n_max, by direct evaluation.
  auto &row0 = table.rows_[0];
  row0.reserve(static_cast<std::size_t>(2 * n_max) + 1);
  for (int hi = 0; hi <= 2 * n_max; ++hi) {
    const ElementKey key = ctx.materialize(0, hi);
    row0.push_back(unnormalize(eval.element_direct(key, backend), key));
    ++table.seed_evaluations_;
  }

  // Interior rows: row lo spans hi in [lo, 2*n_max - lo]; entry (lo, hi)
  // comes from the step at (n_minus, n_plus) = (lo - 1, hi).
  for (int lo = 1; lo <= n_max; ++lo) {
    auto &row = table.rows_[static_cast<std::size_t>(lo)];
    row.reserve(static_cast<std::size_t>(2 * (n_max - lo)) + 1);
    for (int hi = lo; hi <= 2 * n_max - lo; ++hi) {
      const auto &up = table.value(lo - 1, hi + 1);
      std::optional<UnnormalizedValue> down, left;
      if (hi > 0)
        down = table.value(lo - 1, hi - 1);
      if (lo > 1)
        left = table.value(lo - 2, hi);
      row.push_back(recur_step_unnormalized(lo - 1, hi, up, down, left));
    }
  }
  return table;
}

FourIndexReport validate_four_index(const Evaluator &eval, int limit,
                                    int context_samples, std::uint64_t seed) {
  if (limit < 0)
    throw std::invalid_argument("validate_four_index: limit must be >= 0");
  if (eval.max_index() < limit + 1)
    throw std::invalid_argument(
        "validate_four_index: evaluator must support indices up to limit + 1");

  FourIndexReport report;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, limit);

  const auto vbar = [&](const ElementKey &key) {
    return unnormalize(eval.element_direct(key, Backend::Exact), key).exact;
  };

  for (int ctx_i = 0; ctx_i <= context_samples; ++ctx_i) {
    // Context 0 is the all-zero context, the rest are random draws over the
    // eight off-axis slots.
    ElementKey base{};
    if (ctx_i > 0)
      for (int p = 0; p < 4; ++p) {
        base[p].ny = pick(rng);
        base[p].nz = pick(rng);
      }

    for (int np = 0; np <= limit; ++np)
      for (int mm = 0; mm <= limit; ++mm)
        for (int mp = mm; mp <= limit; ++mp) {
          // Target: first pair {0, np}, second pair {mm, mp + 1}.
          ElementKey target = base;
          target[0].nx = np;
          target[3].nx = 0;
          target[1].nx = mp + 1;
          target[2].nx = mm;

          ElementKey opposite = base;
          opposite[0].nx = np + 1;
          opposite[3].nx = 0;
          opposite[1].nx = mp;
          opposite[2].nx = mm;

          const auto opp = UnnormalizedValue::from_exact(vbar(opposite));
          std::optional<UnnormalizedValue> low;
          if (mm > 0) {
            ElementKey lowered = base;
            lowered[0].nx = np;
            lowered[3].nx = 0;
            lowered[1].nx = mp;
            lowered[2].nx = mm - 1;
            low = UnnormalizedValue::from_exact(vbar(lowered));
          }
          const UnnormalizedValue stepped =
              recur_step_four_index(np, mm, mp, opp, low);
          const BigRational direct = vbar(target);
          ++report.checks;
          if (stepped.exact != direct) {
            report.valid = false;
            std::ostringstream os;
            os << "context " << base.str() << " shape (n+=" << np
               << ", m-=" << mm << ", m+=" << mp << "): step gives "
               << stepped.exact.get_str() << ", direct gives "
               << direct.get_str();
            report.counterexample = os.str();
            return report;
          }
        }
  }
  return report;
}

} // namespace oscme::recurrence

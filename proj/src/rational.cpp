#include "oscme/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace oscme {

namespace {

constexpr long kSmoothLimit = 1024;

// Primes up to kSmoothLimit, built once (thread-safe magic static).
const std::vector<long> &small_primes() {
  static const std::vector<long> primes = [] {
    std::vector<bool> composite(kSmoothLimit + 1, false);
    std::vector<long> out;
    for (long p = 2; p <= kSmoothLimit; ++p) {
      if (composite[static_cast<std::size_t>(p)])
        continue;
      out.push_back(p);
      for (long q = p * p; q <= kSmoothLimit; q += p)
        composite[static_cast<std::size_t>(q)] = true;
    }
    return out;
  }();
  return primes;
}

// Factor a positive smooth integer into prime exponents over small_primes().
// Throws if a cofactor > 1 remains.
void smooth_exponents(BigInt v, std::vector<unsigned long> &exps) {
  const auto &primes = small_primes();
  exps.assign(primes.size(), 0);
  for (std::size_t i = 0; i < primes.size() && v != 1; ++i) {
    while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(primes[i]))) {
      mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(primes[i]));
      ++exps[i];
    }
  }
  if (v != 1)
    throw std::domain_error("squarefree_split: prime factor beyond smooth limit");
}

} // namespace

long smooth_limit() { return kSmoothLimit; }

BigInt factorial(long n) {
  if (n < 0)
    throw std::invalid_argument("factorial: negative argument");
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt double_factorial(long m) {
  if (m < -1)
    throw std::invalid_argument("double_factorial: argument below -1");
  if (m <= 0)
    return 1; // (-1)!! = 0!! = 1, empty products
  BigInt r;
  mpz_2fac_ui(r.get_mpz_t(), static_cast<unsigned long>(m));
  return r;
}

BigInt binomial(long n, long k) {
  if (n < 0)
    throw std::invalid_argument("binomial: negative row index");
  if (k < 0 || k > n)
    return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

BigInt pow2(unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

double to_double(const BigInt &v) {
  // mpz_get_d truncates to the nearest representable toward zero and
  // saturates; extract mantissa/exponent instead so huge values become inf
  // through ldexp's well-defined overflow and accuracy stays at 1 ulp.
  signed long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(exp));
}

double to_double(const BigRational &q) {
  if (sgn(q) == 0)
    return 0.0;
  signed long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num().get_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
  return std::ldexp(mn / md, static_cast<int>(en - ed));
}

SquarefreeSplit squarefree_split(const BigRational &q) {
  if (sgn(q) <= 0)
    throw std::invalid_argument("squarefree_split: argument must be positive");
  const auto &primes = small_primes();
  std::vector<unsigned long> num_e, den_e;
  smooth_exponents(q.get_num(), num_e);
  smooth_exponents(q.get_den(), den_e);

  // Normal form: squarefree is a square-free positive integer, outer carries
  // everything else, including p^-1 factors from odd denominator exponents
  // (sqrt(p^(2k+1)) = p^k * sqrt(p) for any integer k, so e.g.
  // sqrt(1/2) = (1/2) * sqrt(2)).  This makes the pair unique per value.
  BigInt outer_num = 1, outer_den = 1, sf = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    // Net exponent of prime i in q; q is canonical so at most one of the two
    // entries is nonzero.
    const long e = static_cast<long>(num_e[i]) - static_cast<long>(den_e[i]);
    if (e == 0)
      continue;
    const long k = (e >= 0) ? e / 2 : -((-e + 1) / 2); // floor(e / 2)
    const long r = e - 2 * k;                          // 0 or 1
    BigInt p(primes[i]);
    BigInt ph; // p^|k|
    mpz_pow_ui(ph.get_mpz_t(), p.get_mpz_t(),
               static_cast<unsigned long>(k >= 0 ? k : -k));
    if (k >= 0)
      outer_num *= ph;
    else
      outer_den *= ph;
    if (r)
      sf *= p;
  }
  SquarefreeSplit out;
  out.outer = BigRational(outer_num, outer_den);
  out.outer.canonicalize();
  out.squarefree = BigRational(sf);
  return out;
}

} // namespace oscme

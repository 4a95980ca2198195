#include "oscme/recurrence.hpp"

#include "helpers.hpp"
#include "oscme/error.hpp"

#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

using namespace oscme;
using namespace oscme::recurrence;
using test_util::key12;
using test_util::rel_diff;

namespace {

// Random family context: off-pair slots drawn in [0, limit], pair slots zero.
FamilyContext random_context(std::mt19937_64 &rng, int limit) {
  std::uniform_int_distribution<int> pick(0, limit);
  std::uniform_int_distribution<int> coin(0, 1);
  FamilyContext ctx;
  ctx.axis = static_cast<Axis>(std::uniform_int_distribution<int>(0, 2)(rng));
  ctx.pair = coin(rng) ? ParticlePair::P23 : ParticlePair::P14;
  for (int p = 0; p < 4; ++p)
    for (int ax = 0; ax < 3; ++ax)
      ctx.base[p][ax] = pick(rng);
  const int axi = static_cast<int>(ctx.axis);
  if (ctx.pair == ParticlePair::P14)
    ctx.base[0][axi] = ctx.base[3][axi] = 0;
  else
    ctx.base[1][axi] = ctx.base[2][axi] = 0;
  return ctx;
}

UnnormalizedValue vbar(const Evaluator &eval, const ElementKey &key,
                       Backend backend) {
  return unnormalize(eval.element_direct(key, backend), key);
}

} // namespace

TEST_CASE("rescale factor M") {
  CHECK(rescale_square(ElementKey{}) == 1);
  CHECK(rescale_square(key12({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})) == 2);
  CHECK(rescale_square(key12({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1})) == 4096);
  // One n = 2 slot contributes 2^2 * 2! = 8, one n = 1 slot contributes 2.
  CHECK(rescale_square(key12({2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0})) == 16);
  ElementKey bad;
  bad[0].nz = -1;
  CHECK_THROWS_AS(rescale_square(bad), std::invalid_argument);
}

TEST_CASE("normalize/unnormalize round-trip on both backends") {
  const Evaluator eval(4);
  std::mt19937_64 rng(20260823);
  for (int i = 0; i < 40; ++i) {
    const ElementKey k = test_util::random_passing_key(rng, 4);

    // Exact: V sqrt(M) must be a plain rational (radicand * M a perfect
    // square), and the round trip must reproduce the value componentwise.
    const ElementValue e = eval.element_direct(k, Backend::Exact);
    const UnnormalizedValue ue = unnormalize(e, k);
    CHECK(ue.backend == Backend::Exact);
    CHECK(normalize(ue, k, 1.0).exact() == e.exact());

    // Float: round trip within rounding.
    const ElementValue f = eval.element_direct(k);
    const UnnormalizedValue uf = unnormalize(f, k);
    CHECK(uf.backend == Backend::Float);
    CHECK(rel_diff(normalize(uf, k, 1.0).value(), f.value()) <= 1e-14);

    // Both backends agree on the unnormalized rational itself.
    CHECK(rel_diff(uf.f, to_double(ue.exact)) <= 1e-13);
  }

  SUBCASE("zeros round-trip") {
    const ElementKey odd = key12({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(sgn(unnormalize(eval.element_direct(odd, Backend::Exact), odd).exact) == 0);
    CHECK(unnormalize(eval.element_direct(odd), odd).f == 0.0);
  }

  SUBCASE("inconsistent exact payload is rejected") {
    // sqrt(3) cannot be V sqrt(M)-rational for the all-zero key (M = 1).
    const ElementValue wrong = ElementValue::from_exact(
        ExactValue::make(1, BigRational(3)), 1.0);
    CHECK_THROWS_AS(unnormalize(wrong, ElementKey{}), std::domain_error);
  }

  SUBCASE("float rescale overflow is detected") {
    ElementKey huge;
    huge[0].nx = 200;
    huge[3].nx = 200;
    CHECK_THROWS_AS(unnormalize(ElementValue::from_float(1.0, 1.0), huge),
                    OverflowError);
    CHECK_THROWS_AS(normalize(UnnormalizedValue::from_float(1.0), huge, 1.0),
                    OverflowError);
  }
}

TEST_CASE("in-pair step reproduces direct evaluation") {
  const Evaluator eval(5);
  std::mt19937_64 rng(20260823);

  for (int i = 0; i < 25; ++i) {
    const FamilyContext ctx = random_context(rng, 2);
    for (int nm = 0; nm <= 2; ++nm)
      for (int np = nm; np <= 3; ++np) {
        const auto value_at = [&](int a, int b, Backend backend) {
          const ElementKey k = ctx.materialize(std::min(a, b), std::max(a, b));
          return vbar(eval, k, backend);
        };

        for (Backend backend : {Backend::Exact, Backend::Float}) {
          const auto up = value_at(nm, np + 1, backend);
          std::optional<UnnormalizedValue> down, left;
          if (np > 0)
            down = value_at(nm, np - 1, backend);
          if (nm > 0)
            left = value_at(nm - 1, np, backend);

          const UnnormalizedValue stepped =
              recur_step_unnormalized(nm, np, up, down, left);
          const UnnormalizedValue direct = value_at(nm + 1, np, backend);
          if (backend == Backend::Exact)
            CHECK(stepped.exact == direct.exact);
          else
            CHECK(rel_diff(stepped.f, direct.f) <= 1e-12);
        }
      }
  }
}

TEST_CASE("normalized step matches direct evaluation exactly") {
  const Evaluator eval(5);
  std::mt19937_64 rng(7);

  for (int i = 0; i < 15; ++i) {
    const FamilyContext ctx = random_context(rng, 2);
    for (int nm = 0; nm <= 2; ++nm)
      for (int np = nm; np <= 3; ++np) {
        const auto value_at = [&](int a, int b, Backend backend) {
          const ElementKey k = ctx.materialize(std::min(a, b), std::max(a, b));
          return eval.element_direct(k, backend);
        };

        const auto up = value_at(nm, np + 1, Backend::Exact);
        std::optional<ElementValue> down, left;
        if (np > 0)
          down = value_at(nm, np - 1, Backend::Exact);
        if (nm > 0)
          left = value_at(nm - 1, np, Backend::Exact);
        const ElementValue stepped =
            recur_step_normalized(nm, np, up, down, left, 1.0);
        // The square-root coefficients stay inside the exact representation,
        // so the comparison is exact equality, not a tolerance.
        CHECK(stepped.exact() == value_at(nm + 1, np, Backend::Exact).exact());

        const auto upf = value_at(nm, np + 1, Backend::Float);
        std::optional<ElementValue> downf, leftf;
        if (np > 0)
          downf = value_at(nm, np - 1, Backend::Float);
        if (nm > 0)
          leftf = value_at(nm - 1, np, Backend::Float);
        const ElementValue steppedf =
            recur_step_normalized(nm, np, upf, downf, leftf, 1.0);
        CHECK(rel_diff(steppedf.value(),
                       value_at(nm + 1, np, Backend::Float).value()) <= 1e-10);
      }
  }
}

TEST_CASE("step neighbor bookkeeping") {
  const auto u = UnnormalizedValue::from_float(1.0);

  SUBCASE("omissible neighbors") {
    // n_plus = 0: the down coefficient vanishes; n_minus = 0: left vanishes.
    CHECK_NOTHROW(recur_step_unnormalized(0, 0, u, std::nullopt, std::nullopt));
    CHECK_NOTHROW(recur_step_unnormalized(1, 0, u, std::nullopt, u));
  }

  SUBCASE("missing required neighbors carry their pair") {
    try {
      recur_step_unnormalized(1, 2, u, std::nullopt, u);
      FAIL("expected MissingNeighborError");
    } catch (const MissingNeighborError &e) {
      CHECK(e.n_minus == 1);
      CHECK(e.n_plus == 1);
    }
    try {
      recur_step_unnormalized(2, 3, u, u, std::nullopt);
      FAIL("expected MissingNeighborError");
    } catch (const MissingNeighborError &e) {
      CHECK(e.n_minus == 1);
      CHECK(e.n_plus == 3);
    }
    CHECK_THROWS_AS(
        recur_step_unnormalized(0, 0, std::nullopt, std::nullopt, std::nullopt),
        MissingNeighborError);
  }

  SUBCASE("mixed backends and bad indices are rejected") {
    const auto e = UnnormalizedValue::from_exact(BigRational(1));
    CHECK_THROWS_AS(recur_step_unnormalized(1, 1, u, e, u),
                    std::invalid_argument);
    CHECK_THROWS_AS(recur_step_unnormalized(-1, 0, u, std::nullopt, std::nullopt),
                    std::invalid_argument);
  }
}

TEST_CASE("cross-pair transfer step") {
  const Evaluator eval(4);

  SUBCASE("spot shape against direct evaluation, with sign control") {
    // Shape (n+ = 0, m- = 0, m+ = 1) on the all-zero context:
    // target pairs {0,0};{0,2}, opposite pairs {0,1};{0,1}.
    const ElementKey target = key12({0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0});
    const ElementKey opposite = key12({1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0});
    const auto t = vbar(eval, target, Backend::Exact).exact;
    const auto o = vbar(eval, opposite, Backend::Exact).exact;
    REQUIRE(sgn(t) != 0); // nonzero, so the sign actually matters

    const UnnormalizedValue stepped = recur_step_four_index(
        0, 0, 1, UnnormalizedValue::from_exact(o), std::nullopt);
    CHECK(stepped.exact == t);
    // The opposite sign convention is measurably wrong, not a convention
    // choice: +o misses the direct value.
    CHECK(o != t);
    CHECK(-o == t);
  }

  SUBCASE("exhaustive validation over shapes and contexts") {
    const Evaluator wide(5);
    const FourIndexReport report = validate_four_index(wide, 3, 30, 20260823);
    CHECK(report.valid);
    CHECK(report.counterexample.empty());
    // (30 + 1 contexts) * 4 n+ values * 10 (m-, m+) shapes.
    CHECK(report.checks == 1240);
  }

  SUBCASE("argument contracts") {
    const auto u = UnnormalizedValue::from_float(1.0);
    CHECK_THROWS_AS(recur_step_four_index(0, 2, 1, u, u),
                    std::invalid_argument);
    CHECK_THROWS_AS(recur_step_four_index(-1, 0, 0, u, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(recur_step_four_index(0, 1, 1, u, std::nullopt),
                    MissingNeighborError);
    CHECK_THROWS_AS(validate_four_index(Evaluator(2), 3, 1, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("family context materialization") {
  FamilyContext ctx;
  ctx.base = key12({9, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  ctx.axis = Axis::Y;
  ctx.pair = ParticlePair::P23;
  const ElementKey k = ctx.materialize(2, 6);
  CHECK(k[1].ny == 6); // hi goes to the lower-numbered slot of the pair
  CHECK(k[2].ny == 2);
  CHECK(k[0] == ctx.base[0]);
  CHECK(k[3] == ctx.base[3]);

  ctx.pair = ParticlePair::P14;
  const ElementKey k14 = ctx.materialize(0, 3);
  CHECK(k14[0].ny == 3);
  CHECK(k14[3].ny == 0);

  CHECK_THROWS_AS(ctx.materialize(-1, 0), std::invalid_argument);
}

TEST_CASE("family build covers every pair and matches direct evaluation") {
  const Evaluator eval(8);

  SUBCASE("float family on the all-zero context") {
    FamilyContext ctx; // zero base, x axis, pair 1-4
    const FamilyTable table = build_family(eval, ctx, 4, Backend::Float);
    CHECK(table.n_max() == 4);
    CHECK(table.backend() == Backend::Float);
    // Seeding is minimal: one evaluation per n_minus = 0 entry.
    CHECK(table.seed_evaluations() == 9);

    int covered = 0;
    for (int lo = 0; lo <= 4; ++lo)
      for (int hi = lo; hi <= 8 - lo; ++hi) {
        REQUIRE(table.contains(lo, hi));
        REQUIRE(table.contains(hi, lo));
        const ElementKey k = ctx.materialize(lo, hi);
        const double direct = eval.element_direct(k).value();
        CHECK(rel_diff(table.element(lo, hi, 1.0).value(), direct) <= 1e-10);
        ++covered;
      }
    CHECK(covered == 25);
    // Every unordered pair with max <= n_max is present.
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b)
        CHECK(table.contains(a, b));

    CHECK(!table.contains(5, 5));
    CHECK(!table.contains(1, 8));
    CHECK_THROWS_AS(table.value(5, 5), std::out_of_range);
  }

  SUBCASE("exact family on a random off-axis context") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 3; ++rep) {
      const FamilyContext ctx = random_context(rng, 2);
      const FamilyTable table = build_family(eval, ctx, 3, Backend::Exact);
      for (int lo = 0; lo <= 3; ++lo)
        for (int hi = lo; hi <= 6 - lo; ++hi) {
          const ElementKey k = ctx.materialize(lo, hi);
          CHECK(table.element(lo, hi, 1.0).exact() ==
                eval.element_direct(k, Backend::Exact).exact());
        }
    }
  }

  SUBCASE("float and exact families agree") {
    FamilyContext ctx;
    ctx.axis = Axis::Z;
    const FamilyTable ft = build_family(eval, ctx, 3, Backend::Float);
    const FamilyTable et = build_family(eval, ctx, 3, Backend::Exact);
    for (int lo = 0; lo <= 3; ++lo)
      for (int hi = lo; hi <= 6 - lo; ++hi)
        CHECK(rel_diff(ft.value(lo, hi).f, to_double(et.value(lo, hi).exact)) <=
              1e-12);
  }

  SUBCASE("build guards") {
    FamilyContext ctx;
    CHECK_THROWS_AS(build_family(eval, ctx, -1, Backend::Float),
                    std::invalid_argument);
    // Seeding n_max = 5 needs indices up to 10 > evaluator's 8.
    CHECK_THROWS_AS(build_family(eval, ctx, 5, Backend::Float),
                    std::invalid_argument);
  }
}

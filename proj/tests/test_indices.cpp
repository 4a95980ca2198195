#include "oscme/indices.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

using namespace oscme;
using test_util::key12;
using test_util::random_key;

TEST_CASE("QuantumTriple axis access and totals") {
  QuantumTriple t{1, 2, 3};
  CHECK(t[0] == 1);
  CHECK(t[1] == 2);
  CHECK(t[2] == 3);
  CHECK(t.total() == 6);
  t[1] = 7;
  CHECK(t.ny == 7);
  CHECK_THROWS_AS(t[3], std::out_of_range);
  CHECK_THROWS_AS(t[-1], std::out_of_range);

  CHECK(QuantumTriple{0, 0, 0} < QuantumTriple{0, 0, 1});
  CHECK(QuantumTriple{1, 0, 0} == QuantumTriple{1, 0, 0});
}

TEST_CASE("ElementKey flat round-trip and formatting") {
  const std::array<int, 12> flat{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  const ElementKey k = key12(flat);
  CHECK(k.flat() == flat);
  CHECK(k[0] == QuantumTriple{0, 1, 2});
  CHECK(k[3] == QuantumTriple{9, 10, 11});
  CHECK(k.max_index() == 11);
  CHECK(k.str() == "(0,1,2)(3,4,5)(6,7,8)(9,10,11)");

  std::mt19937_64 rng(20260823);
  for (int i = 0; i < 100; ++i) {
    const ElementKey r = random_key(rng, 9);
    CHECK(ElementKey::from_flat(r.flat()) == r);
  }
}

TEST_CASE("axis_pair orders and validates") {
  for (int a = 0; a <= 12; ++a)
    for (int b = 0; b <= 12; ++b) {
      const AxisPair p = axis_pair(a, b);
      CHECK(p == axis_pair(b, a));
      CHECK(p.n_minus == std::min(a, b));
      CHECK(p.n_plus == std::max(a, b));
      CHECK(p.diff() == std::abs(a - b));
      CHECK(p.sum() == a + b);
    }
  CHECK_THROWS_AS(axis_pair(-1, 0), std::invalid_argument);
  CHECK_THROWS_AS(axis_pair(0, -3), std::invalid_argument);
}

TEST_CASE("axis_pair extracts the right key slots") {
  const ElementKey k = key12({1, 2, 3, 4, 5, 6, 7, 8, 9, 3, 2, 1});
  // pair (1,4) reads orbitals 0 and 3, pair (2,3) reads orbitals 1 and 2.
  CHECK(axis_pair(k, Axis::X, ParticlePair::P14) == AxisPair{1, 3});
  CHECK(axis_pair(k, Axis::Y, ParticlePair::P14) == AxisPair{2, 2});
  CHECK(axis_pair(k, Axis::Z, ParticlePair::P14) == AxisPair{1, 3});
  CHECK(axis_pair(k, Axis::X, ParticlePair::P23) == AxisPair{4, 7});
  CHECK(axis_pair(k, Axis::Y, ParticlePair::P23) == AxisPair{5, 8});
  CHECK(axis_pair(k, Axis::Z, ParticlePair::P23) == AxisPair{6, 9});
}

TEST_CASE("selection rule per axis, exhaustively on one axis") {
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int c = 0; c <= 4; ++c)
        for (int d = 0; d <= 4; ++d) {
          ElementKey k;
          k[0].nx = a;
          k[3].nx = b;
          k[1].nx = c;
          k[2].nx = d;
          const SelectionResult sel = selection_rule(k);
          const int parity_sum = std::abs(a - b) + std::abs(c - d);
          if (parity_sum % 2 == 0) {
            REQUIRE(sel.pass());
            CHECK(*sel.s[0] == parity_sum / 2);
            CHECK(*sel.s[1] == 0);
            CHECK(*sel.s[2] == 0);
            CHECK(sel.s_total() == parity_sum / 2);
          } else {
            CHECK(!sel.s[0].has_value());
            CHECK(!sel.pass());
            CHECK_THROWS_AS(sel.s_total(), std::logic_error);
          }
        }
}

TEST_CASE("selection rule on full keys matches flat parity") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const ElementKey k = random_key(rng, 5);
    const SelectionResult sel = selection_rule(k);
    bool expect_pass = true;
    for (int ax = 0; ax < 3; ++ax) {
      const int sum = k[0][ax] + k[1][ax] + k[2][ax] + k[3][ax];
      const bool even = sum % 2 == 0;
      CHECK(sel.s[static_cast<std::size_t>(ax)].has_value() == even);
      expect_pass = expect_pass && even;
    }
    CHECK(sel.pass() == expect_pass);
  }
}

TEST_CASE("selection result formatting") {
  ElementKey k; // all zero
  CHECK(selection_rule(k).str() == "(0,0,0)");
  k[0].nx = 2;
  CHECK(selection_rule(k).str() == "(1,0,0)");
  k[0].ny = 1;
  CHECK(selection_rule(k).str() == "(1,-,0)");
}

TEST_CASE("symmetry images realize the three generators") {
  const ElementKey k = key12({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0});
  const auto images = symmetry_images(k);
  CHECK(images[0] == k);

  ElementKey swap14 = k;
  std::swap(swap14.orbital[0], swap14.orbital[3]);
  ElementKey swap23 = k;
  std::swap(swap23.orbital[1], swap23.orbital[2]);
  ElementKey exch;
  exch.orbital = {k.orbital[1], k.orbital[0], k.orbital[3], k.orbital[2]};

  const auto has = [&images](const ElementKey &x) {
    return std::find(images.begin(), images.end(), x) != images.end();
  };
  CHECK(has(swap14));
  CHECK(has(swap23));
  CHECK(has(exch));
}

TEST_CASE("canonical key is the orbit minimum and is idempotent") {
  const auto check_key = [](const ElementKey &k) {
    const CanonicalKey canon = canonical_key(k);
    const auto images = symmetry_images(k);

    std::set<ElementKey> distinct(images.begin(), images.end());
    CHECK(canon.key == *distinct.begin());
    CHECK(canon.multiplicity == static_cast<int>(distinct.size()));
    CHECK((canon.multiplicity == 1 || canon.multiplicity == 2 ||
           canon.multiplicity == 4 || canon.multiplicity == 8));

    // Every image canonicalizes to the same representative.
    for (const auto &img : images) {
      CHECK(canonical_key(img).key == canon.key);
      CHECK(canonical_key(img).multiplicity == canon.multiplicity);
    }
    // Idempotence.
    CHECK(canonical_key(canon.key).key == canon.key);
  };

  SUBCASE("exhaustive over two-orbital-valued keys") {
    // All 4096 keys with indices in {0, 1}.
    for (int mask = 0; mask < (1 << 12); ++mask) {
      std::array<int, 12> flat{};
      for (int b = 0; b < 12; ++b)
        flat[static_cast<std::size_t>(b)] = (mask >> b) & 1;
      check_key(key12(flat));
    }
  }

  SUBCASE("random keys with larger indices") {
    std::mt19937_64 rng(20260823);
    for (int i = 0; i < 300; ++i)
      check_key(random_key(rng, 4));
  }
}

TEST_CASE("canonical multiplicity spot values") {
  // Fully symmetric key: orbit collapses to itself.
  CHECK(canonical_key(ElementKey{}).multiplicity == 1);
  // One raised orbital: swap23 fixes the key, swap14 and exchange do not.
  CHECK(canonical_key(key12({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})).multiplicity == 4);
  // Generic key: full orbit.
  CHECK(canonical_key(key12({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0})).multiplicity == 8);
}

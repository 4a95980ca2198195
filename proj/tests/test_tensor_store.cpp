#include "oscme/tensor_store.hpp"

#include "helpers.hpp"
#include "oscme/error.hpp"
#include "oscme/version.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

using namespace oscme;
using namespace oscme::tensor;
using test_util::key12;
using test_util::rel_diff;

namespace {

BasisCutoff shells(int n) { return {CutoffMode::TotalQuanta, n}; }
BasisCutoff per_axis(int n) { return {CutoffMode::PerAxis, n}; }

// Unique scratch path; removed by the caller.
std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("oscme_test_" + name);
}

} // namespace

TEST_CASE("basis cutoffs enumerate the expected states") {
  CHECK(shells(0).state_count() == 1);
  CHECK(shells(1).state_count() == 4);
  CHECK(shells(2).state_count() == 10); // 1 + 3 + 6
  CHECK(per_axis(1).state_count() == 8);
  CHECK(per_axis(2).state_count() == 27);

  CHECK(shells(2).contains(QuantumTriple{1, 1, 0}));
  CHECK(!shells(2).contains(QuantumTriple{1, 1, 1}));
  CHECK(per_axis(1).contains(QuantumTriple{1, 1, 1}));
  CHECK(!per_axis(1).contains(QuantumTriple{2, 0, 0}));
  CHECK(!shells(2).contains(QuantumTriple{-1, 0, 0}));

  const auto states = shells(3).states();
  CHECK(std::is_sorted(states.begin(), states.end()));

  CHECK(shells(2).str() == "total_quanta<=2");
  CHECK(per_axis(1).str() == "per_axis<=1");

  CHECK(estimate_keys(shells(1)) == 256);
  CHECK(estimate_keys(per_axis(1)) == 4096);
}

TEST_CASE("store constructor guards") {
  CHECK_NOTHROW(TensorStore(shells(0), 1.0, Backend::Float));
  CHECK_THROWS_AS(TensorStore(shells(-1), 1.0, Backend::Float),
                  std::invalid_argument);
  CHECK_THROWS_AS(TensorStore(shells(201), 1.0, Backend::Float),
                  std::invalid_argument);
  CHECK_THROWS_AS(TensorStore(shells(1), 0.0, Backend::Float),
                  std::invalid_argument);
  CHECK(TensorStore(shells(0), 1.0, Backend::Float).code_version() == kVersion);
}

TEST_CASE("building the one-shell tensor") {
  const TensorStore store = build_tensor(shells(1), 1.0, {});
  // 4 basis states -> 256 candidate quadruples -> 16 canonical nonzero values.
  CHECK(store.count() == 16);
  CHECK(store.cutoff().value == 1);
  CHECK(store.backend() == Backend::Float);

  const Evaluator eval(1);
  const auto states = shells(1).states();
  std::size_t nonzero = 0;
  for (const auto &s1 : states)
    for (const auto &s2 : states)
      for (const auto &s3 : states)
        for (const auto &s4 : states) {
          ElementKey key;
          key.orbital = {s1, s2, s3, s4};
          const double direct = eval.element_direct(key).value();
          // Stored values come from the same evaluation path, so lookups are
          // reproduced exactly, including the zeros.
          CHECK(store.lookup(key) == direct);
          if (direct != 0.0)
            ++nonzero;
        }
  CHECK(nonzero > 16); // the canonical table folds the symmetry orbits

  SUBCASE("lookups canonicalize") {
    std::mt19937_64 rng(3);
    for (const auto &[key, value] : store.elements())
      for (const auto &img : symmetry_images(key))
        CHECK(store.lookup(img) == value);
  }

  SUBCASE("out-of-cutoff lookups are refused") {
    ElementKey outside;
    outside[0] = {1, 1, 0}; // two quanta > shell cutoff 1
    CHECK_THROWS_AS(store.lookup(outside), OutOfCutoffError);
  }
}

TEST_CASE("insert validates canonical nonzero entries") {
  TensorStore store(shells(2), 1.0, Backend::Float);
  const ElementKey canon = key12({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  store.insert(canon, 0.5);
  CHECK(store.count() == 1);
  CHECK_THROWS_AS(store.insert(canon, 0.5), std::invalid_argument); // dup

  const ElementKey non_canon = key12({1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0});
  REQUIRE(canonical_key(non_canon).key != non_canon);
  CHECK_THROWS_AS(store.insert(non_canon, 0.5), std::invalid_argument);

  const ElementKey ok = key12({0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1});
  CHECK_THROWS_AS(store.insert(ok, 0.0), std::invalid_argument);
  ElementKey outside;
  outside[1] = {2, 1, 0};
  CHECK_THROWS_AS(store.insert(outside, 1.0), std::invalid_argument);
}

TEST_CASE("build strategies agree") {
  BuildOptions direct;
  direct.strategy = BuildStrategy::Direct;
  BuildOptions recur;
  recur.strategy = BuildStrategy::Recurrence;

  SUBCASE("float strategies agree to recurrence accuracy") {
    const TensorStore d = build_tensor(shells(2), 1.0, direct);
    const TensorStore r = build_tensor(shells(2), 1.0, recur);
    REQUIRE(d.count() == r.count());
    for (const auto &[key, value] : d.elements())
      CHECK(rel_diff(value, r.lookup(key)) <= 1e-10);
  }

  SUBCASE("exact strategies produce identical bytes") {
    // Exact recurrence reproduces direct exact values identically (same
    // canonical rational + radicand), so the serializations match bit for bit.
    direct.backend = Backend::Exact;
    recur.backend = Backend::Exact;
    const TensorStore d = build_tensor(shells(2), 1.0, direct);
    const TensorStore r = build_tensor(shells(2), 1.0, recur);
    CHECK(d.serialize_binary() == r.serialize_binary());
  }
}

TEST_CASE("builds are deterministic in the worker count") {
  for (BuildStrategy strategy : {BuildStrategy::Direct, BuildStrategy::Recurrence}) {
    BuildOptions o;
    o.strategy = strategy;
    o.workers = 1;
    const auto one = build_tensor(shells(2), 1.0, o).serialize_binary();
    o.workers = 3;
    CHECK(build_tensor(shells(2), 1.0, o).serialize_binary() == one);
    o.workers = 4;
    CHECK(build_tensor(shells(2), 1.0, o).serialize_binary() == one);
  }
}

TEST_CASE("oversized builds are refused with an estimate") {
  BuildOptions o;
  o.max_keys = 10;
  try {
    build_tensor(shells(1), 1.0, o);
    FAIL("expected MemoryLimitError");
  } catch (const MemoryLimitError &e) {
    CHECK(e.estimated_keys == 256);
  }
  o.workers = 0;
  CHECK_THROWS_AS(build_tensor(shells(1), 1.0, o), std::invalid_argument);
}

TEST_CASE("scale propagates into stored values") {
  BuildOptions o;
  const TensorStore unit = build_tensor(shells(1), 1.0, o);
  const TensorStore wide = build_tensor(shells(1), 2.0, o);
  REQUIRE(unit.count() == wide.count());
  CHECK(wide.scale() == 2.0);
  for (const auto &[key, value] : unit.elements())
    CHECK(wide.lookup(key) * 2.0 == doctest::Approx(value).epsilon(1e-15));
}

TEST_CASE("serialization round-trips bit-exactly") {
  const TensorStore store = build_tensor(shells(2), 1.25, {});
  const auto bytes = store.serialize_binary();

  SUBCASE("binary") {
    const TensorStore back = TensorStore::parse_binary(bytes);
    CHECK(back.serialize_binary() == bytes);
    CHECK(back.count() == store.count());
    CHECK(back.scale() == store.scale());
    CHECK(back.digest() == store.digest());
  }

  SUBCASE("json") {
    const TensorStore back = TensorStore::parse_json(store.serialize_json());
    CHECK(back.serialize_binary() == bytes);
  }

  SUBCASE("csv") {
    const TensorStore back = TensorStore::parse_csv(store.serialize_csv());
    CHECK(back.serialize_binary() == bytes);
  }

  SUBCASE("an empty store round-trips too") {
    const TensorStore empty(shells(1), 0.5, Backend::Exact);
    CHECK(TensorStore::parse_binary(empty.serialize_binary()).count() == 0);
    CHECK(TensorStore::parse_json(empty.serialize_json()).serialize_binary() ==
          empty.serialize_binary());
    CHECK(TensorStore::parse_csv(empty.serialize_csv()).serialize_binary() ==
          empty.serialize_binary());
  }
}

TEST_CASE("corruption is detected") {
  const TensorStore store = build_tensor(shells(1), 1.0, {});

  SUBCASE("binary: flipped content byte") {
    auto bytes = store.serialize_binary();
    bytes[bytes.size() - 40] ^= 0x01; // inside the last record
    CHECK_THROWS_AS(TensorStore::parse_binary(bytes), DigestError);
  }

  SUBCASE("binary: flipped digest byte") {
    auto bytes = store.serialize_binary();
    bytes.back() ^= 0x01;
    CHECK_THROWS_AS(TensorStore::parse_binary(bytes), DigestError);
  }

  SUBCASE("binary: truncation and bad magic") {
    auto bytes = store.serialize_binary();
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(TensorStore::parse_binary(truncated), DigestError);
    truncated.resize(10);
    CHECK_THROWS_AS(TensorStore::parse_binary(truncated), FormatError);
    bytes[0] = 'X';
    CHECK_THROWS_AS(TensorStore::parse_binary(bytes), FormatError);
  }

  SUBCASE("json: tampered value") {
    std::string text = store.serialize_json();
    const auto pos = text.find("\"value\": \"");
    REQUIRE(pos != std::string::npos);
    char &digit = text[pos + 10];
    digit = digit == '7' ? '8' : '7';
    CHECK_THROWS_AS(TensorStore::parse_json(text), DigestError);
    CHECK_THROWS_AS(TensorStore::parse_json("{]"), FormatError);
    CHECK_THROWS_AS(TensorStore::parse_json("{}"), FormatError);
  }

  SUBCASE("csv: tampered value and header") {
    std::string text = store.serialize_csv();
    const auto tail = text.rfind(",");
    REQUIRE(tail != std::string::npos);
    char &digit = text[tail + 1];
    digit = digit == '1' ? '2' : '1';
    CHECK_THROWS_AS(TensorStore::parse_csv(text), DigestError);
    CHECK_THROWS_AS(TensorStore::parse_csv("nx1,ny1\n"), FormatError);
    std::string miscount = store.serialize_csv();
    const auto cpos = miscount.find("count=16");
    REQUIRE(cpos != std::string::npos);
    miscount.replace(cpos, 8, "count=15");
    CHECK_THROWS_AS(TensorStore::parse_csv(miscount), FormatError);
  }
}

TEST_CASE("file export and import") {
  const TensorStore store = build_tensor(shells(1), 1.0, {});

  CHECK(TensorStore::format_for_path("x.oscv") == Format::Binary);
  CHECK(TensorStore::format_for_path("x.bin") == Format::Binary);
  CHECK(TensorStore::format_for_path("x.json") == Format::Json);
  CHECK(TensorStore::format_for_path("x.csv") == Format::Csv);
  CHECK_THROWS_AS(TensorStore::format_for_path("x.xml"), std::invalid_argument);

  for (const char *name : {"t.oscv", "t.json", "t.csv"}) {
    const auto path = temp_path(name);
    store.export_file(path, TensorStore::format_for_path(path));
    const TensorStore back = TensorStore::import_file(path);
    CHECK(back.serialize_binary() == store.serialize_binary());
    std::filesystem::remove(path);
  }

  SUBCASE("import sniffs content, not extension") {
    const auto path = temp_path("mislabelled.csv");
    store.export_file(path, Format::Binary);
    CHECK(TensorStore::import_file(path).serialize_binary() ==
          store.serialize_binary());
    std::filesystem::remove(path);
  }

  SUBCASE("unreadable and unrecognized files") {
    CHECK_THROWS_AS(TensorStore::import_file(temp_path("missing.oscv")),
                    std::runtime_error);
    const auto path = temp_path("garbage.oscv");
    {
      std::FILE *f = std::fopen(path.c_str(), "wb");
      REQUIRE(f);
      std::fputs("not a tensor", f);
      std::fclose(f);
    }
    CHECK_THROWS_AS(TensorStore::import_file(path), FormatError);
    std::filesystem::remove(path);
  }
}

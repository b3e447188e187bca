#include "doctest.h"

#include "dgap/error.hpp"
#include "dgap/feature_store.hpp"
#include "test_support.hpp"

#include <cstring>
#include <functional>
#include <random>

using namespace dgap;
using testing_support::read_file;
using testing_support::scratch_dir;
using testing_support::write_file;

namespace {

FeatureSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t d, bool scores) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> s(0.0, 1.0);
  RowMatrix rows(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) rows(r, c) = u(rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("item-" + std::to_string(i) + "/\xC3\xA9");
  std::optional<std::vector<double>> sc;
  if (scores) {
    sc.emplace(n);
    for (auto& v : *sc) v = s(rng);
  }
  return FeatureSet(ids, rows, sc);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected dgap::Error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_SUITE("feature-store") {
  TEST_CASE("csv without scores") {
    const auto dir = scratch_dir("csv");
    write_file(dir / "a.csv", "id,f0,f1,f2\nx,1,2,3\ny,-0.5,1e-3,4\n");
    const FeatureSet set = read_csv(dir / "a.csv");
    CHECK(set.size() == 2);
    CHECK(set.dim() == 3);
    CHECK_FALSE(set.has_scores());
    CHECK(set.ids() == std::vector<std::string>{"x", "y"});
    CHECK(set.rows()(1, 1) == 1e-3);
    CHECK(set.find("y") == 1);
    CHECK_FALSE(set.find("z"));
  }

  TEST_CASE("csv with scores and CRLF line endings") {
    const auto dir = scratch_dir("csv");
    write_file(dir / "a.csv", "id,f0,score\r\na,1,0.25\r\nb,2,1\r\n");
    const FeatureSet set = read_csv(dir / "a.csv");
    REQUIRE(set.has_scores());
    CHECK((*set.scores())[0] == 0.25);
    CHECK((*set.scores())[1] == 1.0);
  }

  TEST_CASE("duplicate id names the id and both rows") {
    const auto dir = scratch_dir("csv");
    write_file(dir / "a.csv", "id,f0\na,1\nb,2\na,3\n");
    try {
      read_csv(dir / "a.csv");
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDuplicateId);
      const std::string msg = e.what();
      CHECK(msg.find("'a'") != std::string::npos);
      CHECK(msg.find("row 1") != std::string::npos);
      CHECK(msg.find("row 3") != std::string::npos);
    }
  }

  TEST_CASE("score out of range reports the row") {
    const auto dir = scratch_dir("csv");
    write_file(dir / "a.csv", "id,f0,score\na,1,0.5\nb,2,1.5\n");
    try {
      read_csv(dir / "a.csv");
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kOutOfRange);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }

  TEST_CASE("malformed csv cells") {
    const auto dir = scratch_dir("csv");
    write_file(dir / "nonnum.csv", "id,f0,f1\na,1,abc\n");
    CHECK(kind_of([&] { read_csv(dir / "nonnum.csv"); }) == ErrorKind::kParse);
    write_file(dir / "ragged.csv", "id,f0,f1\na,1,2\nb,3\n");
    CHECK(kind_of([&] { read_csv(dir / "ragged.csv"); }) == ErrorKind::kParse);
    write_file(dir / "noid.csv", "id,f0\n,1\n");
    CHECK(kind_of([&] { read_csv(dir / "noid.csv"); }) == ErrorKind::kParse);
    write_file(dir / "nan.csv", "id,f0\na,nan\n");
    CHECK(kind_of([&] { read_csv(dir / "nan.csv"); }) == ErrorKind::kParse);
    write_file(dir / "header.csv", "id,f1\na,1\n");
    CHECK(kind_of([&] { read_csv(dir / "header.csv"); }) == ErrorKind::kParse);
    CHECK(kind_of([&] { read_csv(dir / "missing.csv"); }) == ErrorKind::kIo);
  }

  TEST_CASE("binary round trip is bit exact") {
    std::mt19937_64 rng(11);
    const auto dir = scratch_dir("bin");
    for (bool scores : {false, true}) {
      const FeatureSet set = random_set(rng, 10, 4, scores);
      write_binary(set, dir / "s.fset");
      const FeatureSet back = read_binary(dir / "s.fset");
      CHECK(back.ids() == set.ids());
      CHECK(back.dim() == set.dim());
      CHECK(std::memcmp(back.rows().data(), set.rows().data(), sizeof(double) * 40) == 0);
      CHECK(back.scores() == set.scores());
      CHECK(read_features(dir / "s.fset").ids() == set.ids());
    }
  }

  TEST_CASE("binary header layout") {
    std::mt19937_64 rng(3);
    const auto dir = scratch_dir("bin");
    write_binary(random_set(rng, 2, 3, true), dir / "s.fset");
    const std::string raw = read_file(dir / "s.fset");
    CHECK(raw.substr(0, 4) == "FSET");
    CHECK(static_cast<unsigned char>(raw[4]) == 1);  // version, little-endian
    CHECK((static_cast<unsigned char>(raw[8]) & kFlagScores) != 0);
    CHECK(static_cast<unsigned char>(raw[12]) == 2);  // n
    CHECK(static_cast<unsigned char>(raw[20]) == 3);  // d
  }

  TEST_CASE("binary validation errors") {
    std::mt19937_64 rng(5);
    const auto dir = scratch_dir("bin");
    write_binary(random_set(rng, 100, 2, false), dir / "good.fset");
    std::string raw = read_file(dir / "good.fset");

    std::string bad = raw;
    bad.replace(0, 4, "XXXX");
    write_file(dir / "magic.fset", bad);
    CHECK(kind_of([&] { read_binary(dir / "magic.fset"); }) == ErrorKind::kBadMagic);

    bad = raw;
    bad[4] = 2;
    write_file(dir / "version.fset", bad);
    CHECK(kind_of([&] { read_binary(dir / "version.fset"); }) == ErrorKind::kVersionMismatch);

    // Header claims 100 rows; keep 50.
    write_file(dir / "trunc.fset", raw.substr(0, 28 + 50 * 2 * 8));
    CHECK(kind_of([&] { read_binary(dir / "trunc.fset"); }) == ErrorKind::kTruncated);

    bad = raw;
    bad[40] ^= 0x01;
    write_file(dir / "crc.fset", bad);
    CHECK(kind_of([&] { read_binary(dir / "crc.fset"); }) == ErrorKind::kChecksum);
  }

  TEST_CASE("fuzzed inputs only raise typed errors") {
    std::mt19937_64 rng(99);
    const auto dir = scratch_dir("fuzz");
    write_binary(random_set(rng, 6, 3, true), dir / "seed.fset");
    const std::string bin = read_file(dir / "seed.fset");
    const std::string csv = "id,f0,f1,score\na,1.5,2,0.1\nb,-3,4e2,0.9\nc,0,0,0\n";
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 400; ++trial) {
      std::string mutated = trial % 2 ? bin : csv;
      const int edits = 1 + trial % 4;
      for (int e = 0; e < edits; ++e) {
        std::uniform_int_distribution<std::size_t> pos(0, mutated.size() - 1);
        switch (rng() % 3) {
          case 0: mutated[pos(rng)] = static_cast<char>(byte(rng)); break;
          case 1: mutated.erase(pos(rng), 1 + rng() % 8); break;
          default: mutated.insert(pos(rng), 1, static_cast<char>(byte(rng))); break;
        }
        if (mutated.empty()) mutated = "x";
      }
      write_file(dir / "m.bin", mutated);
      try {
        const FeatureSet set = read_features(dir / "m.bin");
        for (Eigen::Index r = 0; r < set.rows().rows(); ++r) CHECK(set.rows().row(r).allFinite());
        if (set.has_scores()) {
          for (double s : *set.scores()) CHECK((s >= 0.0 && s <= 1.0));
        }
      } catch (const Error&) {
        // typed failure is the expected outcome for most mutations
      }
    }
  }
}

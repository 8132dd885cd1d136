#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restrictlab/container.hpp"

#include <random>
#include <sstream>

using namespace restrictlab;

TEST_CASE("RLAB1 byte layout of a tiny key set") {
  KeyedRows rows{2, {1, 2, 1, 3}, {}};
  std::ostringstream out;
  write_rlab(out, rows);
  const std::string bytes = out.str();
  // magic + kind + 2 lengths + row0 (prefix + 2 coords) + row1 (prefix + 1 coord)
  CHECK(bytes.size() == 5 + 1 + 16 + 24 + 16);
  CHECK(bytes.substr(0, 5) == "RLAB1");
  CHECK(bytes[5] == 1);
  CHECK(static_cast<unsigned char>(bytes[6]) == 2);
  CHECK(static_cast<unsigned char>(bytes[46]) == 1);  // row 1 shares one coordinate
}

TEST_CASE("RLAB1 round trips all payload kinds") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> coord(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::int64_t> keys;
    std::vector<std::uint64_t> vals;
    for (int i = 0; i < 40; ++i) {
      for (int c = 0; c < 3; ++c) keys.push_back(coord(rng) * (c == 2 ? 1000000000000LL : 1));
      vals.push_back(static_cast<std::uint64_t>(trial + i + 1));
    }
    auto h = ValueHistogram::from_unsorted(3, keys, vals);
    for (const RlabPayload& p : {RlabPayload(to_rows(h)), RlabPayload(KeyedRows{3, h.flat_keys(), {}})}) {
      std::stringstream s;
      write_rlab(s, p);
      CHECK(read_rlab(s) == p);
    }
  }
  ComplexGrid grid{{2, 3}, {{1, -0.5}, {0, 0}, {1e-300, 2}, {-1, 3}, {0.25, 0.125}, {7, -7}}};
  std::stringstream s;
  write_rlab(s, grid);
  CHECK(std::get<ComplexGrid>(read_rlab(s)) == grid);

  WeightedHistogram w = WeightedHistogram::from_unsorted(1, {0, 1}, {BigInt(3), BigInt(4)});
  auto rows = to_rows(w, BigInt(6));
  CHECK(rows.values == std::vector<std::string>{"1/2", "2/3"});
}

TEST_CASE("RLAB1 rejects malformed input") {
  std::istringstream bad("RLAB2xxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS(read_rlab(bad), InputError);
  std::ostringstream out;
  write_rlab(out, KeyedRows{1, {5, 6}, {}});
  std::istringstream truncated(out.str().substr(0, out.str().size() - 3));
  CHECK_THROWS_AS(read_rlab(truncated), InputError);
}

TEST_CASE("CSV export") {
  std::ostringstream out;
  write_csv(out, KeyedRows{2, {-1, 2, 3, 4}, {"5", "7/2"}}, {"t1", "t2"});
  CHECK(out.str() == "t1,t2,count\n-1,2,5\n3,4,7/2\n");
  CHECK_THROWS_AS(write_csv(out, KeyedRows{2, {}, {}}, {"a"}), InputError);
}

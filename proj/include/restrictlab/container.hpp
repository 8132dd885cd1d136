#pragma once

#include "restrictlab/histogram.hpp"
#include "restrictlab/lattice.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace restrictlab {

// Rows of integer keys with optional exact decimal values ("7", "-3/8").
struct KeyedRows {
  std::size_t dim = 1;
  std::vector<std::int64_t> keys;   // flat, dim per row
  std::vector<std::string> values;  // empty, or one per row
  std::size_t rows() const { return dim ? keys.size() / dim : 0; }
  bool operator==(const KeyedRows&) const = default;
};

// Dense complex array in row-major order.
struct ComplexGrid {
  std::vector<std::uint64_t> sizes;
  std::vector<std::complex<double>> values;
  bool operator==(const ComplexGrid&) const = default;
};

using RlabPayload = std::variant<KeyedRows, ComplexGrid>;

KeyedRows to_rows(const LatticeSolutionSet& set);
KeyedRows to_rows(const ValueHistogram& h);
KeyedRows to_rows(const WeightedHistogram& h, const BigInt& denominator);

// CSV with a header row; integer and rational cells as exact decimal strings.
void write_csv(std::ostream& out, const KeyedRows& rows, const std::vector<std::string>& key_names,
               const std::string& value_name = "count");

// Binary container. Layout, all integers little-endian:
//   "RLAB1", u8 kind (1 keys, 2 keys + values, 3 complex grid), u64 dim, u64 rows
//   kinds 1/2, per row: u64 p = prefix length shared with the previous row,
//                       then dim - p i64 coordinates; kind 2 adds u64 length + ASCII value
//   kind 3: dim u64 axis sizes, then rows (re, im) f64 pairs
void write_rlab(std::ostream& out, const RlabPayload& payload);
RlabPayload read_rlab(std::istream& in);

void write_rlab_file(const std::string& path, const RlabPayload& payload);
RlabPayload read_rlab_file(const std::string& path);

}  // namespace restrictlab

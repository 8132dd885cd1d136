#include "restrictlab/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace restrictlab {

namespace {

constexpr char kMagic[5] = {'R', 'L', 'A', 'B', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw InputError("RLAB1: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

KeyedRows to_rows(const LatticeSolutionSet& set) { return {set.arity(), set.flat(), {}}; }

KeyedRows to_rows(const ValueHistogram& h) {
  KeyedRows r{h.dim(), h.flat_keys(), {}};
  for (auto v : h.values()) r.values.push_back(std::to_string(v));
  return r;
}

KeyedRows to_rows(const WeightedHistogram& h, const BigInt& denominator) {
  KeyedRows r{h.dim(), h.flat_keys(), {}};
  for (const auto& v : h.values()) r.values.push_back(to_string(Rational(v, denominator)));
  return r;
}

void write_csv(std::ostream& out, const KeyedRows& rows, const std::vector<std::string>& key_names,
               const std::string& value_name) {
  if (key_names.size() != rows.dim) throw InputError("CSV header does not match key dimension");
  for (std::size_t c = 0; c < rows.dim; ++c) out << (c ? "," : "") << key_names[c];
  if (!rows.values.empty()) out << ',' << value_name;
  out << '\n';
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.dim; ++c) out << (c ? "," : "") << rows.keys[r * rows.dim + c];
    if (!rows.values.empty()) out << ',' << rows.values[r];
    out << '\n';
  }
}

void write_rlab(std::ostream& out, const RlabPayload& payload) {
  out.write(kMagic, 5);
  if (const auto* rows = std::get_if<KeyedRows>(&payload)) {
    const bool with_values = !rows->values.empty();
    if (with_values && rows->values.size() != rows->rows()) throw InputError("RLAB1: value count mismatch");
    out.put(static_cast<char>(with_values ? 2 : 1));
    put_u64(out, rows->dim);
    put_u64(out, rows->rows());
    for (std::size_t r = 0; r < rows->rows(); ++r) {
      const std::int64_t* row = rows->keys.data() + r * rows->dim;
      std::size_t p = 0;
      if (r > 0)
        while (p < rows->dim && row[p] == row[p - rows->dim]) ++p;
      put_u64(out, p);
      for (std::size_t c = p; c < rows->dim; ++c) put_u64(out, static_cast<std::uint64_t>(row[c]));
      if (with_values) {
        put_u64(out, rows->values[r].size());
        out.write(rows->values[r].data(), static_cast<std::streamsize>(rows->values[r].size()));
      }
    }
  } else {
    const auto& grid = std::get<ComplexGrid>(payload);
    out.put(3);
    put_u64(out, grid.sizes.size());
    put_u64(out, grid.values.size());
    for (auto s : grid.sizes) put_u64(out, s);
    for (const auto& v : grid.values) {
      put_f64(out, v.real());
      put_f64(out, v.imag());
    }
  }
  if (!out) throw std::runtime_error("RLAB1: write failed");
}

RlabPayload read_rlab(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) throw InputError("RLAB1: bad magic");
  const int kind = in.get();
  const std::uint64_t dim = get_u64(in), nrows = get_u64(in);
  if (kind == 1 || kind == 2) {
    if (dim == 0) throw InputError("RLAB1: zero key dimension");
    KeyedRows rows;
    rows.dim = dim;
    for (std::uint64_t r = 0; r < nrows; ++r) {
      const std::uint64_t p = get_u64(in);
      if (p > dim || (r == 0 && p != 0)) throw InputError("RLAB1: invalid prefix length");
      const std::size_t start = rows.keys.size();
      for (std::uint64_t c = 0; c < p; ++c) rows.keys.push_back(rows.keys[start - dim + c]);
      for (std::uint64_t c = p; c < dim; ++c) rows.keys.push_back(static_cast<std::int64_t>(get_u64(in)));
      if (kind == 2) {
        std::string v(get_u64(in), '\0');
        if (!in.read(v.data(), static_cast<std::streamsize>(v.size()))) throw InputError("RLAB1: truncated value");
        rows.values.push_back(std::move(v));
      }
    }
    return rows;
  }
  if (kind == 3) {
    ComplexGrid grid;
    std::uint64_t cells = 1;
    for (std::uint64_t i = 0; i < dim; ++i) {
      grid.sizes.push_back(get_u64(in));
      cells *= grid.sizes.back();
    }
    if (cells != nrows) throw InputError("RLAB1: grid size mismatch");
    grid.values.reserve(nrows);
    for (std::uint64_t i = 0; i < nrows; ++i) {
      const double re = get_f64(in);
      grid.values.emplace_back(re, get_f64(in));
    }
    return grid;
  }
  throw InputError("RLAB1: unknown record kind");
}

void write_rlab_file(const std::string& path, const RlabPayload& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path);
  write_rlab(out, payload);
}

RlabPayload read_rlab_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_rlab(in);
}

}  // namespace restrictlab

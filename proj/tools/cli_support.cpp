#include "cli_support.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rlcli {

using restrictlab::InputError;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::int64_t to_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw InputError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw InputError("not an integer: '" + s + "'");
  return v;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void Table::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("table row has the wrong width");
  rows_.push_back(std::move(row));
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void emit(Context& ctx, const std::string& name, const Table& table) {
  table.write(ctx.settings.out / name);
  ctx.outputs.push_back(name);
}

std::string num(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(const Rational& v) { return restrictlab::to_string(v); }
std::string num(const BigInt& v) { return v.str(); }
std::string flag(bool v) { return v ? "true" : "false"; }
std::string exponent(double p) { return std::isinf(p) ? "inf" : num(p); }

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw InputError("empty entry in list '" + text + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part));
      continue;
    }
    std::string rest = part.substr(dots + 2);
    std::int64_t step = 1;
    if (auto colon = rest.find(':'); colon != std::string::npos) {
      step = to_int(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const std::int64_t lo = to_int(part.substr(0, dots)), hi = to_int(rest);
    if (step <= 0 || hi < lo) throw InputError("bad range '" + part + "'");
    if ((hi - lo) / step > 10'000'000) throw InputError("range '" + part + "' is too long");
    for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part == "inf" || part == "infinity" || part == "Inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + part + "'");
    }
    if (used != part.size() || !std::isfinite(v)) throw InputError("not a number: '" + part + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

Rational parse_rational(const std::string& text) {
  const auto t = trim(text);
  const auto slash = t.find('/');
  try {
    if (slash == std::string::npos) {
      if (auto dot = t.find('.'); dot != std::string::npos) {
        // exact decimal
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        BigInt den = restrictlab::ipow(BigInt(10), static_cast<unsigned>(t.size() - dot - 1));
        return Rational(restrictlab::parse_bigint(digits), den);
      }
      return Rational(restrictlab::parse_bigint(t));
    }
    BigInt den = restrictlab::parse_bigint(t.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator");
    return Rational(restrictlab::parse_bigint(t.substr(0, slash)), den);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw InputError("not a rational: '" + text + "'");
  }
}

std::string join_ints(const std::vector<std::int64_t>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace rlcli

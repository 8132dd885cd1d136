#pragma once

#include "restrictlab/numeric.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rlcli {

using restrictlab::BigInt;
using restrictlab::Rational;

struct Settings {
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::filesystem::path out = "restrictlab-out";
  std::optional<std::uint64_t> budget;
};

struct Context {
  Settings settings;
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;

  // Thread count for FFT-based work; FFTW's threaded plans may round differently.
  std::size_t fft_threads() const { return settings.deterministic ? 1 : settings.threads; }
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  void write(const std::filesystem::path& path) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes <out>/<name> and records it in the context.
void emit(Context& ctx, const std::string& name, const Table& table);

// 17 significant digits; "NA" for anything non-finite.
std::string num(double v);
std::string num(const std::optional<double>& v);
std::string num(std::int64_t v);
std::string num(std::uint64_t v);
std::string num(const Rational& v);
std::string num(const BigInt& v);
std::string flag(bool v);
// p exponents: "inf" for infinity.
std::string exponent(double p);

// "7", "1..10", "20..200:20", "1,4,9" and mixtures like "1..3,10".
std::vector<std::int64_t> parse_int_list(const std::string& text);
// Comma separated doubles; "inf" allowed.
std::vector<double> parse_double_list(const std::string& text);
Rational parse_rational(const std::string& text);

std::string join_ints(const std::vector<std::int64_t>& v, char sep = ' ');

}  // namespace rlcli

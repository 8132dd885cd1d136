#pragma once

#include "restrictlab/numeric.hpp"
#include "restrictlab/parallel.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace restrictlab {

namespace histogram_detail {

inline void add_product(std::uint64_t& acc, std::uint64_t x, std::uint64_t y) {
  std::uint64_t p;
  if (__builtin_mul_overflow(x, y, &p) || __builtin_add_overflow(acc, p, &acc))
    throw std::overflow_error("histogram count overflow");
}
inline void add_product(BigInt& acc, const BigInt& x, const BigInt& y) { acc += x * y; }
inline void add_product(std::complex<double>& acc, const std::complex<double>& x, const std::complex<double>& y) {
  acc += x * y;
}

inline bool is_zero(std::uint64_t v) { return v == 0; }
inline bool is_zero(const BigInt& v) { return v == 0; }
inline bool is_zero(const std::complex<double>& v) { return v == std::complex<double>(0, 0); }

}  // namespace histogram_detail

// Sparse map from integer vectors to values. Keys are stored flat, sorted in
// ascending lexicographic order, without duplicates or zero values.
template <class V>
class BasicHistogram {
 public:
  using value_type = V;

  explicit BasicHistogram(std::size_t dim = 1) : dim_(dim) {}

  // Sorts and merges arbitrary (key, value) pairs.
  static BasicHistogram from_unsorted(std::size_t dim, std::vector<std::int64_t> keys, std::vector<V> values) {
    const std::size_t n = values.size();
    if (keys.size() != n * dim) throw std::invalid_argument("histogram key/value size mismatch");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(keys.begin() + static_cast<long>(a * dim),
                                          keys.begin() + static_cast<long>((a + 1) * dim),
                                          keys.begin() + static_cast<long>(b * dim),
                                          keys.begin() + static_cast<long>((b + 1) * dim));
    };
    std::stable_sort(order.begin(), order.end(), key_less);
    BasicHistogram h(dim);
    for (std::size_t idx : order) {
      auto key = std::span<const std::int64_t>(keys.data() + idx * dim, dim);
      if (h.size() && std::equal(key.begin(), key.end(), h.key(h.size() - 1).begin())) {
        h.values_.back() += values[idx];
      } else {
        h.keys_.insert(h.keys_.end(), key.begin(), key.end());
        h.values_.push_back(values[idx]);
      }
    }
    h.drop_zeros();
    return h;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const std::int64_t> key(std::size_t i) const { return {keys_.data() + i * dim_, dim_}; }
  const V& value(std::size_t i) const { return values_[i]; }
  const std::vector<std::int64_t>& flat_keys() const { return keys_; }
  const std::vector<V>& values() const { return values_; }

  std::optional<V> find(std::span<const std::int64_t> k) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto mk = key(mid);
      if (std::lexicographical_compare(mk.begin(), mk.end(), k.begin(), k.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < size() && std::equal(k.begin(), k.end(), key(lo).begin())) return values_[lo];
    return std::nullopt;
  }

  V total() const {
    V t{};
    for (const auto& v : values_) t += v;
    return t;
  }

  // Largest value and its key (first in key order on ties). Not for complex values.
  std::pair<V, std::vector<std::int64_t>> sup() const {
    V best{};
    std::size_t at = size();
    for (std::size_t i = 0; i < size(); ++i)
      if (at == size() || values_[i] > best) {
        best = values_[i];
        at = i;
      }
    if (at == size()) return {best, {}};
    auto k = key(at);
    return {best, std::vector<std::int64_t>(k.begin(), k.end())};
  }

  // Used by convolution: append in already-sorted order.
  void push_sorted(std::span<const std::int64_t> k, V v) {
    keys_.insert(keys_.end(), k.begin(), k.end());
    values_.push_back(std::move(v));
  }

  bool operator==(const BasicHistogram&) const = default;

 private:
  void drop_zeros() {
    std::size_t w = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (histogram_detail::is_zero(values_[i])) continue;
      if (w != i) {
        std::copy(keys_.begin() + static_cast<long>(i * dim_), keys_.begin() + static_cast<long>((i + 1) * dim_),
                  keys_.begin() + static_cast<long>(w * dim_));
        values_[w] = std::move(values_[i]);
      }
      ++w;
    }
    keys_.resize(w * dim_);
    values_.resize(w);
  }

  std::size_t dim_;
  std::vector<std::int64_t> keys_;
  std::vector<V> values_;
};

using ValueHistogram = BasicHistogram<std::uint64_t>;
using WeightedHistogram = BasicHistogram<BigInt>;
using ComplexHistogram = BasicHistogram<std::complex<double>>;

// Sum over keys of |h(t)|^2, exactly for integer values.
BigInt sum_of_squares(const ValueHistogram& h);
BigInt sum_of_squares(const WeightedHistogram& h);
double sum_of_squares(const ComplexHistogram& h);

struct ConvolutionOptions {
  std::uint64_t budget = default_budget();  // max dense cells / sparse support
  std::size_t threads = 1;
};

// Additive convolution (a * b)(t) = sum_{u + v = t} a(u) b(v).
// Dense accumulation over the bounding box of the result when it fits the budget,
// hash accumulation per output slab otherwise. Output slabs partition the first
// coordinate, so the result is independent of the thread count.
template <class V>
BasicHistogram<V> convolve(const BasicHistogram<V>& a, const BasicHistogram<V>& b,
                           const ConvolutionOptions& options = {}) {
  if (a.dim() != b.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  const std::size_t dim = a.dim();
  BasicHistogram<V> out(dim);
  if (a.empty() || b.empty()) return out;

  std::vector<std::int64_t> lo(dim), hi(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::int64_t amin = a.key(0)[c], amax = amin, bmin = b.key(0)[c], bmax = bmin;
    for (std::size_t i = 0; i < a.size(); ++i) {
      amin = std::min(amin, a.key(i)[c]);
      amax = std::max(amax, a.key(i)[c]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      bmin = std::min(bmin, b.key(i)[c]);
      bmax = std::max(bmax, b.key(i)[c]);
    }
    lo[c] = amin + bmin;
    hi[c] = amax + bmax;
  }
  // row-major strides over the result box; first coordinate most significant
  std::vector<std::uint64_t> extent(dim), stride(dim);
  long double volume = 1;
  for (std::size_t c = 0; c < dim; ++c) {
    extent[c] = static_cast<std::uint64_t>(hi[c] - lo[c] + 1);
    volume *= static_cast<long double>(extent[c]);
  }
  if (volume > 9.0e18L) throw BudgetExceeded("convolution bounding box exceeds 64-bit packing");
  stride[dim - 1] = 1;
  for (std::size_t c = dim - 1; c > 0; --c) stride[c - 1] = stride[c] * extent[c];
  const std::uint64_t slab_stride = stride[0];

  // b's first coordinates, ascending (keys sorted lexicographically)
  auto first_of_b = [&](std::size_t i) { return b.key(i)[0]; };
  auto b_range = [&](std::int64_t f_lo, std::int64_t f_hi) {  // indices with first coord in [f_lo, f_hi]
    std::size_t l = 0, h = b.size();
    while (l < h) {
      std::size_t m = (l + h) / 2;
      if (first_of_b(m) < f_lo) l = m + 1; else h = m;
    }
    std::size_t begin = l;
    h = b.size();
    while (l < h) {
      std::size_t m = (l + h) / 2;
      if (first_of_b(m) <= f_hi) l = m + 1; else h = m;
    }
    return std::pair{begin, l};
  };

  auto pack = [&](std::span<const std::int64_t> ka, std::span<const std::int64_t> kb) {
    std::uint64_t idx = 0;
    for (std::size_t c = 0; c < dim; ++c) idx += static_cast<std::uint64_t>(ka[c] + kb[c] - lo[c]) * stride[c];
    return idx;
  };
  auto unpack = [&](std::uint64_t idx, std::vector<std::int64_t>& key) {
    for (std::size_t c = 0; c < dim; ++c) {
      key[c] = lo[c] + static_cast<std::int64_t>(idx / stride[c]);
      idx %= stride[c];
    }
  };

  const std::size_t slabs = static_cast<std::size_t>(extent[0]);
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  constexpr long double kDenseCellLimit = 1 << 24;
  const bool dense = volume <= std::min(kDenseCellLimit, static_cast<long double>(options.budget));
  std::vector<BasicHistogram<V>> parts(std::min(threads, slabs), BasicHistogram<V>(dim));

  parallel_chunks(threads, slabs, [&](std::size_t part, std::size_t s_begin, std::size_t s_end) {
    const std::int64_t f_lo = lo[0] + static_cast<std::int64_t>(s_begin);
    const std::int64_t f_hi = lo[0] + static_cast<std::int64_t>(s_end) - 1;
    const std::uint64_t base = static_cast<std::uint64_t>(s_begin) * slab_stride;
    std::vector<V> cells;
    std::unordered_map<std::uint64_t, V> sparse;
    if (dense) cells.assign(static_cast<std::size_t>((s_end - s_begin) * slab_stride), V{});
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto ka = a.key(i);
      auto [jb, je] = b_range(f_lo - ka[0], f_hi - ka[0]);
      for (std::size_t j = jb; j < je; ++j) {
        std::uint64_t idx = pack(ka, b.key(j)) - base;
        if (dense) {
          histogram_detail::add_product(cells[idx], a.value(i), b.value(j));
        } else {
          histogram_detail::add_product(sparse[idx], a.value(i), b.value(j));
          if (sparse.size() > options.budget) throw BudgetExceeded("convolution support exceeds budget");
        }
      }
    }
    std::vector<std::int64_t> key(dim);
    auto& target = parts[part];
    if (dense) {
      for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (histogram_detail::is_zero(cells[idx])) continue;
        unpack(base + idx, key);
        target.push_sorted(key, std::move(cells[idx]));
      }
    } else {
      std::vector<std::uint64_t> order;
      order.reserve(sparse.size());
      for (const auto& kv : sparse)
        if (!histogram_detail::is_zero(kv.second)) order.push_back(kv.first);
      std::sort(order.begin(), order.end());
      for (auto idx : order) {
        unpack(base + idx, key);
        target.push_sorted(key, std::move(sparse[idx]));
      }
    }
  });
  for (auto& p : parts)
    for (std::size_t i = 0; i < p.size(); ++i) out.push_sorted(p.key(i), p.value(i));
  return out;
}

// h^{*l}, l >= 1.
template <class V>
BasicHistogram<V> convolution_power(const BasicHistogram<V>& h, unsigned l, const ConvolutionOptions& options = {}) {
  if (l == 0) throw std::invalid_argument("convolution power needs l >= 1");
  BasicHistogram<V> acc = h;
  for (unsigned i = 1; i < l; ++i) acc = convolve(acc, h, options);
  return acc;
}

}  // namespace restrictlab

#include "restrictlab/rational_matrix.hpp"

#include <stdexcept>
#include <utility>

namespace restrictlab {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::block_diagonal(std::size_t copies) const {
  RationalMatrix out(rows_ * copies, cols_ * copies);
  for (std::size_t b = 0; b < copies; ++b)
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(b * rows_ + r, b * cols_ + c) = (*this)(r, c);
  return out;
}

std::size_t RationalMatrix::rank() const {
  RationalMatrix m = *this;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows_ && m(pivot, col) == 0) ++pivot;
    if (pivot == rows_) continue;
    if (pivot != rank)
      for (std::size_t c = 0; c < cols_; ++c) std::swap(m(pivot, c), m(rank, c));
    for (std::size_t r = rank + 1; r < rows_; ++r) {
      if (m(r, col) == 0) continue;
      Rational f = m(r, col) / m(rank, col);
      for (std::size_t c = col; c < cols_; ++c) m(r, c) -= f * m(rank, c);
    }
    ++rank;
  }
  return rank;
}

std::vector<Rational> RationalMatrix::characteristic_polynomial() const {
  if (rows_ != cols_) throw std::invalid_argument("characteristic_polynomial: matrix not square");
  // Faddeev-LeVerrier: M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
  const std::size_t n = rows_;
  std::vector<Rational> coeffs(n + 1);
  coeffs[n] = 1;
  RationalMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix next(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational acc = 0;
        for (std::size_t t = 0; t < n; ++t) acc += (*this)(i, t) * mk(t, j);
        next(i, j) = acc;
      }
    for (std::size_t i = 0; i < n; ++i) next(i, i) += coeffs[n - k + 1];
    Rational trace = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < n; ++t) trace += (*this)(i, t) * next(t, i);
    coeffs[n - k] = -trace / static_cast<long>(k);
    mk = std::move(next);
  }
  return coeffs;
}

bool RationalMatrix::is_positive_semidefinite() const {
  // A symmetric matrix is PSD iff det(xI - A) has coefficients alternating in sign
  // (all roots real; Descartes' rule then forbids negative roots).
  auto c = characteristic_polynomial();
  const std::size_t n = rows_;
  for (std::size_t i = 0; i <= n; ++i) {
    bool positive_slot = ((n - i) % 2 == 0);
    if (positive_slot ? c[i] < 0 : c[i] > 0) return false;
  }
  return true;
}

bool RationalMatrix::is_positive_definite() const {
  if (rows_ != cols_) return false;
  // Gaussian elimination without pivoting: all pivots positive <=> leading minors positive.
  RationalMatrix m = *this;
  for (std::size_t k = 0; k < rows_; ++k) {
    if (m(k, k) <= 0) return false;
    for (std::size_t r = k + 1; r < rows_; ++r) {
      if (m(r, k) == 0) continue;
      Rational f = m(r, k) / m(k, k);
      for (std::size_t c = k; c < cols_; ++c) m(r, c) -= f * m(k, c);
    }
  }
  return true;
}

}  // namespace restrictlab

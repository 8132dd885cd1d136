#pragma once

#include "restrictlab/numeric.hpp"

#include <cstddef>
#include <vector>

namespace restrictlab {

// Dense row-major matrix over Q. Small sizes only (Gram and Jacobian matrices).
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const RationalMatrix&) const = default;

  static RationalMatrix identity(std::size_t n);

  // Block-diagonal sum of `copies` copies of this (square) matrix.
  RationalMatrix block_diagonal(std::size_t copies) const;

  std::size_t rank() const;

  // Coefficients c_0..c_n of det(x I - A), c_n = 1. Requires a square matrix.
  std::vector<Rational> characteristic_polynomial() const;

  // Exact test: symmetric A is positive semidefinite.
  bool is_positive_semidefinite() const;
  // Exact test via leading principal minors.
  bool is_positive_definite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

}  // namespace restrictlab

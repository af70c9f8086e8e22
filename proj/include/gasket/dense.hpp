#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gasket {

/// Row-major dense real matrix. Eigenvector matrices store one vector per column.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// max_ij |a_ij - a_ji|
double asymmetry(const Matrix& a);
/// Replaces a by (a + a^T)/2.
void symmetrize(Matrix& a);
double max_abs(const Matrix& a);
/// Infinity norm: maximum absolute row sum.
double norm_inf(const Matrix& a);
double trace(const Matrix& a);

/// Data-parallel kernels. Each kernel has an OpenMP version and a serial
/// reference with identical per-entry summation order, so both produce
/// bit-identical results regardless of the thread count.
namespace kernels {

/// C = A^T diag(w) B, with A (n x p), B (n x q), w of length n.
Matrix weighted_gram(const Matrix& a, std::span<const double> w, const Matrix& b);
Matrix weighted_gram_serial(const Matrix& a, std::span<const double> w, const Matrix& b);

/// C = A^T B
Matrix gram(const Matrix& a, const Matrix& b);

/// C = A B
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_serial(const Matrix& a, const Matrix& b);

/// y = A x
std::vector<double> apply(const Matrix& a, std::span<const double> x);

}  // namespace kernels

}  // namespace gasket

#include "gasket/dense.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace gasket {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  assert(values.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double asymmetry(const Matrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

void symmetrize(Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double mean = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = mean;
      a(j, i) = mean;
    }
}

double max_abs(const Matrix& a) {
  double worst = 0.0;
  for (double v : a.data()) worst = std::max(worst, std::abs(v));
  return worst;
}

double norm_inf(const Matrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    worst = std::max(worst, s);
  }
  return worst;
}

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

namespace kernels {
namespace {

// Row i of A^T diag(w) B: sum over k of a(k,i) w(k) b(k,:). The k loop is
// innermost per output row so every entry is accumulated in the same order.
void weighted_gram_row(const Matrix& a, std::span<const double> w, const Matrix& b,
                       std::size_t i, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double s = a(k, i) * (w.empty() ? 1.0 : w[k]);
    if (s == 0.0) continue;
    const auto brow = b.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += s * brow[j];
  }
}

void multiply_row(const Matrix& a, const Matrix& b, std::size_t i, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto arow = a.row(i);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double s = arow[k];
    if (s == 0.0) continue;
    const auto brow = b.row(k);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += s * brow[j];
  }
}

}  // namespace

Matrix weighted_gram(const Matrix& a, std::span<const double> w, const Matrix& b) {
  assert(a.rows() == b.rows());
  Matrix c(a.cols(), b.cols());
  const auto p = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < p; ++i)
    weighted_gram_row(a, w, b, static_cast<std::size_t>(i), c.row(static_cast<std::size_t>(i)));
  return c;
}

Matrix weighted_gram_serial(const Matrix& a, std::span<const double> w, const Matrix& b) {
  assert(a.rows() == b.rows());
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) weighted_gram_row(a, w, b, i, c.row(i));
  return c;
}

Matrix gram(const Matrix& a, const Matrix& b) { return weighted_gram(a, {}, b); }

Matrix multiply(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    multiply_row(a, b, static_cast<std::size_t>(i), c.row(static_cast<std::size_t>(i)));
  return c;
}

Matrix multiply_serial(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) multiply_row(a, b, i, c.row(i));
  return c;
}

std::vector<double> apply(const Matrix& a, std::span<const double> x) {
  assert(a.cols() == x.size());
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto arow = a.row(i);
    for (std::size_t k = 0; k < x.size(); ++k) s += arow[k] * x[k];
    y[i] = s;
  }
  return y;
}

}  // namespace kernels
}  // namespace gasket

#include "gasket/eigensolver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "gasket/error.hpp"

namespace gasket {
namespace {

void require_square(const Matrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::Structural, "eigensolver needs a square matrix, got " +
                                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double off_diagonal(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

struct Rotation {
  double c = 1.0;
  double s = 0.0;
  bool active = false;
};

// Rotation annihilating a_pq (Rutishauser's stable form). Entries at or
// below `skip` are left alone.
Rotation rotation_for(double app, double aqq, double apq, double skip) {
  if (std::abs(apq) <= skip) return {};
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  return {c, t * c, true};
}

SymmetricEigen sorted(Matrix diag_source, Matrix vectors, int sweeps) {
  const std::size_t n = diag_source.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return diag_source(x, x) < diag_source(y, y);
  });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweeps;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = diag_source(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = vectors(r, order[k]);
  }
  return out;
}

[[noreturn]] void no_convergence(int sweeps, double off, double frob) {
  throw Error(ErrorKind::Numeric, "Jacobi did not converge after " + std::to_string(sweeps) +
                                      " sweeps (off-diagonal norm " + std::to_string(off) +
                                      ", matrix norm " + std::to_string(frob) + ")");
}

// Round-robin (circle method) schedule: round r pairs player 0 with
// player (r mod (m-1)) + 1 and the rest symmetrically. Players >= n are byes.
std::vector<std::pair<std::size_t, std::size_t>> round_pairs(std::size_t n, std::size_t round) {
  const std::size_t m = n + (n % 2);
  std::vector<std::size_t> ring(m);
  ring[0] = 0;
  for (std::size_t i = 1; i < m; ++i) ring[i] = 1 + (i - 1 + round) % (m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m / 2);
  for (std::size_t i = 0; i < m / 2; ++i) {
    std::size_t p = ring[i];
    std::size_t q = ring[m - 1 - i];
    if (p > q) std::swap(p, q);
    if (q < n) pairs.emplace_back(p, q);
  }
  return pairs;
}

}  // namespace

SymmetricEigen jacobi_serial(const Matrix& input, const JacobiOptions& options) {
  require_square(input);
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  const double frob = frobenius(a);
  if (n == 0 || frob == 0.0) return sorted(a, v, 0);
  const double skip = 1e-3 * options.tolerance * frob / static_cast<double>(n);

  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal(a) <= options.tolerance * frob) return sorted(a, v, sweep);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Rotation rot = rotation_for(a(p, p), a(q, q), a(p, q), skip);
        if (!rot.active) continue;
        const double c = rot.c;
        const double s = rot.s;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  const double off = off_diagonal(a);
  if (off <= options.tolerance * frob) return sorted(a, v, sweep);
  no_convergence(sweep, off, frob);
}

SymmetricEigen jacobi_parallel(const Matrix& input, const JacobiOptions& options) {
  require_square(input);
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  const double frob = frobenius(a);
  if (n < 2 || frob == 0.0) return sorted(a, v, 0);
  const double skip = 1e-3 * options.tolerance * frob / static_cast<double>(n);

  const std::size_t rounds = n + (n % 2) - 1;
  std::vector<Rotation> rot(n);  // indexed by the smaller member of each pair
  const auto rows = static_cast<std::ptrdiff_t>(n);

  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal(a) <= options.tolerance * frob) return sorted(a, v, sweep);
    for (std::size_t round = 0; round < rounds; ++round) {
      const auto pairs = round_pairs(n, round);
      const auto npairs = static_cast<std::ptrdiff_t>(pairs.size());
      // The 2x2 pivot blocks of disjoint pairs do not interact within a round.
      for (const auto& [p, q] : pairs) rot[p] = rotation_for(a(p, p), a(q, q), a(p, q), skip);

      // A <- A J and V <- V J: every row applies all pair rotations to its columns.
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < rows; ++k) {
        auto arow = a.row(static_cast<std::size_t>(k));
        auto vrow = v.row(static_cast<std::size_t>(k));
        for (const auto& [p, q] : pairs) {
          const Rotation& r = rot[p];
          if (!r.active) continue;
          const double akp = arow[p], akq = arow[q];
          arow[p] = r.c * akp - r.s * akq;
          arow[q] = r.s * akp + r.c * akq;
          const double vkp = vrow[p], vkq = vrow[q];
          vrow[p] = r.c * vkp - r.s * vkq;
          vrow[q] = r.s * vkp + r.c * vkq;
        }
      }
      // A <- J^T A: rows p and q of each pair.
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < npairs; ++i) {
        const auto [p, q] = pairs[static_cast<std::size_t>(i)];
        const Rotation& r = rot[p];
        if (!r.active) continue;
        auto prow = a.row(p);
        auto qrow = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = prow[k], aqk = qrow[k];
          prow[k] = r.c * apk - r.s * aqk;
          qrow[k] = r.s * apk + r.c * aqk;
        }
        prow[q] = 0.0;
        qrow[p] = 0.0;
      }
    }
  }
  const double off = off_diagonal(a);
  if (off <= options.tolerance * frob) return sorted(a, v, sweep);
  no_convergence(sweep, off, frob);
}

SymmetricEigen tridiagonal_ql(const Matrix& input) {
  require_square(input);
  const std::size_t n = input.rows();
  if (n == 0) return {};
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(en, en);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = input(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::Numeric,
                "tridiagonal QL failed to converge for a matrix of order " + std::to_string(n));
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < n; ++r)
      out.vectors(r, k) =
          solver.eigenvectors()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
  }
  return out;
}

SymmetricEigen solve_symmetric(const Matrix& a, EigenMethod method) {
  switch (method) {
    case EigenMethod::Jacobi: return jacobi_serial(a);
    case EigenMethod::JacobiParallel: return jacobi_parallel(a);
    case EigenMethod::Tridiagonal: return tridiagonal_ql(a);
    case EigenMethod::Auto: break;
  }
  return a.rows() >= kJacobiSwitchPoint ? tridiagonal_ql(a) : jacobi_parallel(a);
}

std::vector<double> symmetric_eigenvalues(const Matrix& a, EigenMethod method) {
  if (method == EigenMethod::Auto && a.rows() >= kJacobiSwitchPoint) {
    require_square(a);
    const auto en = static_cast<Eigen::Index>(a.rows());
    Eigen::MatrixXd m(en, en);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::Numeric, "tridiagonal QL failed to converge");
    return {solver.eigenvalues().data(), solver.eigenvalues().data() + en};
  }
  return solve_symmetric(a, method).values;
}

double max_residual(const Matrix& a, const SymmetricEigen& eig) {
  double worst = 0.0;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const auto vec = eig.vectors.column(k);
    const auto av = kernels::apply(a, vec);
    for (std::size_t r = 0; r < vec.size(); ++r)
      worst = std::max(worst, std::abs(av[r] - eig.values[k] * vec[r]));
  }
  return worst;
}

}  // namespace gasket

#pragma once

#include <cstddef>
#include <vector>

#include "gasket/dense.hpp"

namespace gasket {

enum class EigenMethod {
  Auto,            ///< Jacobi below kJacobiSwitchPoint, tridiagonal above
  Jacobi,          ///< serial cyclic Jacobi (reference)
  JacobiParallel,  ///< round-robin Jacobi, OpenMP over disjoint rotations
  Tridiagonal,     ///< Householder tridiagonalization + implicit QL
};

/// Matrices of at least this order go to the tridiagonal solver under
/// EigenMethod::Auto. On the gasket Laplacians Jacobi needs ~20 sweeps (the
/// large degenerate eigenspaces keep convergence linear for a long time):
/// 0.03 s vs 0.001 s at n = 120, 2.4 s vs 0.025 s at n = 363.
inline constexpr std::size_t kJacobiSwitchPoint = 128;

struct SymmetricEigen {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< column i is the unit eigenvector of values[i]
  int sweeps = 0;              ///< Jacobi sweeps (0 for the tridiagonal path)
};

struct JacobiOptions {
  int max_sweeps = 60;
  /// Stop once the off-diagonal Frobenius mass drops below tolerance * ||A||_F.
  double tolerance = 1e-13;
};

SymmetricEigen solve_symmetric(const Matrix& a, EigenMethod method = EigenMethod::Auto);

SymmetricEigen jacobi_serial(const Matrix& a, const JacobiOptions& options = {});
SymmetricEigen jacobi_parallel(const Matrix& a, const JacobiOptions& options = {});
SymmetricEigen tridiagonal_ql(const Matrix& a);

/// Eigenvalues only; same ordering as solve_symmetric.
std::vector<double> symmetric_eigenvalues(const Matrix& a, EigenMethod method = EigenMethod::Auto);

/// max_i ||A v_i - lambda_i v_i||_inf over all returned pairs.
double max_residual(const Matrix& a, const SymmetricEigen& eig);

}  // namespace gasket

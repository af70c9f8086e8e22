#include "doctest.h"

#include <cmath>
#include <random>

#include "gasket/dense.hpp"
#include "gasket/eigensolver.hpp"
#include "gasket/error.hpp"
#include "gasket/geometry.hpp"

using namespace gasket;

namespace {

Matrix random_symmetric(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = dist(rng);
  return a;
}

double orthonormality_defect(const Matrix& v) {
  const auto g = kernels::gram(v, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("all solvers agree on random symmetric matrices") {
  for (std::size_t n : {1u, 2u, 7u, 40u}) {
    CAPTURE(n);
    const auto a = random_symmetric(n, 17 + static_cast<unsigned>(n));
    const auto serial = jacobi_serial(a);
    const auto parallel = jacobi_parallel(a);
    const auto ql = tridiagonal_ql(a);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(serial.values[i] == doctest::Approx(ql.values[i]).epsilon(1e-12));
      CHECK(parallel.values[i] == doctest::Approx(ql.values[i]).epsilon(1e-12));
    }
    for (const auto* e : {&serial, &parallel, &ql}) {
      CHECK(max_residual(a, *e) <= 1e-11 * std::max(1.0, norm_inf(a)));
      CHECK(orthonormality_defect(e->vectors) < 1e-12);
    }
  }
}

TEST_CASE("eigenvalue sum equals the trace") {
  const auto lap = build_dirichlet_laplacian(3, false);
  const auto eig = solve_symmetric(lap.matrix);
  double s = 0.0;
  for (double v : eig.values) s += v;
  CHECK(std::abs(s - trace(lap.matrix)) <= 1e-9 * std::abs(trace(lap.matrix)));
}

TEST_CASE("residual bound on graph Laplacians") {
  for (int m = 1; m <= 4; ++m) {
    const auto lap = build_dirichlet_laplacian(m, false);
    for (auto method : {EigenMethod::Jacobi, EigenMethod::JacobiParallel, EigenMethod::Tridiagonal}) {
      const auto eig = solve_symmetric(lap.matrix, method);
      CHECK(max_residual(lap.matrix, eig) <= 1e-9 * norm_inf(lap.matrix));
    }
  }
}

TEST_CASE("level-2 spectrum contains the decimated 2-series pair") {
  const auto eig = solve_symmetric(build_dirichlet_laplacian(2, false).matrix);
  REQUIRE(eig.values.size() == 12);
  const double lo = (5.0 - std::sqrt(17.0)) / 2.0;
  const double hi = (5.0 + std::sqrt(17.0)) / 2.0;
  int nlo = 0, nhi = 0;
  for (double v : eig.values) {
    nlo += std::abs(v - lo) < 1e-10;
    nhi += std::abs(v - hi) < 1e-10;
  }
  CHECK(nlo == 1);
  CHECK(nhi == 1);
}

TEST_CASE("solvers are deterministic") {
  const auto a = random_symmetric(30, 5);
  CHECK(jacobi_parallel(a).vectors == jacobi_parallel(a).vectors);
  CHECK(tridiagonal_ql(a).vectors == tridiagonal_ql(a).vectors);
}

TEST_CASE("non-convergence is reported") {
  JacobiOptions opts;
  opts.max_sweeps = 1;
  opts.tolerance = 1e-30;
  try {
    jacobi_serial(random_symmetric(20, 3), opts);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
  }
  CHECK_THROWS_AS(solve_symmetric(Matrix(2, 3)), Error);
}

TEST_CASE("parallel kernels match their serial references bit for bit") {
  const auto a = random_symmetric(50, 9);
  const auto b = random_symmetric(50, 10);
  std::vector<double> w(50);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * static_cast<double>(i + 1);
  CHECK(kernels::weighted_gram(a, w, b) == kernels::weighted_gram_serial(a, w, b));
  CHECK(kernels::multiply(a, b) == kernels::multiply_serial(a, b));
  const auto c = kernels::multiply(a, b);
  double direct = 0.0;
  for (std::size_t k = 0; k < 50; ++k) direct += a(3, k) * b(k, 7);
  CHECK(c(3, 7) == doctest::Approx(direct).epsilon(1e-14));
}

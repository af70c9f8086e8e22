#pragma once

// Symbols p(x, lambda), their compressions to finite eigenbases, and the
// matrix functional calculus used by the Szego and cluster experiments.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gasket/decimation.hpp"
#include "gasket/dense.hpp"
#include "gasket/eigenbasis.hpp"
#include "gasket/geometry.hpp"

namespace gasket {

/// A real function of one variable with a printable descriptor. `power` is
/// set for x^k so traces can be cross-checked by matrix powers; `domain` is
/// the interval on which the function may be evaluated.
struct ScalarFunction {
  std::function<double(double)> fn;
  std::string name;
  std::optional<int> power;
  std::optional<std::pair<double, double>> domain;

  double operator()(double x) const { return fn(x); }

  static ScalarFunction identity();
  static ScalarFunction monomial(int k);
  static ScalarFunction log();
  /// c0 + c1 x + c2 x^2 + ...
  static ScalarFunction polynomial(std::vector<double> coefficients);
  static ScalarFunction constant(double c);
  /// "identity", "log", "power:k", "poly:c0,c1,...".
  static ScalarFunction parse(const std::string& descriptor);
};

enum class SymbolKind { ConstantCoefficient, Multiplication, Separable, Tabulated };

std::string to_string(SymbolKind kind);

struct SymbolSpec {
  SymbolKind kind = SymbolKind::Multiplication;
  std::string name;
  /// p(lambda) for ConstantCoefficient, q(lambda) for Separable.
  ScalarFunction of_lambda;
  /// f for Multiplication, chi for Separable.
  SpatialFunction spatial;
  /// Per-eigenvalue simple functions for Tabulated, sorted by eigenvalue.
  std::vector<std::pair<double, SimpleFunction>> table;
  std::optional<SpatialFunction> limit_q;
  std::optional<double> lower_bound;

  bool depends_on_lambda() const noexcept {
    return kind != SymbolKind::Multiplication;
  }
  double at(const VertexSet& v, std::int64_t cell, std::size_t vertex, double lambda) const;
  /// Value on the closed cell if p(., lambda) is constant there for every lambda.
  std::optional<double> constant_on(const CellAddress& cell, double lambda) const;
  /// sum over cells c containing x of w_c p_c(x, lambda), interior vertices in matrix order.
  std::vector<double> weighted_diagonal(const GasketLevel& level, double lambda) const;
  double sampled_min(const VertexSet& v, double lambda) const;
  double sampled_max(const VertexSet& v, double lambda) const;
  /// Sampled sup over incidences of |p(., lambda) - q|; needs limit_q.
  double distance_to_limit(const VertexSet& v, double lambda) const;
};

/// 1 + lambda^(-beta); limit 1, bounded below by 1.
SymbolSpec riesz_symbol(double beta);
/// 1 + (1 + lambda)^(-beta); limit 1, bounded below by 1.
SymbolSpec bessel_symbol(double beta);
SymbolSpec constant_coefficient_symbol(ScalarFunction p);
SymbolSpec multiplication_symbol(SpatialFunction f);
SymbolSpec constant_symbol(double c);
/// q(lambda) + chi(x) with lim q = l; the limit is l + chi.
SymbolSpec separable_symbol(ScalarFunction q, double l, SpatialFunction chi);
SymbolSpec tabulated_symbol(std::vector<std::pair<double, SimpleFunction>> table);

struct SymbolParams {
  std::string kind;  ///< riesz, bessel, constant, multiplication, separable, constant-coefficient
  double beta = 1.0;
  double c = 1.0;
  SpatialFunction f;
  ScalarFunction q;
  double l = 0.0;
  std::optional<double> lower_bound;
};

SymbolSpec make_symbol(const SymbolParams& params);

struct SymbolDiagnostics {
  double min_value = 0.0;
  double max_value = 0.0;
  /// Sampled distances to the limit along the tested eigenvalues (empty without limit_q).
  std::vector<double> limit_distances;
  bool limit_trend_nonincreasing = true;
};

/// Samples the symbol on all incidences for the given eigenvalues. Throws
/// Hypothesis if a declared lower bound is violated.
SymbolDiagnostics check_symbol(const SymbolSpec& symbol, const VertexSet& v,
                               const std::vector<double>& lambdas);

struct CompressedOperator {
  int level = 0;
  std::vector<BasisVector> basis;
  std::vector<double> lambda_assignment;
  Matrix matrix;
  /// max |G - G^T| before symmetrization.
  double asymmetry = 0.0;
  /// Rows set exactly by the constant-on-support rule.
  std::size_t exact_rows = 0;
  std::string symbol;

  std::size_t dimension() const noexcept { return matrix.rows(); }
};

/// Entry (a, b) is the mu-weighted vertex sum of p(x, lambda_b) u_a u_b, then
/// symmetrized. A row whose vector is supported in a cell where the symbol is
/// constant is set to that constant times the unit row.
CompressedOperator compress(const SymbolSpec& symbol, const Eigenbasis& basis, const GasketLevel& level);

/// sum F(sigma_i) over the eigenvalues of the operator. Throws Hypothesis if
/// some sigma lies outside F's domain; for monomials also compares against
/// the trace of the matrix power (1e-8 relative) and throws Numeric on disagreement.
double trace_F(const CompressedOperator& op, const ScalarFunction& F);
double trace_F(const Matrix& symmetric, const ScalarFunction& F);
/// Tr(A^k) by repeated multiplication.
double power_trace(const Matrix& a, int k);

/// sum log sigma_i; throws Domain on a nonpositive eigenvalue.
double log_det(const CompressedOperator& op);
double log_det(const Matrix& symmetric);

std::vector<double> operator_spectrum(const CompressedOperator& op);

struct SpectralBounds {
  double A = 0.0;
  double B = 0.0;
  double lambda_bar = 0.0;
  double epsilon = 0.0;
};

/// Lambda_bar is the smallest table value from which on every sampled
/// distance to the limit is below epsilon; [A, B] joins [min q - eps, max q + eps]
/// with the spectrum of the compression to eigenvalues <= Lambda_bar.
SpectralBounds spectral_bounds(const SymbolSpec& symbol, const SpectrumTable& table,
                               const LevelSpectrum& spectrum, double epsilon);

/// Sorted {p(lambda_n)} repeated by multiplicity.
std::vector<double> spectrum_map(const ScalarFunction& p, const SpectrumTable& table);

}  // namespace gasket

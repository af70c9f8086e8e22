#pragma once

// Szego-type limits: normalized traces and log-determinants of compressions
// to single eigenspaces and to spectral cutoffs, against integrals of the
// symbol's limit.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gasket/eigenbasis.hpp"
#include "gasket/operators.hpp"

namespace gasket {

struct ConvergenceSample {
  double index = 0.0;  ///< birth j or cutoff Lambda
  std::int64_t d = 0;
  double value = 0.0;
  double abs_error = 0.0;
  /// Dimension from records born at generation <= J and > J; they sum to d.
  std::int64_t head_mass = 0;
  std::int64_t tail_mass = 0;
  /// Proof-internal error bound when one is available for this sample.
  std::optional<double> bound;
};

struct ConvergenceReport {
  std::string experiment;
  std::string symbol;
  std::string function;
  int level = 0;
  int cell_level = 0;  ///< N for single-series runs
  int generation = 0;  ///< J for the head/tail split
  double target = 0.0;
  double target_tolerance = 0.0;
  std::vector<ConvergenceSample> samples;

  void recompute_errors();
  /// Errors never increase along the samples.
  bool monotone() const;
  /// The last error is the smallest one.
  bool last_is_smallest() const;
  std::string verdict() const;
};

struct TargetIntegral {
  double value = 0.0;
  double tolerance = 0.0;  ///< 0 when the closed form applies
  int levels = 0;          ///< refinement levels used (0 for closed forms)
};

/// Integral of F(g) against mu: exact for simple g, otherwise cell-vertex
/// rules at increasing level with Richardson extrapolation (factor 4) until
/// two extrapolants agree to `tol`.
TargetIntegral integrate_composed(const SpatialFunction& g, const ScalarFunction& F, double tol = 1e-10);

/// Record key of the canonical eigenvalue of a series born at generation j:
/// (6, j, "+") or (5, j, "").
std::string series_key(int series, int birth);

/// (alpha^N/d_j) int |f|^k + ((alpha^N)^k/d_j) ||f||^k for f simple at level N.
double simple_function_bound(const SimpleFunction& f, int k, int series, int birth);

/// J default: ceil(m/2).
int default_generation(int m);

/// lambda_min 5^k below the level-m window.
std::vector<double> default_lambda_grid(int m);

ConvergenceReport szego_trace_single_series(const SymbolSpec& symbol, const ScalarFunction& F, int series,
                                            const std::vector<int>& births, int cell_level,
                                            const LevelSpectrum& spectrum);
ConvergenceReport szego_trace_full(const SymbolSpec& symbol, const ScalarFunction& F,
                                   const std::vector<double>& grid, const LevelSpectrum& spectrum,
                                   int generation = 0);
ConvergenceReport szego_logdet_single_series(const SymbolSpec& symbol, int series, const std::vector<int>& births,
                                             int cell_level, const LevelSpectrum& spectrum);
ConvergenceReport szego_logdet_full(const SymbolSpec& symbol, const std::vector<double>& grid,
                                    const LevelSpectrum& spectrum, int generation = 0);

struct SandwichCheck {
  bool ratio_holds = false;  ///< 1 - eps < p / f_N < 1 + eps on every sample
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool ordered() const noexcept { return lower <= value && value <= upper; }
};

/// log det of the compressions of f_N (1 - eps), p and f_N (1 + eps) on `basis`.
SandwichCheck logdet_sandwich(const SymbolSpec& symbol, const SimpleFunction& f_N, double eps,
                              const Eigenbasis& basis, const GasketLevel& level);

}  // namespace gasket

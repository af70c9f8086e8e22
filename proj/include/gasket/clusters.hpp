#pragma once

// Generalized Schrodinger operators H = p(-Delta) + [chi] on a level-m
// eigenbasis and the eigenvalue clusters of H around p(lambda_j).

#include <cstdint>
#include <string>
#include <vector>

#include "gasket/eigenbasis.hpp"
#include "gasket/operators.hpp"
#include "gasket/szego.hpp"

namespace gasket {

inline constexpr double kClusterSlack = 1e-9;

struct SchrodingerMatrix {
  int level = 0;
  Eigenbasis basis;
  /// diag(p(lambda_n)) + compression of [chi].
  Matrix matrix;
  std::string p_name;
  std::string chi_name;
};

SchrodingerMatrix build_schrodinger(const ScalarFunction& p, const SpatialFunction& chi,
                                    const LevelSpectrum& spectrum);

struct ClusterCenter {
  int j = 0;
  double lambda = 0.0;
  double center = 0.0;  ///< p(lambda_j)
  std::int64_t d = 0;   ///< multiplicity of lambda_j
};

/// p applied to the 6-series family (6, j, "+"), j = 2.. while lambda_j is
/// inside the level-m window.
std::vector<ClusterCenter> family_centers(const ScalarFunction& p, int m);

struct ClusterMeasure {
  int j = 0;
  double center = 0.0;
  std::int64_t d = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  /// nu_i - p(lambda_j) for the eigenvalues nu_i of H inside the window,
  /// refined as eigenvalues of `local`.
  std::vector<double> positions;
  double weight = 0.0;
  bool complete = false;  ///< exactly d eigenvalues in the window
  /// V^T (H - p(lambda_j)) V for the cluster's eigenvectors V.
  Matrix local;
};

struct ClusterScan {
  std::vector<ClusterMeasure> clusters;
  /// Smallest j from which every cluster is complete.
  int threshold = 0;
  /// Eigenvalues of H outside every window.
  std::int64_t outside = 0;
  std::int64_t total = 0;
  /// Largest eigenpair residual of the dense solve; membership tests widen
  /// each window by this much.
  double solver_error = 0.0;
};

/// Windows [c + chi_min - slack, c + chi_max + slack]. Throws Separation if
/// two windows overlap and ClusterCount if the last cluster is incomplete.
ClusterScan identify_clusters(const SchrodingerMatrix& h, const std::vector<ClusterCenter>& centers,
                              double chi_min, double chi_max, double slack = kClusterSlack);

/// Moments 0..k_max of the atoms; each is compared with (1/d) Tr(local^k)
/// and a disagreement above 1e-8 relative throws Numeric.
std::vector<double> cluster_moments(const ClusterMeasure& psi, int k_max);
double cluster_trace_moment(const ClusterMeasure& psi, int k);

/// <Psi_j, F> against the integral of F(chi) for the family generations in `births`.
ConvergenceReport weak_limit_check(const SpatialFunction& chi, const ScalarFunction& p, const std::vector<int>& births,
                                   const ScalarFunction& F, const LevelSpectrum& spectrum);
/// Same report from an existing scan.
ConvergenceReport weak_limit_report(const ClusterScan& scan, const SpatialFunction& chi, const ScalarFunction& p,
                                    const ScalarFunction& F, int m);

struct LipschitzResult {
  double displacement = 0.0;  ///< max_n |nu_n^1 - nu_n^2| over sorted eigenvalues
  double sup_distance = 0.0;  ///< sampled ||chi1 - chi2||_inf
};

/// Throws Hypothesis if the displacement exceeds sup_distance + 1e-9.
LipschitzResult lipschitz_check(const ScalarFunction& p, const SpatialFunction& chi1, const SpatialFunction& chi2,
                                const LevelSpectrum& spectrum);

struct SeparationReport {
  bool holds = false;
  bool increasing = false;
  /// min over pairs of |p(a) - p(b)| / |a - b|^beta.
  double sharp_c = 0.0;
  std::size_t worst_first = 0;
  std::size_t worst_second = 0;
};

SeparationReport separation_check(const ScalarFunction& p, const std::vector<double>& family, double c,
                                  double beta, double lambda_bar);

}  // namespace gasket

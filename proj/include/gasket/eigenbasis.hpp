#pragma once

// Graph eigenpairs grouped into eigenspaces of the decimation records, and
// the split of an eigenspace into vectors localized on single N-cells plus a
// non-localized remainder.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gasket/decimation.hpp"
#include "gasket/dense.hpp"
#include "gasket/eigensolver.hpp"
#include "gasket/geometry.hpp"

namespace gasket {

inline constexpr double kGroupingTolerance = 1e-6;
inline constexpr double kSnapTolerance = 1e-10;

struct EigenPair {
  double graph_value = 0.0;
  std::vector<double> vector;  ///< unit Euclidean norm, over interior vertices
};

/// Full eigendecomposition of the unrenormalized Dirichlet Laplacian, ascending.
std::vector<EigenPair> solve_graph_spectrum(const GraphLaplacian& laplacian,
                                            EigenMethod method = EigenMethod::Auto);

/// -Delta_m v for the unrenormalized level-m Dirichlet graph Laplacian (sparse).
std::vector<double> apply_graph_laplacian(const VertexSet& vertices, std::span<const double> v);

/// mu-weighted inner product over interior vertices.
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);

struct EigenspaceBundle {
  int level = 0;
  EigenvalueRecord record;
  double graph_value = 0.0;
  /// Columns orthonormal in the mu-weighted inner product.
  Matrix vectors;

  std::size_t dimension() const noexcept { return vectors.cols(); }
};

/// Assigns every pair to the decimation record whose level-m graph value it
/// matches; throws Mismatch for orphans or dimension disagreements.
std::vector<EigenspaceBundle> group_eigenspaces(const std::vector<EigenPair>& pairs,
                                                const GasketLevel& level);
/// Same, additionally requiring every matched record to appear in `table`.
std::vector<EigenspaceBundle> group_eigenspaces(const std::vector<EigenPair>& pairs,
                                                const SpectrumTable& table, const GasketLevel& level);

struct LocalizedBasis {
  int cell_level = 0;
  int level = 0;
  EigenvalueRecord record;
  double graph_value = 0.0;
  /// One entry per N-cell in lexicographic order; each vector vanishes exactly
  /// outside the open cell.
  std::vector<std::pair<CellAddress, Matrix>> per_cell;
  Matrix nonlocalized;

  std::size_t localized_count() const;
  std::size_t nonlocalized_count() const noexcept { return nonlocalized.cols(); }
};

LocalizedBasis localized_split(const EigenspaceBundle& bundle, int cell_level,
                               const GasketLevel& level);

/// Same split with the non-localized block replaced by a seeded random
/// orthonormal recombination of itself (a different valid completion).
LocalizedBasis rotate_nonlocalized(const LocalizedBasis& basis, std::uint64_t seed);

struct BasisVector {
  std::string record_key;
  std::size_t index = 0;     ///< position within its eigenspace
  double lambda = 0.0;       ///< eigenvalue of -Delta (renormalized limit)
  double graph_value = 0.0;  ///< level-m graph eigenvalue
  int birth = 0;
  /// Smallest known cell containing the support (the empty word when not localized).
  CellAddress support;
};

/// An ordered subset of a level-m eigenbasis: the columns of `vectors`.
struct Eigenbasis {
  int level = 0;
  std::vector<BasisVector> meta;
  Matrix vectors;

  std::size_t size() const noexcept { return meta.size(); }
};

Eigenbasis basis_from_bundle(const EigenspaceBundle& bundle);
/// Localized vectors (cells in order), then the non-localized block.
Eigenbasis basis_from_split(const LocalizedBasis& split);
/// All bundles with eigenvalue <= cutoff, ascending.
Eigenbasis basis_up_to(const std::vector<EigenspaceBundle>& bundles, double cutoff);

/// Level geometry, measure, and the grouped eigendecomposition.
struct LevelSpectrum {
  GasketLevel level;
  std::vector<EigenspaceBundle> bundles;

  const EigenspaceBundle& bundle(const std::string& record_key) const;
  int m() const noexcept { return level.level(); }
};

LevelSpectrum build_level_spectrum(int m, EigenMethod method = EigenMethod::Auto);

/// max |<v_i, v_j>_mu - delta_ij| over the columns.
double weighted_orthonormality_defect(const Matrix& vectors, std::span<const double> w);

}  // namespace gasket

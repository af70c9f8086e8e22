#pragma once

// Sierpinski gasket geometry: cell addresses, the level-m vertex set with its
// cell incidence, the self-similar probability measure, simple functions and
// the Dirichlet graph Laplacian on interior vertices.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gasket/dense.hpp"

namespace gasket {

inline constexpr int kDefaultLevelCap = 8;
/// Dense Laplacians are n^2 doubles; level 8 would need ~0.8 GB.
inline constexpr int kDenseLevelCap = 7;

std::int64_t pow3(int e);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Word over {1,2,3}; the empty word is the whole gasket.
class CellAddress {
 public:
  CellAddress() = default;
  explicit CellAddress(std::vector<std::uint8_t> letters);

  /// Cell number `index` among the 3^level cells in lexicographic order.
  static CellAddress from_index(int level, std::int64_t index);
  static std::vector<CellAddress> all(int level);
  static CellAddress parse(const std::string& word);

  int level() const noexcept { return static_cast<int>(letters_.size()); }
  const std::vector<std::uint8_t>& letters() const noexcept { return letters_; }
  std::int64_t index() const;
  CellAddress prefix(int level) const;
  bool contains(const CellAddress& other) const;
  std::string to_string() const;

  friend auto operator<=>(const CellAddress&, const CellAddress&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

/// Level-m vertices V_m. Identification is by exact lattice coordinates
/// (i, j) meaning a1 + (i/2^m)(a2 - a1) + (j/2^m)(a3 - a1).
struct VertexSet {
  int level = 0;
  std::vector<Point> coords;
  std::vector<std::array<std::int64_t, 2>> lattice;
  std::array<std::size_t, 3> boundary{};
  std::vector<bool> is_boundary;
  /// Cells (as level-m cell indices) containing each vertex.
  std::vector<std::vector<std::int64_t>> incidence;
  /// Vertex ids of each level-m cell, ordered as F_w(a1), F_w(a2), F_w(a3).
  std::vector<std::array<std::size_t, 3>> cell_vertices;
  /// Interior vertex ids in ascending order; index into this is the matrix index.
  std::vector<std::size_t> interior;
  /// vertex id -> position in `interior`, or npos for boundary vertices.
  std::vector<std::size_t> interior_index;

  std::size_t size() const noexcept { return coords.size(); }
  std::size_t cell_count() const noexcept { return cell_vertices.size(); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

VertexSet build_vertices(int m, int level_cap = kDefaultLevelCap);

struct SelfSimilarMeasure {
  int level = 0;
  /// 3^(-m-1) for each level-m cell containing the vertex.
  std::vector<double> weights;
  double incidence_weight = 0.0;

  double total() const;
  /// Mass of cell w (level <= m) with per-cell attribution of shared vertices.
  double cell_mass(const VertexSet& vertices, const CellAddress& cell) const;
  /// Weights restricted to interior vertices, in matrix order.
  std::vector<double> interior_weights(const VertexSet& vertices) const;
};

SelfSimilarMeasure build_measure(const VertexSet& vertices);

/// f = sum_i a_i chi_{C_i} over the level-N cells in lexicographic order.
struct SimpleFunction {
  int level = 0;
  std::vector<double> values;

  SimpleFunction() = default;
  SimpleFunction(int level, std::vector<double> values);
  static SimpleFunction constant(double c);
  static SimpleFunction indicator(const CellAddress& cell);

  /// Value on the level-N cell containing level-m cell `cell_index` (m >= N).
  double on_cell(int m, std::int64_t cell_index) const;
  double sup_norm() const;
  double min() const;
  double max() const;
};

/// Closed form sum_i a_i^k 3^(-N).
double integrate_simple(const SimpleFunction& f, int k);

/// A function on the gasket evaluated per (cell, vertex) incidence: simple
/// functions take their per-cell value, continuous ones their point value.
class SpatialFunction {
 public:
  struct Continuous {
    std::function<double(Point)> fn;
    std::string name;
  };

  SpatialFunction() : SpatialFunction(SimpleFunction::constant(0.0)) {}
  SpatialFunction(SimpleFunction f) : repr_(std::move(f)) {}  // NOLINT: implicit by intent
  SpatialFunction(std::function<double(Point)> fn, std::string name)
      : repr_(Continuous{std::move(fn), std::move(name)}) {}

  bool is_simple() const noexcept { return std::holds_alternative<SimpleFunction>(repr_); }
  const SimpleFunction* simple() const noexcept { return std::get_if<SimpleFunction>(&repr_); }
  std::string describe() const;

  double at(const VertexSet& v, std::int64_t cell, std::size_t vertex) const;
  double at_point(Point p) const;
  /// Value if the function is constant on the closed cell, else nullopt.
  std::optional<double> constant_on(const CellAddress& cell) const;

  /// Sampled over all (cell, vertex) incidences of v.
  double sampled_min(const VertexSet& v) const;
  double sampled_max(const VertexSet& v) const;
  double sampled_sup(const VertexSet& v) const;

  /// Incidence-weighted diagonal: sum over cells c containing x of w_c * f_c(x),
  /// for interior vertices in matrix order.
  std::vector<double> weighted_diagonal(const VertexSet& v, const SelfSimilarMeasure& mu) const;

 private:
  std::variant<SimpleFunction, Continuous> repr_;
};

/// Planar coordinate of the default embedding, as a continuous function.
SpatialFunction coordinate_function(int axis);

struct GraphLaplacian {
  int level = 0;
  Matrix matrix;
  bool renormalized = false;
  /// (3/2) 5^m when renormalized, otherwise 1.
  double scale = 1.0;
};

double renormalization(int m);

GraphLaplacian build_dirichlet_laplacian(const VertexSet& vertices, bool renormalize);
GraphLaplacian build_dirichlet_laplacian(int m, bool renormalize);

/// Everything that depends only on the approximation level.
struct GasketLevel {
  VertexSet vertices;
  SelfSimilarMeasure measure;

  int level() const noexcept { return vertices.level; }
  std::size_t interior_size() const noexcept { return vertices.interior.size(); }
};

GasketLevel make_level(int m, int level_cap = kDefaultLevelCap);

}  // namespace gasket

#include "gasket/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "gasket/error.hpp"

namespace gasket {

std::int64_t pow3(int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

// ---------------------------------------------------------------- CellAddress

CellAddress::CellAddress(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
  for (auto l : letters_)
    if (l < 1 || l > 3)
      throw Error(ErrorKind::Domain, "cell address letters must be 1, 2 or 3");
}

CellAddress CellAddress::from_index(int level, std::int64_t index) {
  if (index < 0 || index >= pow3(level))
    throw Error(ErrorKind::Domain, "cell index out of range for level " + std::to_string(level));
  std::vector<std::uint8_t> letters(static_cast<std::size_t>(level));
  for (int i = level - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % 3 + 1);
    index /= 3;
  }
  return CellAddress(std::move(letters));
}

std::vector<CellAddress> CellAddress::all(int level) {
  std::vector<CellAddress> cells;
  const auto n = pow3(level);
  cells.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) cells.push_back(from_index(level, i));
  return cells;
}

CellAddress CellAddress::parse(const std::string& word) {
  std::vector<std::uint8_t> letters;
  for (char ch : word) {
    if (ch < '1' || ch > '3') throw Error(ErrorKind::Domain, "bad cell address '" + word + "'");
    letters.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return CellAddress(std::move(letters));
}

std::int64_t CellAddress::index() const {
  std::int64_t idx = 0;
  for (auto l : letters_) idx = 3 * idx + (l - 1);
  return idx;
}

CellAddress CellAddress::prefix(int level) const {
  return CellAddress(std::vector<std::uint8_t>(letters_.begin(), letters_.begin() + level));
}

bool CellAddress::contains(const CellAddress& other) const {
  return other.level() >= level() && std::equal(letters_.begin(), letters_.end(), other.letters_.begin());
}

std::string CellAddress::to_string() const {
  std::string s;
  for (auto l : letters_) s.push_back(static_cast<char>('0' + l));
  return s;
}

// ------------------------------------------------------------------ vertices

VertexSet build_vertices(int m, int level_cap) {
  if (m < 0) throw Error(ErrorKind::Domain, "level must be nonnegative");
  if (m > level_cap)
    throw Error(ErrorKind::ResourceLimit,
                "level " + std::to_string(m) + " exceeds the cap " + std::to_string(level_cap));

  const std::int64_t side = std::int64_t{1} << m;
  const std::array<std::array<std::int64_t, 2>, 3> corners{{{0, 0}, {side, 0}, {0, side}}};
  const Point a1{0.0, 0.0}, a2{1.0, 0.0}, a3{0.5, std::sqrt(3.0) / 2.0};

  VertexSet vs;
  vs.level = m;
  std::map<std::array<std::int64_t, 2>, std::size_t> ids;
  const auto ncells = pow3(m);
  vs.cell_vertices.resize(static_cast<std::size_t>(ncells));

  for (std::int64_t c = 0; c < ncells; ++c) {
    auto tri = corners;
    const auto word = CellAddress::from_index(m, c);
    for (auto letter : word.letters()) {
      const auto pivot = tri[letter - 1];
      for (auto& v : tri) v = {(v[0] + pivot[0]) / 2, (v[1] + pivot[1]) / 2};
    }
    for (std::size_t k = 0; k < 3; ++k) {
      auto [it, inserted] = ids.try_emplace(tri[k], vs.lattice.size());
      if (inserted) {
        vs.lattice.push_back(tri[k]);
        const double s = static_cast<double>(tri[k][0]) / static_cast<double>(side);
        const double t = static_cast<double>(tri[k][1]) / static_cast<double>(side);
        vs.coords.push_back({a1.x + s * (a2.x - a1.x) + t * (a3.x - a1.x),
                             a1.y + s * (a2.y - a1.y) + t * (a3.y - a1.y)});
        vs.incidence.emplace_back();
      }
      vs.cell_vertices[static_cast<std::size_t>(c)][k] = it->second;
      vs.incidence[it->second].push_back(c);
    }
  }

  vs.is_boundary.assign(vs.size(), false);
  for (std::size_t k = 0; k < 3; ++k) {
    vs.boundary[k] = ids.at(corners[k]);
    vs.is_boundary[vs.boundary[k]] = true;
  }
  vs.interior_index.assign(vs.size(), VertexSet::npos);
  for (std::size_t v = 0; v < vs.size(); ++v) {
    if (vs.is_boundary[v]) continue;
    vs.interior_index[v] = vs.interior.size();
    vs.interior.push_back(v);
  }
  return vs;
}

// ------------------------------------------------------------------- measure

double SelfSimilarMeasure::total() const {
  // Weights are integer multiples of the incidence weight; sum the multiples.
  std::int64_t incidences = 0;
  for (double w : weights) incidences += std::llround(w / incidence_weight);
  return static_cast<double>(incidences) * incidence_weight;
}

double SelfSimilarMeasure::cell_mass(const VertexSet& vertices, const CellAddress& cell) const {
  if (cell.level() > level)
    throw Error(ErrorKind::Domain, "cell finer than the measure's level");
  const auto span = pow3(level - cell.level());
  const auto first = cell.index() * span;
  std::int64_t incidences = 0;
  for (std::int64_t c = first; c < first + span; ++c)
    incidences += static_cast<std::int64_t>(vertices.cell_vertices[static_cast<std::size_t>(c)].size());
  return static_cast<double>(incidences) * incidence_weight;
}

std::vector<double> SelfSimilarMeasure::interior_weights(const VertexSet& vertices) const {
  std::vector<double> w;
  w.reserve(vertices.interior.size());
  for (auto v : vertices.interior) w.push_back(weights[v]);
  return w;
}

SelfSimilarMeasure build_measure(const VertexSet& vertices) {
  SelfSimilarMeasure mu;
  mu.level = vertices.level;
  mu.incidence_weight = 1.0 / static_cast<double>(pow3(vertices.level + 1));
  mu.weights.resize(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v)
    mu.weights[v] = static_cast<double>(vertices.incidence[v].size()) * mu.incidence_weight;
  return mu;
}

// ----------------------------------------------------------- simple functions

SimpleFunction::SimpleFunction(int level_, std::vector<double> values_)
    : level(level_), values(std::move(values_)) {
  if (level < 0 || static_cast<std::int64_t>(values.size()) != pow3(level))
    throw Error(ErrorKind::Domain, "simple function at level " + std::to_string(level) +
                                       " needs " + std::to_string(pow3(std::max(level, 0))) +
                                       " values, got " + std::to_string(values.size()));
}

SimpleFunction SimpleFunction::constant(double c) { return SimpleFunction(0, {c}); }

SimpleFunction SimpleFunction::indicator(const CellAddress& cell) {
  std::vector<double> values(static_cast<std::size_t>(pow3(cell.level())), 0.0);
  values[static_cast<std::size_t>(cell.index())] = 1.0;
  return SimpleFunction(cell.level(), std::move(values));
}

double SimpleFunction::on_cell(int m, std::int64_t cell_index) const {
  return values[static_cast<std::size_t>(cell_index / pow3(m - level))];
}

double SimpleFunction::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double SimpleFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double SimpleFunction::max() const { return *std::max_element(values.begin(), values.end()); }

double integrate_simple(const SimpleFunction& f, int k) {
  if (k < 0) throw Error(ErrorKind::Domain, "power must be nonnegative");
  double s = 0.0;
  for (double a : f.values) s += std::pow(a, k);
  return s / static_cast<double>(pow3(f.level));
}

// ---------------------------------------------------------- spatial functions

std::string SpatialFunction::describe() const {
  if (const auto* f = simple()) {
    std::ostringstream os;
    os << "simple(level=" << f->level << ")";
    return os.str();
  }
  return std::get<Continuous>(repr_).name;
}

double SpatialFunction::at(const VertexSet& v, std::int64_t cell, std::size_t vertex) const {
  if (const auto* f = simple()) return f->on_cell(v.level, cell);
  return std::get<Continuous>(repr_).fn(v.coords[vertex]);
}

double SpatialFunction::at_point(Point p) const {
  if (const auto* f = simple()) {
    if (f->level != 0)
      throw Error(ErrorKind::Domain, "a simple function has no single value at a point");
    return f->values[0];
  }
  return std::get<Continuous>(repr_).fn(p);
}

std::optional<double> SpatialFunction::constant_on(const CellAddress& cell) const {
  const auto* f = simple();
  if (f == nullptr || f->level > cell.level()) return std::nullopt;
  return f->values[static_cast<std::size_t>(cell.prefix(f->level).index())];
}

namespace {
template <class Reduce>
double reduce_incidences(const SpatialFunction& f, const VertexSet& v, double init, Reduce op) {
  double acc = init;
  for (std::size_t c = 0; c < v.cell_count(); ++c)
    for (auto vertex : v.cell_vertices[c])
      acc = op(acc, f.at(v, static_cast<std::int64_t>(c), vertex));
  return acc;
}
}  // namespace

double SpatialFunction::sampled_min(const VertexSet& v) const {
  return reduce_incidences(*this, v, INFINITY, [](double a, double b) { return std::min(a, b); });
}

double SpatialFunction::sampled_max(const VertexSet& v) const {
  return reduce_incidences(*this, v, -INFINITY, [](double a, double b) { return std::max(a, b); });
}

double SpatialFunction::sampled_sup(const VertexSet& v) const {
  return reduce_incidences(*this, v, 0.0,
                           [](double a, double b) { return std::max(a, std::abs(b)); });
}

std::vector<double> SpatialFunction::weighted_diagonal(const VertexSet& v,
                                                       const SelfSimilarMeasure& mu) const {
  std::vector<double> d(v.interior.size(), 0.0);
  for (std::size_t i = 0; i < v.interior.size(); ++i) {
    const auto vertex = v.interior[i];
    for (auto cell : v.incidence[vertex]) d[i] += mu.incidence_weight * at(v, cell, vertex);
  }
  return d;
}

SpatialFunction coordinate_function(int axis) {
  if (axis == 0) return SpatialFunction([](Point p) { return p.x; }, "x");
  return SpatialFunction([](Point p) { return p.y; }, "y");
}

// ----------------------------------------------------------------- Laplacian

double renormalization(int m) { return 1.5 * std::pow(5.0, m); }

GraphLaplacian build_dirichlet_laplacian(const VertexSet& vertices, bool renormalize) {
  if (vertices.level < 1)
    throw Error(ErrorKind::Domain, "level 0 has no interior vertices; Dirichlet matrix is empty");
  if (vertices.level > kDenseLevelCap)
    throw Error(ErrorKind::ResourceLimit, "dense Laplacian above level " +
                                              std::to_string(kDenseLevelCap) + " not supported");
  const std::size_t n = vertices.interior.size();
  GraphLaplacian lap;
  lap.level = vertices.level;
  lap.renormalized = renormalize;
  lap.scale = renormalize ? renormalization(vertices.level) : 1.0;
  lap.matrix = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) lap.matrix(i, i) = 4.0 * lap.scale;
  for (const auto& cell : vertices.cell_vertices)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        if (a == b) continue;
        const auto ia = vertices.interior_index[cell[a]];
        const auto ib = vertices.interior_index[cell[b]];
        if (ia != VertexSet::npos && ib != VertexSet::npos) lap.matrix(ia, ib) = -lap.scale;
      }
  return lap;
}

GraphLaplacian build_dirichlet_laplacian(int m, bool renormalize) {
  return build_dirichlet_laplacian(build_vertices(m), renormalize);
}

GasketLevel make_level(int m, int level_cap) {
  GasketLevel level{build_vertices(m, level_cap), {}};
  level.measure = build_measure(level.vertices);
  return level;
}

}  // namespace gasket

#include "gasket/szego.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gasket/error.hpp"

namespace gasket {
namespace {

constexpr int kMaxQuadratureLevel = 13;

// Sum over the level-n cells below the triangle (p0, p1, p2) of the mean of
// F(g) over the cell's corners.
double vertex_rule(const SpatialFunction& g, const ScalarFunction& F, Point p0, Point p1, Point p2, int n) {
  if (n == 0) return (F(g.at_point(p0)) + F(g.at_point(p1)) + F(g.at_point(p2))) / 3.0;
  const Point m01{(p0.x + p1.x) / 2, (p0.y + p1.y) / 2};
  const Point m02{(p0.x + p2.x) / 2, (p0.y + p2.y) / 2};
  const Point m12{(p1.x + p2.x) / 2, (p1.y + p2.y) / 2};
  return vertex_rule(g, F, p0, m01, m02, n - 1) + vertex_rule(g, F, m01, p1, m12, n - 1) +
         vertex_rule(g, F, m02, m12, p2, n - 1);
}

const SpatialFunction& require_limit(const SymbolSpec& symbol) {
  if (!symbol.limit_q)
    throw Error(ErrorKind::Hypothesis, "symbol " + symbol.name + " declares no limit q");
  return *symbol.limit_q;
}

void require_births(const std::vector<int>& births, int cell_level, int m) {
  if (births.empty()) throw Error(ErrorKind::Domain, "empty generation range");
  for (int j : births) {
    if (j > m)
      throw Error(ErrorKind::Window, "generation " + std::to_string(j) + " is not resolvable at level " +
                                         std::to_string(m));
    if (j <= cell_level)
      throw Error(ErrorKind::Domain, "generation " + std::to_string(j) + " must exceed N = " +
                                         std::to_string(cell_level));
  }
}

void require_grid(const std::vector<double>& grid, int m) {
  if (grid.empty()) throw Error(ErrorKind::Domain, "empty cutoff grid");
  const double window = resolvable_window(m);
  for (double cutoff : grid)
    if (cutoff >= window) {
      std::ostringstream os;
      os.precision(17);
      os << "cutoff " << cutoff << " is beyond the level-" << m << " window " << window;
      throw Error(ErrorKind::Window, os.str());
    }
}

Eigenbasis series_basis(const LevelSpectrum& spectrum, int series, int birth, int cell_level) {
  const auto& bundle = spectrum.bundle(series_key(series, birth));
  if (cell_level < 1) return basis_from_bundle(bundle);
  return basis_from_split(localized_split(bundle, cell_level, spectrum.level));
}

void split_mass(const Eigenbasis& basis, int generation, ConvergenceSample& s) {
  s.head_mass = 0;
  for (const auto& m : basis.meta)
    if (m.birth <= generation) ++s.head_mass;
  s.tail_mass = s.d - s.head_mass;
}

void require_positive(const SymbolSpec& symbol, const Eigenbasis& basis, const VertexSet& v) {
  if (!symbol.lower_bound || !(*symbol.lower_bound > 0.0))
    throw Error(ErrorKind::Domain, "log det needs a declared lower bound C > 0 for " + symbol.name);
  std::vector<double> lambdas;
  for (const auto& m : basis.meta)
    if (lambdas.empty() || lambdas.back() != m.lambda) lambdas.push_back(m.lambda);
  for (double lambda : lambdas) {
    const double lo = symbol.sampled_min(v, lambda);
    if (lo < *symbol.lower_bound) {
      std::ostringstream os;
      os.precision(17);
      os << "symbol " << symbol.name << " takes the value " << lo << " below C = " << *symbol.lower_bound
         << " at lambda = " << lambda;
      throw Error(ErrorKind::Domain, os.str());
    }
  }
}

ConvergenceReport make_report(std::string experiment, const SymbolSpec& symbol, std::string function,
                              const LevelSpectrum& spectrum, int cell_level, int generation,
                              const TargetIntegral& target) {
  ConvergenceReport r;
  r.experiment = std::move(experiment);
  r.symbol = symbol.name;
  r.function = std::move(function);
  r.level = spectrum.m();
  r.cell_level = cell_level;
  r.generation = generation > 0 ? generation : default_generation(spectrum.m());
  r.target = target.value;
  r.target_tolerance = target.tolerance;
  return r;
}

}  // namespace

void ConvergenceReport::recompute_errors() {
  for (auto& s : samples) s.abs_error = std::abs(s.value - target);
}

bool ConvergenceReport::monotone() const {
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].abs_error > samples[i - 1].abs_error) return false;
  return true;
}

bool ConvergenceReport::last_is_smallest() const {
  if (samples.empty()) return false;
  return std::all_of(samples.begin(), samples.end(),
                     [&](const ConvergenceSample& s) { return samples.back().abs_error <= s.abs_error; });
}

std::string ConvergenceReport::verdict() const {
  if (samples.empty()) return "no samples";
  std::ostringstream os;
  os.precision(6);
  os << (monotone() ? "monotone" : "not monotone") << ", last error " << samples.back().abs_error
     << (last_is_smallest() ? " (smallest)" : "");
  return os.str();
}

TargetIntegral integrate_composed(const SpatialFunction& g, const ScalarFunction& F, double tol) {
  if (const auto* f = g.simple()) {
    double s = 0.0;
    for (double a : f->values) s += F(a);
    return {s / static_cast<double>(pow3(f->level)), 0.0, 0};
  }
  const Point a1{0.0, 0.0}, a2{1.0, 0.0}, a3{0.5, std::sqrt(3.0) / 2.0};
  double previous_rule = vertex_rule(g, F, a1, a2, a3, 0) ;
  double previous_extrapolant = NAN;
  for (int n = 1; n <= kMaxQuadratureLevel; ++n) {
    const double rule = vertex_rule(g, F, a1, a2, a3, n) / static_cast<double>(pow3(n));
    const double extrapolant = (4.0 * rule - previous_rule) / 3.0;
    const double change = std::abs(extrapolant - previous_extrapolant);
    if (n >= 3 && change <= tol) return {extrapolant, change, n};
    previous_rule = rule;
    previous_extrapolant = extrapolant;
    if (n == kMaxQuadratureLevel && change <= 1e2 * tol) return {extrapolant, change, n};
  }
  throw Error(ErrorKind::Convergence, "integral of " + F.name + "(" + g.describe() +
                                          ") did not stabilize by level " + std::to_string(kMaxQuadratureLevel));
}

std::string series_key(int series, int birth) {
  if (series == 6) return "6:" + std::to_string(birth) + ":+";
  if (series == 5) return "5:" + std::to_string(birth) + ":";
  throw Error(ErrorKind::Domain, "single-series experiments use the 5- or 6-series, got " + std::to_string(series));
}

double simple_function_bound(const SimpleFunction& f, int k, int series, int birth) {
  const auto c = localization_counts(series, birth, f.level);
  const double alpha = static_cast<double>(c.alpha_N);
  const double d = static_cast<double>(c.d_j);
  double abs_moment = 0.0;
  for (double a : f.values) abs_moment += std::pow(std::abs(a), k);
  abs_moment /= static_cast<double>(pow3(f.level));
  return alpha / d * abs_moment + std::pow(alpha, k) / d * std::pow(f.sup_norm(), k);
}

int default_generation(int m) { return (m + 1) / 2; }

std::vector<double> default_lambda_grid(int m) {
  const double window = resolvable_window(m);
  const double first = eigenvalue_limit(2, 1, "");
  std::vector<double> grid;
  for (double cutoff = first; cutoff < window; cutoff *= 5.0) grid.push_back(cutoff);
  return grid;
}

ConvergenceReport szego_trace_single_series(const SymbolSpec& symbol, const ScalarFunction& F, int series,
                                            const std::vector<int>& births, int cell_level,
                                            const LevelSpectrum& spectrum) {
  series_key(series, 1);
  require_births(births, cell_level, spectrum.m());
  const auto target = integrate_composed(require_limit(symbol), F);
  auto report = make_report("trace-single-series-" + std::to_string(series), symbol, F.name, spectrum,
                            cell_level, 0, target);
  const SimpleFunction* f = symbol.kind == SymbolKind::Multiplication ? symbol.spatial.simple() : nullptr;
  for (int j : births) {
    const auto basis = series_basis(spectrum, series, j, cell_level);
    const auto op = compress(symbol, basis, spectrum.level);
    ConvergenceSample s;
    s.index = j;
    s.d = static_cast<std::int64_t>(basis.size());
    s.value = trace_F(op, F) / static_cast<double>(s.d);
    split_mass(basis, report.generation, s);
    if (f && F.power && f->level >= 1 && f->level < j) s.bound = simple_function_bound(*f, *F.power, series, j);
    report.samples.push_back(s);
  }
  report.recompute_errors();
  return report;
}

ConvergenceReport szego_trace_full(const SymbolSpec& symbol, const ScalarFunction& F,
                                   const std::vector<double>& grid, const LevelSpectrum& spectrum,
                                   int generation) {
  require_grid(grid, spectrum.m());
  const auto target = integrate_composed(require_limit(symbol), F);
  auto report = make_report("trace-full", symbol, F.name, spectrum, 0, generation, target);
  const auto table = enumerate_spectrum(*std::max_element(grid.begin(), grid.end()));
  for (double cutoff : grid) {
    const auto basis = basis_up_to(spectrum.bundles, cutoff);
    ConvergenceSample s;
    s.index = cutoff;
    s.d = static_cast<std::int64_t>(basis.size());
    if (s.d != table.counting(cutoff))
      throw Error(ErrorKind::Mismatch, "basis dimension " + std::to_string(s.d) +
                                           " differs from the counting function " +
                                           std::to_string(table.counting(cutoff)));
    if (s.d == 0) throw Error(ErrorKind::Domain, "cutoff below the first eigenvalue");
    s.value = trace_F(compress(symbol, basis, spectrum.level), F) / static_cast<double>(s.d);
    split_mass(basis, report.generation, s);
    report.samples.push_back(s);
  }
  report.recompute_errors();
  return report;
}

ConvergenceReport szego_logdet_single_series(const SymbolSpec& symbol, int series, const std::vector<int>& births,
                                             int cell_level, const LevelSpectrum& spectrum) {
  series_key(series, 1);
  require_births(births, cell_level, spectrum.m());
  const auto target = integrate_composed(require_limit(symbol), ScalarFunction::log());
  auto report = make_report("logdet-single-series-" + std::to_string(series), symbol, "log det", spectrum,
                            cell_level, 0, target);
  for (int j : births) {
    const auto basis = series_basis(spectrum, series, j, cell_level);
    require_positive(symbol, basis, spectrum.level.vertices);
    ConvergenceSample s;
    s.index = j;
    s.d = static_cast<std::int64_t>(basis.size());
    s.value = log_det(compress(symbol, basis, spectrum.level)) / static_cast<double>(s.d);
    split_mass(basis, report.generation, s);
    report.samples.push_back(s);
  }
  report.recompute_errors();
  return report;
}

ConvergenceReport szego_logdet_full(const SymbolSpec& symbol, const std::vector<double>& grid,
                                    const LevelSpectrum& spectrum, int generation) {
  require_grid(grid, spectrum.m());
  const auto target = integrate_composed(require_limit(symbol), ScalarFunction::log());
  auto report = make_report("logdet-full", symbol, "log det", spectrum, 0, generation, target);
  const auto table = enumerate_spectrum(*std::max_element(grid.begin(), grid.end()));
  for (double cutoff : grid) {
    const auto basis = basis_up_to(spectrum.bundles, cutoff);
    ConvergenceSample s;
    s.index = cutoff;
    s.d = static_cast<std::int64_t>(basis.size());
    if (s.d != table.counting(cutoff))
      throw Error(ErrorKind::Mismatch, "basis dimension " + std::to_string(s.d) +
                                           " differs from the counting function " +
                                           std::to_string(table.counting(cutoff)));
    if (s.d == 0) throw Error(ErrorKind::Domain, "cutoff below the first eigenvalue");
    require_positive(symbol, basis, spectrum.level.vertices);
    s.value = log_det(compress(symbol, basis, spectrum.level)) / static_cast<double>(s.d);
    split_mass(basis, report.generation, s);
    report.samples.push_back(s);
  }
  report.recompute_errors();
  return report;
}

SandwichCheck logdet_sandwich(const SymbolSpec& symbol, const SimpleFunction& f_N, double eps,
                              const Eigenbasis& basis, const GasketLevel& level) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "sandwich needs 0 < eps < 1");
  if (f_N.min() <= 0.0) throw Error(ErrorKind::Domain, "sandwich needs f_N > 0");
  SandwichCheck out;
  out.ratio_holds = true;
  const auto& v = level.vertices;
  for (const auto& m : basis.meta)
    for (std::size_t c = 0; c < v.cell_count(); ++c)
      for (auto vertex : v.cell_vertices[c]) {
        const auto cell = static_cast<std::int64_t>(c);
        const double ratio = symbol.at(v, cell, vertex, m.lambda) / f_N.on_cell(v.level, cell);
        if (!(ratio > 1.0 - eps && ratio < 1.0 + eps)) out.ratio_holds = false;
      }
  auto scaled = [&](double factor) {
    auto values = f_N.values;
    for (double& x : values) x *= factor;
    return multiplication_symbol(SimpleFunction(f_N.level, std::move(values)));
  };
  out.lower = log_det(compress(scaled(1.0 - eps), basis, level));
  out.value = log_det(compress(symbol, basis, level));
  out.upper = log_det(compress(scaled(1.0 + eps), basis, level));
  return out;
}

}  // namespace gasket

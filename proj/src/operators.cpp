#include "gasket/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "gasket/eigensolver.hpp"
#include "gasket/error.hpp"

namespace gasket {
namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

const SimpleFunction& tabulated_at(const std::vector<std::pair<double, SimpleFunction>>& table,
                                   double lambda) {
  for (const auto& [value, f] : table)
    if (std::abs(value - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda))) return f;
  throw Error(ErrorKind::Domain, "tabulated symbol has no entry for lambda = " + format_number(lambda));
}

template <class Reduce>
double reduce_symbol(const SymbolSpec& s, const VertexSet& v, double lambda, double init, Reduce op) {
  double acc = init;
  for (std::size_t c = 0; c < v.cell_count(); ++c)
    for (auto vertex : v.cell_vertices[c]) acc = op(acc, s.at(v, static_cast<std::int64_t>(c), vertex, lambda));
  return acc;
}

}  // namespace

// ----------------------------------------------------------- scalar functions

ScalarFunction ScalarFunction::identity() {
  return {[](double x) { return x; }, "identity", 1, std::nullopt};
}

ScalarFunction ScalarFunction::monomial(int k) {
  const std::string name = "power:" + std::to_string(k);
  if (k < 0)
    return {[k](double x) { return std::pow(x, k); }, name, std::nullopt,
            std::pair{0.0, std::numeric_limits<double>::infinity()}};
  return {[k](double x) { return std::pow(x, k); }, name, k, std::nullopt};
}

ScalarFunction ScalarFunction::log() {
  return {[](double x) { return std::log(x); }, "log", std::nullopt,
          std::pair{0.0, std::numeric_limits<double>::infinity()}};
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients) {
  std::string name = "poly:";
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    name += (i ? "," : "") + format_number(coefficients[i]);
  auto fn = [c = std::move(coefficients)](double x) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
    return s;
  };
  return {fn, name, std::nullopt, std::nullopt};
}

ScalarFunction ScalarFunction::constant(double c) {
  return {[c](double) { return c; }, "constant:" + format_number(c), std::nullopt, std::nullopt};
}

ScalarFunction ScalarFunction::parse(const std::string& d) {
  if (d == "identity") return identity();
  if (d == "log") return log();
  const auto colon = d.find(':');
  if (colon != std::string::npos) {
    const std::string head = d.substr(0, colon);
    const std::string tail = d.substr(colon + 1);
    try {
      if (head == "power") {
        std::size_t used = 0;
        const int k = std::stoi(tail, &used);
        if (used == tail.size()) return monomial(k);
      } else if (head == "poly" || head == "polynomial") {
        std::vector<double> c;
        std::stringstream ss(tail);
        std::string item;
        while (std::getline(ss, item, ',')) c.push_back(std::stod(item));
        if (!c.empty()) return polynomial(std::move(c));
      }
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorKind::Schema, "unknown function descriptor '" + d + "'");
}

// -------------------------------------------------------------------- symbols

std::string to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::ConstantCoefficient: return "constant-coefficient";
    case SymbolKind::Multiplication: return "multiplication";
    case SymbolKind::Separable: return "separable";
    case SymbolKind::Tabulated: return "tabulated";
  }
  return "?";
}

double SymbolSpec::at(const VertexSet& v, std::int64_t cell, std::size_t vertex, double lambda) const {
  switch (kind) {
    case SymbolKind::ConstantCoefficient: return of_lambda(lambda);
    case SymbolKind::Multiplication: return spatial.at(v, cell, vertex);
    case SymbolKind::Separable: return of_lambda(lambda) + spatial.at(v, cell, vertex);
    case SymbolKind::Tabulated: return tabulated_at(table, lambda).on_cell(v.level, cell);
  }
  return 0.0;
}

std::optional<double> SymbolSpec::constant_on(const CellAddress& cell, double lambda) const {
  switch (kind) {
    case SymbolKind::ConstantCoefficient: return of_lambda(lambda);
    case SymbolKind::Multiplication: return spatial.constant_on(cell);
    case SymbolKind::Separable:
      if (auto c = spatial.constant_on(cell)) return *c + of_lambda(lambda);
      return std::nullopt;
    case SymbolKind::Tabulated: {
      for (const auto& [value, f] : table)
        if (f.level > cell.level()) return std::nullopt;
      return SpatialFunction(tabulated_at(table, lambda)).constant_on(cell);
    }
  }
  return std::nullopt;
}

std::vector<double> SymbolSpec::weighted_diagonal(const GasketLevel& level, double lambda) const {
  const auto& v = level.vertices;
  switch (kind) {
    case SymbolKind::ConstantCoefficient: {
      auto d = level.measure.interior_weights(v);
      const double p = of_lambda(lambda);
      for (double& x : d) x *= p;
      return d;
    }
    case SymbolKind::Multiplication: return spatial.weighted_diagonal(v, level.measure);
    case SymbolKind::Separable: {
      auto d = spatial.weighted_diagonal(v, level.measure);
      const auto w = level.measure.interior_weights(v);
      const double q = of_lambda(lambda);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += q * w[i];
      return d;
    }
    case SymbolKind::Tabulated:
      return SpatialFunction(tabulated_at(table, lambda)).weighted_diagonal(v, level.measure);
  }
  return {};
}

double SymbolSpec::sampled_min(const VertexSet& v, double lambda) const {
  return reduce_symbol(*this, v, lambda, INFINITY, [](double a, double b) { return std::min(a, b); });
}

double SymbolSpec::sampled_max(const VertexSet& v, double lambda) const {
  return reduce_symbol(*this, v, lambda, -INFINITY, [](double a, double b) { return std::max(a, b); });
}

double SymbolSpec::distance_to_limit(const VertexSet& v, double lambda) const {
  if (!limit_q) throw Error(ErrorKind::Domain, "symbol " + name + " declares no limit");
  double worst = 0.0;
  for (std::size_t c = 0; c < v.cell_count(); ++c)
    for (auto vertex : v.cell_vertices[c]) {
      const auto cell = static_cast<std::int64_t>(c);
      worst = std::max(worst, std::abs(at(v, cell, vertex, lambda) - limit_q->at(v, cell, vertex)));
    }
  return worst;
}

SymbolSpec riesz_symbol(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Domain, "Riesz exponent must be positive, got " + format_number(beta));
  SymbolSpec s;
  s.kind = SymbolKind::ConstantCoefficient;
  s.name = "riesz(beta=" + format_number(beta) + ")";
  s.of_lambda = {[beta](double x) { return 1.0 + std::pow(x, -beta); }, s.name, std::nullopt, std::nullopt};
  s.limit_q = SpatialFunction(SimpleFunction::constant(1.0));
  s.lower_bound = 1.0;
  return s;
}

SymbolSpec bessel_symbol(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::Domain, "Bessel exponent must be positive, got " + format_number(beta));
  SymbolSpec s;
  s.kind = SymbolKind::ConstantCoefficient;
  s.name = "bessel(beta=" + format_number(beta) + ")";
  s.of_lambda = {[beta](double x) { return 1.0 + std::pow(1.0 + x, -beta); }, s.name, std::nullopt,
                 std::nullopt};
  s.limit_q = SpatialFunction(SimpleFunction::constant(1.0));
  s.lower_bound = 1.0;
  return s;
}

SymbolSpec constant_coefficient_symbol(ScalarFunction p) {
  SymbolSpec s;
  s.kind = SymbolKind::ConstantCoefficient;
  s.name = "p(lambda)=" + p.name;
  s.of_lambda = std::move(p);
  return s;
}

SymbolSpec multiplication_symbol(SpatialFunction f) {
  SymbolSpec s;
  s.kind = SymbolKind::Multiplication;
  s.name = "multiplication(" + f.describe() + ")";
  s.spatial = f;
  s.limit_q = f;
  if (const auto* simple = f.simple()) s.lower_bound = simple->min();
  return s;
}

SymbolSpec constant_symbol(double c) {
  auto s = multiplication_symbol(SimpleFunction::constant(c));
  s.name = "constant(" + format_number(c) + ")";
  return s;
}

SymbolSpec separable_symbol(ScalarFunction q, double l, SpatialFunction chi) {
  SymbolSpec s;
  s.kind = SymbolKind::Separable;
  s.name = "separable(q=" + q.name + ", l=" + format_number(l) + ", chi=" + chi.describe() + ")";
  s.of_lambda = std::move(q);
  if (const auto* simple = chi.simple()) {
    auto values = simple->values;
    for (double& x : values) x += l;
    s.limit_q = SpatialFunction(SimpleFunction(simple->level, std::move(values)));
  } else {
    s.limit_q = SpatialFunction([chi, l](Point p) { return l + chi.at_point(p); },
                                format_number(l) + "+" + chi.describe());
  }
  s.spatial = std::move(chi);
  return s;
}

SymbolSpec tabulated_symbol(std::vector<std::pair<double, SimpleFunction>> table) {
  if (table.empty()) throw Error(ErrorKind::Domain, "tabulated symbol needs at least one entry");
  std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SymbolSpec s;
  s.kind = SymbolKind::Tabulated;
  s.name = "tabulated(" + std::to_string(table.size()) + " eigenvalues)";
  s.table = std::move(table);
  return s;
}

SymbolSpec make_symbol(const SymbolParams& p) {
  SymbolSpec s;
  if (p.kind == "riesz") {
    s = riesz_symbol(p.beta);
  } else if (p.kind == "bessel") {
    s = bessel_symbol(p.beta);
  } else if (p.kind == "constant") {
    s = constant_symbol(p.c);
  } else if (p.kind == "multiplication") {
    s = multiplication_symbol(p.f);
  } else if (p.kind == "separable") {
    s = separable_symbol(p.q, p.l, p.f);
  } else if (p.kind == "constant-coefficient") {
    s = constant_coefficient_symbol(p.q);
  } else {
    throw Error(ErrorKind::Schema, "unknown symbol kind '" + p.kind + "'");
  }
  if (p.lower_bound) s.lower_bound = p.lower_bound;
  return s;
}

SymbolDiagnostics check_symbol(const SymbolSpec& symbol, const VertexSet& v,
                               const std::vector<double>& lambdas) {
  SymbolDiagnostics d;
  d.min_value = INFINITY;
  d.max_value = -INFINITY;
  for (double lambda : lambdas) {
    const double lo = symbol.sampled_min(v, lambda);
    d.min_value = std::min(d.min_value, lo);
    d.max_value = std::max(d.max_value, symbol.sampled_max(v, lambda));
    if (symbol.lower_bound && lo < *symbol.lower_bound)
      throw Error(ErrorKind::Hypothesis, "symbol " + symbol.name + " drops to " + format_number(lo) +
                                             " below its declared bound " +
                                             format_number(*symbol.lower_bound) + " at lambda = " +
                                             format_number(lambda));
    if (symbol.limit_q) {
      const double dist = symbol.distance_to_limit(v, lambda);
      if (!d.limit_distances.empty() && dist > d.limit_distances.back()) d.limit_trend_nonincreasing = false;
      d.limit_distances.push_back(dist);
    }
  }
  return d;
}

// ---------------------------------------------------------------- compression

CompressedOperator compress(const SymbolSpec& symbol, const Eigenbasis& basis, const GasketLevel& level) {
  if (basis.level != level.level())
    throw Error(ErrorKind::Structural, "basis lives on level " + std::to_string(basis.level) +
                                           ", geometry on level " + std::to_string(level.level()));
  const std::size_t d = basis.size();
  const std::size_t n = basis.vectors.rows();
  CompressedOperator op;
  op.level = basis.level;
  op.basis = basis.meta;
  op.symbol = symbol.name;
  op.matrix = Matrix(d, d);
  for (const auto& m : basis.meta) op.lambda_assignment.push_back(m.lambda);
  if (d == 0) return op;

  // Columns grouped by the eigenvalue whose symbol slice acts on them.
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t b = 0; b < d; ++b)
    groups[symbol.depends_on_lambda() ? basis.meta[b].lambda : 0.0].push_back(b);
  for (const auto& [lambda, cols] : groups) {
    const auto diag = symbol.weighted_diagonal(level, lambda);
    Matrix ub(n, cols.size());
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < cols.size(); ++k) ub(r, k) = basis.vectors(r, cols[k]);
    const auto block = kernels::weighted_gram(basis.vectors, diag, ub);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t k = 0; k < cols.size(); ++k) op.matrix(a, cols[k]) = block(a, k);
  }
  op.asymmetry = asymmetry(op.matrix);
  symmetrize(op.matrix);

  for (std::size_t a = 0; a < d; ++a) {
    const auto c = symbol.constant_on(basis.meta[a].support, basis.meta[a].lambda);
    if (!c) continue;
    for (std::size_t b = 0; b < d; ++b) {
      op.matrix(a, b) = 0.0;
      op.matrix(b, a) = 0.0;
    }
    op.matrix(a, a) = *c;
    ++op.exact_rows;
  }
  return op;
}

// ---------------------------------------------------------- functional calculus

double power_trace(const Matrix& a, int k) {
  if (k < 0) throw Error(ErrorKind::Domain, "power must be nonnegative");
  if (k == 0) return static_cast<double>(a.rows());
  if (k == 1) return trace(a);
  // Tr(A^k) = <A^h, A^(k-h)> for symmetric A, h = floor(k/2).
  const int h = k / 2;
  Matrix low = a;
  for (int i = 1; i < h; ++i) low = kernels::multiply(low, a);
  Matrix high = (k - h == h) ? low : kernels::multiply(low, a);
  double s = 0.0;
  for (std::size_t i = 0; i < low.data().size(); ++i) s += low.data()[i] * high.data()[i];
  return s;
}

double trace_F(const Matrix& a, const ScalarFunction& F) {
  const auto sigma = symmetric_eigenvalues(a);
  if (F.domain) {
    const auto [lo, hi] = *F.domain;
    for (double s : sigma)
      if (s < lo || s > hi)
        throw Error(ErrorKind::Hypothesis, "eigenvalue " + format_number(s) + " outside the domain [" +
                                               format_number(lo) + ", " + format_number(hi) + "] of " +
                                               F.name);
  }
  double total = 0.0;
  for (double s : sigma) total += F(s);
  if (F.power) {
    const int k = *F.power;
    double scale = 0.0;
    for (double s : sigma) scale += std::pow(std::abs(s), k);
    const double direct = power_trace(a, k);
    if (std::abs(direct - total) > 1e-8 * scale + 1e-300)
      throw Error(ErrorKind::Numeric, "power trace " + format_number(direct) +
                                          " disagrees with the spectral sum " + format_number(total));
  }
  return total;
}

double trace_F(const CompressedOperator& op, const ScalarFunction& F) { return trace_F(op.matrix, F); }

double log_det(const Matrix& a) {
  const auto sigma = symmetric_eigenvalues(a);
  double total = 0.0;
  for (double s : sigma) {
    if (!(s > 0.0))
      throw Error(ErrorKind::Domain, "operator is not positive definite: eigenvalue " + format_number(s));
    total += std::log(s);
  }
  return total;
}

double log_det(const CompressedOperator& op) { return log_det(op.matrix); }

std::vector<double> operator_spectrum(const CompressedOperator& op) {
  return symmetric_eigenvalues(op.matrix);
}

SpectralBounds spectral_bounds(const SymbolSpec& symbol, const SpectrumTable& table,
                               const LevelSpectrum& spectrum, double epsilon) {
  if (!symbol.limit_q) throw Error(ErrorKind::Domain, "spectral bounds need a declared limit");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Domain, "epsilon must be positive");
  if (table.records.empty()) throw Error(ErrorKind::Domain, "empty spectrum table");
  const auto& v = spectrum.level.vertices;

  std::size_t first_good = 0;
  for (std::size_t i = 0; i < table.records.size(); ++i)
    if (symbol.distance_to_limit(v, table.records[i].value) >= epsilon) first_good = i + 1;
  if (first_good == table.records.size())
    throw Error(ErrorKind::Convergence, "symbol " + symbol.name + " stays " + format_number(epsilon) +
                                            "-far from its limit up to lambda = " +
                                            format_number(table.records.back().value));

  SpectralBounds out;
  out.epsilon = epsilon;
  out.lambda_bar = table.records[first_good].value;
  if (out.lambda_bar >= resolvable_window(spectrum.m()))
    throw Error(ErrorKind::Window, "Lambda_bar = " + format_number(out.lambda_bar) +
                                       " is beyond the level-" + std::to_string(spectrum.m()) + " window");
  out.A = symbol.limit_q->sampled_min(v) - epsilon;
  out.B = symbol.limit_q->sampled_max(v) + epsilon;
  const auto head = compress(symbol, basis_up_to(spectrum.bundles, out.lambda_bar), spectrum.level);
  for (double s : operator_spectrum(head)) {
    out.A = std::min(out.A, s);
    out.B = std::max(out.B, s);
  }
  return out;
}

std::vector<double> spectrum_map(const ScalarFunction& p, const SpectrumTable& table) {
  std::vector<double> out;
  for (const auto& r : table.records)
    out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), p(r.value));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gasket

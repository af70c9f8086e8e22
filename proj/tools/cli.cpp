#include "gasket/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "gasket/clusters.hpp"
#include "gasket/error.hpp"
#include "gasket/io.hpp"

namespace gasket::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void schema(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::Schema, "field '" + field + "': " + message);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void allow_only(const json& obj, const std::string& path, const std::set<std::string>& keys) {
  if (!obj.is_object()) schema(path.empty() ? "config" : path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!keys.count(key)) schema(join(path, key), "unknown field");
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) schema(field, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) schema(field, "expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) schema(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) schema(field, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

template <class T, class Fn>
T guarded(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    schema(field, e.what());
  }
}

SimpleFunction parse_simple(const json& v, const std::string& path) {
  allow_only(v, path, {"level", "values"});
  const auto* level = find(v, "level");
  const auto* values = find(v, "values");
  if (!level) schema(join(path, "level"), "required");
  if (!values) schema(join(path, "values"), "required");
  const int n = integer(*level, join(path, "level"));
  auto vals = numbers(*values, join(path, "values"));
  return guarded<SimpleFunction>(path, [&] { return SimpleFunction(n, std::move(vals)); });
}

/// {"simple":{level,values}}, {"constant":c}, {"coordinate":"x"|"y"} or {"indicator":"12"}.
SpatialFunction parse_spatial(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1)
    schema(path, "expected exactly one of simple, constant, coordinate, indicator");
  const auto& [key, body] = *v.items().begin();
  const std::string field = join(path, key);
  if (key == "simple") return parse_simple(body, field);
  if (key == "constant") return SimpleFunction::constant(number(body, field));
  if (key == "coordinate") {
    const auto axis = text(body, field);
    if (axis == "x") return coordinate_function(0);
    if (axis == "y") return coordinate_function(1);
    schema(field, "expected \"x\" or \"y\"");
  }
  if (key == "indicator") {
    const auto word = text(body, field);
    return guarded<SimpleFunction>(field, [&] { return SimpleFunction::indicator(CellAddress::parse(word)); });
  }
  schema(field, "unknown function kind");
}

/// Descriptor string (identity, log, power:k, poly:c0,c1,...) or {"poly":[...]}.
ScalarFunction parse_scalar(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto d = v.get<std::string>();
    return guarded<ScalarFunction>(path, [&] { return ScalarFunction::parse(d); });
  }
  if (v.is_object() && v.size() == 1 && v.contains("poly"))
    return ScalarFunction::polynomial(numbers(v["poly"], join(path, "poly")));
  schema(path, "expected a function descriptor");
}

SymbolSpec parse_symbol(const json& v, const std::string& path) {
  if (!v.is_object()) schema(path, "expected an object");
  const auto* kind = find(v, "kind");
  if (!kind) schema(join(path, "kind"), "required");
  SymbolParams params;
  params.kind = text(*kind, join(path, "kind"));
  std::set<std::string> keys = {"kind", "lower_bound"};
  if (params.kind == "riesz" || params.kind == "bessel") {
    keys.insert("beta");
  } else if (params.kind == "constant") {
    keys.insert("c");
  } else if (params.kind == "multiplication") {
    keys.insert("f");
  } else if (params.kind == "separable") {
    keys.insert({"q", "q_scale", "l", "chi"});
  } else if (params.kind == "constant-coefficient") {
    keys.insert("p");
  } else {
    schema(join(path, "kind"), "unknown symbol kind '" + params.kind + "'");
  }
  allow_only(v, path, keys);
  if (const auto* x = find(v, "beta")) params.beta = number(*x, join(path, "beta"));
  if (const auto* x = find(v, "c")) params.c = number(*x, join(path, "c"));
  if (const auto* x = find(v, "l")) params.l = number(*x, join(path, "l"));
  if (const auto* x = find(v, "lower_bound")) params.lower_bound = number(*x, join(path, "lower_bound"));
  auto need = [&](const char* key) -> const json& {
    const auto* x = find(v, key);
    if (!x) schema(join(path, key), "required");
    return *x;
  };
  if (params.kind == "multiplication") params.f = parse_spatial(need("f"), join(path, "f"));
  if (params.kind == "separable") {
    params.f = parse_spatial(need("chi"), join(path, "chi"));
    params.q = parse_scalar(need("q"), join(path, "q"));
    if (const auto* x = find(v, "q_scale")) {
      const double s = number(*x, join(path, "q_scale"));
      params.q = {[f = params.q.fn, s](double t) { return s * f(t); },
                  s == 1.0 ? params.q.name : io::format_real(s) + "*" + params.q.name, std::nullopt,
                  params.q.domain};
    }
  }
  if (params.kind == "constant-coefficient") params.q = parse_scalar(need("p"), join(path, "p"));
  return guarded<SymbolSpec>(path, [&] { return make_symbol(params); });
}

struct Tolerances {
  double cluster_slack = kClusterSlack;
  double oracle_relative = 1e-8;
  double rotation = 1e-10;
};

struct Sandwich {
  SimpleFunction f;
  double epsilon = 0.0;
};

struct RunConfig {
  std::string command;
  std::optional<int> level;
  std::optional<double> cutoff;
  std::optional<std::pair<int, int>> j_range;
  int series = 6;
  int cell_level = 0;
  std::optional<std::vector<double>> cutoffs;
  int generation = 0;
  std::optional<SymbolSpec> symbol;
  ScalarFunction function = ScalarFunction::identity();
  std::optional<SpatialFunction> potential;
  ScalarFunction p = ScalarFunction::identity();
  int moments = 4;
  std::vector<std::string> bundles;
  bool dump = false;
  Tolerances tol;
  std::uint64_t seed = 0;
  std::optional<Sandwich> sandwich;

  int m() const { return *level; }
};

RunConfig parse_config(const std::string& command, const json& j) {
  allow_only(j, "", {"command", "level", "cutoff", "j_range", "series", "cell_level", "cutoffs", "generation",
                     "symbol", "function", "potential", "p", "moments", "bundles", "dump", "tolerances", "seed",
                     "sandwich"});
  RunConfig c;
  c.command = command;
  if (const auto* x = find(j, "command"))
    if (text(*x, "command") != command) schema("command", "config says '" + x->get<std::string>() +
                                                              "' but the command line says '" + command + "'");
  if (const auto* x = find(j, "level")) {
    const int m = integer(*x, "level");
    const int cap = command == "validate" ? 6 : kDenseLevelCap;
    if (m < 1 || m > cap) schema("level", "must lie in [1, " + std::to_string(cap) + "]");
    c.level = m;
  }
  if (const auto* x = find(j, "cutoff")) {
    c.cutoff = number(*x, "cutoff");
    if (!(*c.cutoff > 0)) schema("cutoff", "must be positive");
  }
  if (const auto* x = find(j, "j_range")) {
    if (!x->is_array() || x->size() != 2) schema("j_range", "expected [first, last]");
    c.j_range = std::pair{integer((*x)[0], "j_range[0]"), integer((*x)[1], "j_range[1]")};
    if (c.j_range->first < 1 || c.j_range->first > c.j_range->second) schema("j_range", "expected 1 <= first <= last");
  }
  if (const auto* x = find(j, "series")) {
    c.series = integer(*x, "series");
    if (c.series != 5 && c.series != 6) schema("series", "must be 5 or 6");
  }
  if (const auto* x = find(j, "cell_level")) {
    c.cell_level = integer(*x, "cell_level");
    if (c.cell_level < 0) schema("cell_level", "must be nonnegative");
  }
  if (const auto* x = find(j, "cutoffs")) c.cutoffs = numbers(*x, "cutoffs");
  if (const auto* x = find(j, "generation")) c.generation = integer(*x, "generation");
  if (const auto* x = find(j, "symbol")) c.symbol = parse_symbol(*x, "symbol");
  if (const auto* x = find(j, "function")) c.function = parse_scalar(*x, "function");
  if (const auto* x = find(j, "potential")) c.potential = parse_spatial(*x, "potential");
  if (const auto* x = find(j, "p")) c.p = parse_scalar(*x, "p");
  if (const auto* x = find(j, "moments")) {
    c.moments = integer(*x, "moments");
    if (c.moments < 0) schema("moments", "must be nonnegative");
  }
  if (const auto* x = find(j, "bundles")) {
    if (!x->is_array()) schema("bundles", "expected an array of record keys");
    for (std::size_t i = 0; i < x->size(); ++i)
      c.bundles.push_back(text((*x)[i], "bundles[" + std::to_string(i) + "]"));
  }
  if (const auto* x = find(j, "dump")) {
    if (!x->is_boolean()) schema("dump", "expected a boolean");
    c.dump = x->get<bool>();
  }
  if (const auto* x = find(j, "seed")) {
    if (!x->is_number_unsigned()) schema("seed", "expected a nonnegative integer");
    c.seed = x->get<std::uint64_t>();
  }
  if (const auto* x = find(j, "tolerances")) {
    allow_only(*x, "tolerances", {"cluster_slack", "oracle_relative", "rotation"});
    auto read = [&](const char* key, double& slot) {
      if (const auto* y = find(*x, key)) {
        slot = number(*y, join("tolerances", key));
        if (!(slot > 0)) schema(join("tolerances", key), "must be positive");
      }
    };
    read("cluster_slack", c.tol.cluster_slack);
    read("oracle_relative", c.tol.oracle_relative);
    read("rotation", c.tol.rotation);
  }
  if (const auto* x = find(j, "sandwich")) {
    allow_only(*x, "sandwich", {"f", "epsilon"});
    if (!x->contains("f")) schema("sandwich.f", "required");
    if (!x->contains("epsilon")) schema("sandwich.epsilon", "required");
    c.sandwich = Sandwich{parse_simple((*x)["f"], "sandwich.f"), number((*x)["epsilon"], "sandwich.epsilon")};
  }

  auto require = [&](bool ok, const char* field) {
    if (!ok) schema(field, "required by " + command);
  };
  if (command == "spectrum") {
    if (!c.level && !c.cutoff) schema("cutoff", "spectrum needs a cutoff or a level");
  } else {
    require(c.level.has_value(), "level");
  }
  if (command == "szego-trace" || command == "szego-det") require(c.symbol.has_value(), "symbol");
  if (command == "clusters") require(c.potential.has_value(), "potential");
  return c;
}

// ------------------------------------------------------------------ runner

class Run {
 public:
  Run(RunConfig config, fs::path out, bool plot, std::ostream& log)
      : c_(std::move(config)), out_(std::move(out)), plot_(plot), log_(log) {}

  void execute() {
    if (c_.command == "spectrum") spectrum();
    else if (c_.command == "basis") basis();
    else if (c_.command == "szego-trace") szego(false);
    else if (c_.command == "szego-det") szego(true);
    else if (c_.command == "clusters") clusters();
    else validate();
  }

  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }
  const std::vector<fs::path>& outputs() const { return outputs_; }

 private:
  template <class Fn>
  auto timed(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn();
    timings_.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return result;
  }

  fs::path output(const std::string& name) {
    outputs_.push_back(out_ / name);
    return outputs_.back();
  }

  const LevelSpectrum& level_spectrum() {
    if (!spectrum_) spectrum_ = timed("level_spectrum", [&] { return build_level_spectrum(c_.m()); });
    return *spectrum_;
  }

  std::vector<int> births() const {
    std::vector<int> out;
    for (int j = c_.j_range->first; j <= c_.j_range->second; ++j) out.push_back(j);
    return out;
  }

  void write_report(const ConvergenceReport& r, const std::string& stem) {
    io::write_report_csv(r, output(stem + ".csv"));
    io::write_json(output(stem + ".json"), io::report_json(r));
    if (plot_) io::write_report_svg(r, output(stem + ".svg"));
    log_ << r.experiment << ": " << r.samples.size() << " samples, verdict " << r.verdict() << "\n";
  }

  void spectrum() {
    const double cutoff = c_.cutoff ? *c_.cutoff : resolvable_window(c_.m());
    const auto table = timed("enumerate", [&] { return enumerate_spectrum(cutoff); });
    io::write_spectrum_csv(table, output("spectrum.csv"));
    log_ << "d_Lambda=" << table.dimension() << " records=" << table.records.size() << "\n";
  }

  void basis() {
    const auto& ls = level_spectrum();
    std::vector<const EigenspaceBundle*> chosen;
    if (c_.bundles.empty()) {
      for (const auto& b : ls.bundles) chosen.push_back(&b);
    } else {
      for (const auto& key : c_.bundles) chosen.push_back(&ls.bundle(key));
    }
    const auto w = ls.level.measure.interior_weights(ls.level.vertices);
    std::ofstream csv(output("bundles.csv"));
    csv << "record,series,birth,lambda,graph_value,dimension,orthonormality_defect\n";
    for (const auto* b : chosen)
      csv << b->record.key() << ',' << b->record.series << ',' << b->record.birth << ','
          << io::format_real(b->record.value) << ',' << io::format_real(b->graph_value) << ',' << b->dimension()
          << ',' << io::format_real(weighted_orthonormality_defect(b->vectors, w)) << '\n';
    csv.close();
    if (c_.cell_level > 0) {
      std::ofstream split(output("split.csv"));
      split << "record,cell_level,cells,per_cell_min,per_cell_max,m_j_N,nonlocalized,alpha_N\n";
      timed("localized_split", [&] {
        for (const auto* b : chosen) {
          if (b->record.series == 2 || c_.cell_level >= b->record.birth || c_.cell_level >= c_.m()) continue;
          const auto s = localized_split(*b, c_.cell_level, ls.level);
          const auto counts = localization_counts(b->record.series, b->record.birth, c_.cell_level);
          std::size_t lo = SIZE_MAX, hi = 0;
          for (const auto& [cell, v] : s.per_cell) {
            lo = std::min(lo, v.cols());
            hi = std::max(hi, v.cols());
          }
          if (s.per_cell.empty()) lo = 0;
          split << b->record.key() << ',' << c_.cell_level << ',' << s.per_cell.size() << ',' << lo << ',' << hi
                << ',' << counts.m_j_N << ',' << s.nonlocalized_count() << ',' << counts.alpha_N << '\n';
        }
        return 0;
      });
    }
    if (c_.dump)
      for (const auto* b : chosen) {
        std::string name = b->record.key();
        std::replace(name.begin(), name.end(), ':', '_');
        std::replace(name.begin(), name.end(), '+', 'p');
        std::replace(name.begin(), name.end(), '-', 'm');
        io::dump_bundle(*b, output("bundles/" + name + ".bin"));
      }
    log_ << "bundles=" << chosen.size() << "\n";
  }

  void szego(bool det) {
    const auto& ls = level_spectrum();
    const auto& symbol = *c_.symbol;
    ConvergenceReport r = timed(det ? "logdet" : "trace", [&] {
      if (c_.j_range)
        return det ? szego_logdet_single_series(symbol, c_.series, births(), c_.cell_level, ls)
                   : szego_trace_single_series(symbol, c_.function, c_.series, births(), c_.cell_level, ls);
      const auto grid = c_.cutoffs ? *c_.cutoffs : default_lambda_grid(c_.m());
      return det ? szego_logdet_full(symbol, grid, ls, c_.generation)
                 : szego_trace_full(symbol, c_.function, grid, ls, c_.generation);
    });
    write_report(r, det ? "logdet" : "trace");
    if (det && c_.sandwich) {
      const auto s = timed("sandwich", [&] {
        return logdet_sandwich(symbol, c_.sandwich->f, c_.sandwich->epsilon, basis_up_to(ls.bundles, INFINITY),
                               ls.level);
      });
      io::write_json(output("sandwich.json"), json{{"epsilon", c_.sandwich->epsilon},
                                                   {"ratio_holds", s.ratio_holds},
                                                   {"lower", s.lower},
                                                   {"value", s.value},
                                                   {"upper", s.upper},
                                                   {"ordered", s.ordered()}});
      log_ << "sandwich ordered=" << (s.ordered() ? "yes" : "no") << "\n";
    }
  }

  void clusters() {
    const auto& ls = level_spectrum();
    const auto& chi = *c_.potential;
    auto centers = family_centers(c_.p, c_.m());
    if (c_.j_range)
      centers.erase(std::remove_if(centers.begin(), centers.end(),
                                   [&](const ClusterCenter& x) {
                                     return x.j < c_.j_range->first || x.j > c_.j_range->second;
                                   }),
                    centers.end());
    if (centers.empty()) throw Error(ErrorKind::Window, "no family generation inside j_range and the window");
    const auto h = timed("schrodinger", [&] { return build_schrodinger(c_.p, chi, ls); });
    const auto scan = timed("clusters", [&] {
      return identify_clusters(h, centers, chi.sampled_min(ls.level.vertices), chi.sampled_max(ls.level.vertices),
                               c_.tol.cluster_slack);
    });
    io::write_cluster_csv(scan, output("clusters.csv"));
    std::vector<io::MomentRow> rows;
    std::vector<double> targets;
    for (int k = 0; k <= c_.moments; ++k)
      targets.push_back(k == 0 ? 1.0 : integrate_composed(chi, ScalarFunction::monomial(k)).value);
    for (const auto& psi : scan.clusters) {
      const auto m = cluster_moments(psi, c_.moments);
      for (int k = 0; k <= c_.moments; ++k)
        rows.push_back({psi.j, k, m[static_cast<std::size_t>(k)], targets[static_cast<std::size_t>(k)]});
    }
    io::write_moments_csv(rows, output("moments.csv"));
    write_report(weak_limit_report(scan, chi, c_.p, c_.function, c_.m()), "weak_limit");
    json summary = {{"threshold", scan.threshold}, {"outside", scan.outside}, {"total", scan.total}};
    summary["clusters"] = json::array();
    for (const auto& psi : scan.clusters)
      summary["clusters"].push_back({{"j", psi.j},
                                     {"center", psi.center},
                                     {"d", psi.d},
                                     {"count", psi.positions.size()},
                                     {"complete", psi.complete},
                                     {"window", {psi.window_lo, psi.window_hi}}});
    io::write_json(output("clusters.json"), summary);
    log_ << "clusters=" << scan.clusters.size() << " threshold j=" << scan.threshold << "\n";
  }

  struct Check {
    std::string check, subject, expected, observed;
    bool ok = false;
  };

  void validate() {
    const int m = c_.m();
    std::vector<Check> checks;
    auto n = [](auto x) { return std::to_string(x); };

    timed("oracle", [&] {
      for (int k = 1; k <= m; ++k) {
        const auto predicted = predicted_graph_spectrum(k);
        const auto dense = symmetric_eigenvalues(build_dirichlet_laplacian(k, false).matrix);
        const auto expected = (pow3(k + 1) - 3) / 2;
        checks.push_back({"oracle-count", "m=" + n(k), n(expected), n(dense.size()),
                          static_cast<std::int64_t>(dense.size()) == expected &&
                              predicted.size() == dense.size()});
        double worst = 0.0;
        for (std::size_t i = 0; i < std::min(dense.size(), predicted.size()); ++i)
          worst = std::max(worst, std::abs(dense[i] - predicted[i]) / std::max(1.0, std::abs(predicted[i])));
        checks.push_back({"oracle-relative", "m=" + n(k), io::format_real(c_.tol.oracle_relative),
                          io::format_real(worst), worst <= c_.tol.oracle_relative});
      }
      return 0;
    });

    const auto& ls = level_spectrum();
    timed("localization", [&] {
      for (const auto& b : ls.bundles) {
        const auto& r = b.record;
        if (r.series == 2 || r.birth >= m) continue;
        for (int N = 1; N < r.birth; ++N) {
          const auto counts = localization_counts(r.series, r.birth, N);
          const std::string subject = r.key() + " N=" + n(N);
          const std::string expected =
              n(counts.m_j_N) + "x" + n(pow3(N)) + "+" + n(counts.alpha_N) + "=" + n(counts.d_j);
          try {
            const auto s = localized_split(b, N, ls.level);
            bool ok = s.nonlocalized_count() == static_cast<std::size_t>(counts.alpha_N) &&
                      static_cast<std::int64_t>(b.dimension()) == counts.d_j;
            std::size_t hi = 0;
            for (const auto& [cell, v] : s.per_cell) {
              hi = std::max(hi, v.cols());
              ok = ok && static_cast<std::int64_t>(v.cols()) == counts.m_j_N;
            }
            if (counts.m_j_N > 0) ok = ok && static_cast<std::int64_t>(s.per_cell.size()) == pow3(N);
            checks.push_back({"localization", subject, expected,
                              n(hi) + "x" + n(s.per_cell.size()) + "+" + n(s.nonlocalized_count()) + "=" +
                                  n(b.dimension()),
                              ok});
          } catch (const Error& e) {
            checks.push_back({"localization", subject, expected, std::string(to_string(e.kind())), false});
          }
        }
      }
      return 0;
    });

    timed("block_exactness", [&] {
      const SimpleFunction f(1, {0.25, 0.5, 1.0});
      const auto symbol = multiplication_symbol(f);
      for (const auto& b : ls.bundles) {
        const auto& r = b.record;
        if (r.series == 2 || r.birth < 2 || m < 2) continue;
        const auto s = localized_split(b, 1, ls.level);
        const auto op = compress(symbol, basis_from_split(s), ls.level);
        checks.push_back({"exact-rows", r.key(), ">=" + n(s.localized_count()), n(op.exact_rows),
                          op.exact_rows >= s.localized_count()});
        if (r.branches != "+" && !(r.series == 5 && r.branches.empty())) continue;
        for (int k = 1; k <= 3; ++k) {
          const double value = power_trace(op.matrix, k) / static_cast<double>(op.dimension());
          const double gap = std::abs(value - integrate_simple(f, k));
          const double bound = simple_function_bound(f, k, r.series, r.birth);
          checks.push_back({"simple-bound", r.key() + " k=" + n(k), "<=" + io::format_real(bound),
                            io::format_real(gap), gap <= bound});
        }
      }
      return 0;
    });

    timed("rotation", [&] {
      if (m < 3) return 0;
      const SimpleFunction f(1, {0.25, 0.5, 1.0});
      const auto symbol = multiplication_symbol(f);
      const auto& b = ls.bundle(series_key(6, m - 1));
      const auto s = localized_split(b, 1, ls.level);
      const auto a = compress(symbol, basis_from_split(s), ls.level);
      const auto rot = compress(symbol, basis_from_split(rotate_nonlocalized(s, c_.seed)), ls.level);
      for (int k = 1; k <= 3; ++k) {
        const double diff = std::abs(power_trace(a.matrix, k) - power_trace(rot.matrix, k));
        const double tol = c_.tol.rotation * static_cast<double>(a.dimension());
        checks.push_back({"rotation-invariance", b.record.key() + " k=" + n(k) + " seed=" + std::to_string(c_.seed),
                          "<=" + io::format_real(tol), io::format_real(diff), diff <= tol});
      }
      return 0;
    });

    std::ofstream csv(output("validate.csv"));
    csv << "check,subject,expected,observed,status\n";
    std::size_t failed = 0;
    for (const auto& c : checks) {
      csv << c.check << ',' << c.subject << ',' << c.expected << ',' << c.observed << ',' << (c.ok ? "pass" : "FAIL")
          << '\n';
      failed += c.ok ? 0 : 1;
    }
    csv.close();
    log_ << "validate: " << checks.size() - failed << "/" << checks.size() << " checks pass\n";
    if (failed)
      throw Error(ErrorKind::Mismatch, std::to_string(failed) + " invariant checks failed, see validate.csv");
  }

  RunConfig c_;
  fs::path out_;
  bool plot_;
  std::ostream& log_;
  std::optional<LevelSpectrum> spectrum_;
  std::vector<std::pair<std::string, double>> timings_;
  std::vector<fs::path> outputs_;
};

}  // namespace

int run(const std::string& command, const std::string& config_text, const fs::path& out, bool plot,
        std::ostream& log, std::ostream& err) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    err << "schema error: field 'command': unknown command '" << command << "'\n";
    return kSchemaError;
  }
  json config;
  RunConfig parsed;
  try {
    config = json::parse(config_text);
    parsed = parse_config(command, config);
  } catch (const json::parse_error& e) {
    err << "schema error: field 'config': " << e.what() << "\n";
    return kSchemaError;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kSchemaError;
  }

  std::vector<fs::path> outputs;
  try {
    fs::create_directories(out);
    io::write_text(out / "config.json", config_text);
    outputs.push_back(out / "config.json");
    Run r(std::move(parsed), out, plot, log);
    std::exception_ptr failure;
    try {
      r.execute();
    } catch (...) {
      failure = std::current_exception();
    }
    outputs.insert(outputs.end(), r.outputs().begin(), r.outputs().end());
    outputs.erase(std::remove_if(outputs.begin(), outputs.end(), [](const fs::path& p) { return !fs::exists(p); }),
                  outputs.end());
    io::write_manifest(out, config, r.timings(), outputs);
    if (failure) std::rethrow_exception(failure);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::Schema ? kSchemaError : kModuleError;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kModuleError;
  }
  return kOk;
}

int main(int argc, char** argv) {
  CLI::App app{"Szego limit experiments on the Sierpinski gasket", "gasket-szego"};
  app.set_version_flag("--version", std::string(io::kVersion));
  std::string command, config_path, out_dir;
  bool plot = false;
  app.add_option("command", command, "spectrum | basis | szego-trace | szego-det | clusters | validate")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_flag("--plot", plot, "also write SVG plots of convergence reports");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchemaError;
  }

  if (const char* env = std::getenv("GASKET_SZEGO_THREADS")) {
    char* end = nullptr;
    const long threads = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || threads < 1) {
      std::cerr << "schema error: field 'GASKET_SZEGO_THREADS': expected a positive integer\n";
      return kSchemaError;
    }
    omp_set_num_threads(static_cast<int>(threads));
  }

  std::ifstream in(config_path, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  return run(command, text.str(), out_dir, plot, std::cout, std::cerr);
}

}  // namespace gasket::cli

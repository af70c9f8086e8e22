#include "gasket/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gasket/eigensolver.hpp"
#include "gasket/error.hpp"

namespace gasket {
namespace {

Matrix compressed_potential(const SpatialFunction& chi, const Eigenbasis& basis, const GasketLevel& level) {
  return compress(multiplication_symbol(chi), basis, level).matrix;
}

double sup_distance(const SpatialFunction& a, const SpatialFunction& b, const VertexSet& v) {
  double worst = 0.0;
  for (std::size_t c = 0; c < v.cell_count(); ++c)
    for (auto vertex : v.cell_vertices[c]) {
      const auto cell = static_cast<std::int64_t>(c);
      worst = std::max(worst, std::abs(a.at(v, cell, vertex) - b.at(v, cell, vertex)));
    }
  return worst;
}

}  // namespace

SchrodingerMatrix build_schrodinger(const ScalarFunction& p, const SpatialFunction& chi,
                                    const LevelSpectrum& spectrum) {
  SchrodingerMatrix h;
  h.level = spectrum.m();
  h.basis = basis_up_to(spectrum.bundles, INFINITY);
  h.p_name = p.name;
  h.chi_name = chi.describe();
  h.matrix = compressed_potential(chi, h.basis, spectrum.level);
  for (std::size_t i = 0; i < h.basis.size(); ++i) h.matrix(i, i) += p(h.basis.meta[i].lambda);
  return h;
}

std::vector<ClusterCenter> family_centers(const ScalarFunction& p, int m) {
  const double window = resolvable_window(m);
  std::vector<ClusterCenter> out;
  for (const auto& r : separated_sequence(m).records) {
    if (r.value >= window || !r.resolvable_at(m)) break;
    out.push_back({r.birth, r.value, p(r.value), r.multiplicity});
  }
  return out;
}

ClusterScan identify_clusters(const SchrodingerMatrix& h, const std::vector<ClusterCenter>& centers,
                              double chi_min, double chi_max, double slack) {
  if (centers.empty()) throw Error(ErrorKind::Domain, "no cluster centers");
  auto sorted = centers;
  std::sort(sorted.begin(), sorted.end(),
            [](const ClusterCenter& a, const ClusterCenter& b) { return a.center < b.center; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].center + chi_min - slack <= sorted[i - 1].center + chi_max + slack) {
      std::ostringstream os;
      os << "cluster windows of j=" << sorted[i - 1].j << " and j=" << sorted[i].j << " overlap";
      throw Error(ErrorKind::Separation, os.str());
    }

  const auto eig = solve_symmetric(h.matrix);
  ClusterScan scan;
  scan.total = static_cast<std::int64_t>(eig.values.size());
  // Each computed eigenvalue is within its residual of an exact one.
  scan.solver_error = max_residual(h.matrix, eig);
  std::int64_t inside = 0;
  for (const auto& c : centers) {
    ClusterMeasure psi;
    psi.j = c.j;
    psi.center = c.center;
    psi.d = c.d;
    psi.window_lo = c.center + chi_min - slack;
    psi.window_hi = c.center + chi_max + slack;
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < eig.values.size(); ++k)
      if (eig.values[k] >= psi.window_lo - scan.solver_error && eig.values[k] <= psi.window_hi + scan.solver_error)
        members.push_back(k);
    inside += static_cast<std::int64_t>(members.size());
    psi.complete = static_cast<std::int64_t>(members.size()) == c.d;
    psi.weight = members.empty() ? 0.0 : 1.0 / static_cast<double>(members.size());
    Matrix v(h.matrix.rows(), members.size());
    for (std::size_t i = 0; i < members.size(); ++i) v.set_column(i, eig.vectors.column(members[i]));
    Matrix shifted = h.matrix;
    for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= c.center;
    psi.local = kernels::gram(v, kernels::multiply(shifted, v));
    symmetrize(psi.local);
    // Ritz values of the cluster block: the dense solve is only accurate to
    // eps * ||H||, which the largest basis eigenvalue dominates.
    psi.positions = symmetric_eigenvalues(psi.local);
    scan.clusters.push_back(std::move(psi));
  }
  scan.outside = scan.total - inside;

  std::sort(scan.clusters.begin(), scan.clusters.end(),
            [](const ClusterMeasure& a, const ClusterMeasure& b) { return a.j < b.j; });
  const auto& last = scan.clusters.back();
  if (!last.complete) {
    std::ostringstream os;
    os << "cluster j=" << last.j << " holds " << last.positions.size() << " eigenvalues, expected " << last.d
       << " (deficit " << last.d - static_cast<std::int64_t>(last.positions.size()) << ")";
    throw Error(ErrorKind::ClusterCount, os.str());
  }
  scan.threshold = last.j;
  for (auto it = scan.clusters.rbegin(); it != scan.clusters.rend() && it->complete; ++it) scan.threshold = it->j;
  return scan;
}

double cluster_trace_moment(const ClusterMeasure& psi, int k) {
  if (psi.positions.empty()) return 0.0;
  return power_trace(psi.local, k) * psi.weight;
}

std::vector<double> cluster_moments(const ClusterMeasure& psi, int k_max) {
  if (k_max < 0) throw Error(ErrorKind::Domain, "k_max must be nonnegative");
  std::vector<double> out;
  for (int k = 0; k <= k_max; ++k) {
    double moment = 0.0, scale = 0.0;
    for (double x : psi.positions) {
      moment += psi.weight * std::pow(x, k);
      scale += psi.weight * std::pow(std::abs(x), k);
    }
    const double trace = cluster_trace_moment(psi, k);
    if (std::abs(trace - moment) > 1e-8 * scale + 1e-13) {
      std::ostringstream os;
      os.precision(17);
      os << "cluster j=" << psi.j << " moment " << k << ": atoms give " << moment << ", trace formula "
         << trace;
      throw Error(ErrorKind::Numeric, os.str());
    }
    out.push_back(moment);
  }
  return out;
}

ConvergenceReport weak_limit_check(const SpatialFunction& chi, const ScalarFunction& p, const std::vector<int>& births,
                                   const ScalarFunction& F, const LevelSpectrum& spectrum) {
  const auto& v = spectrum.level.vertices;
  const auto h = build_schrodinger(p, chi, spectrum);
  const auto all = family_centers(p, spectrum.m());
  std::vector<ClusterCenter> centers;
  for (int j : births) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const ClusterCenter& c) { return c.j == j; });
    if (it == all.end())
      throw Error(ErrorKind::Window, "generation " + std::to_string(j) + " of the family is outside the level-" +
                                         std::to_string(spectrum.m()) + " window");
    centers.push_back(*it);
  }
  return weak_limit_report(identify_clusters(h, centers, chi.sampled_min(v), chi.sampled_max(v)), chi, p, F,
                           spectrum.m());
}

ConvergenceReport weak_limit_report(const ClusterScan& scan, const SpatialFunction& chi, const ScalarFunction& p,
                                    const ScalarFunction& F, int m) {
  ConvergenceReport report;
  report.experiment = "cluster-weak-limit";
  report.symbol = "p=" + p.name + ", chi=" + chi.describe();
  report.function = F.name;
  report.level = m;
  report.generation = default_generation(m);
  const auto target = integrate_composed(chi, F);
  report.target = target.value;
  report.target_tolerance = target.tolerance;
  for (const auto& psi : scan.clusters) {
    ConvergenceSample s;
    s.index = psi.j;
    s.d = static_cast<std::int64_t>(psi.positions.size());
    for (double x : psi.positions) s.value += psi.weight * F(x);
    s.head_mass = psi.j <= report.generation ? s.d : 0;
    s.tail_mass = s.d - s.head_mass;
    report.samples.push_back(s);
  }
  report.recompute_errors();
  return report;
}

LipschitzResult lipschitz_check(const ScalarFunction& p, const SpatialFunction& chi1, const SpatialFunction& chi2,
                                const LevelSpectrum& spectrum) {
  LipschitzResult r;
  r.sup_distance = sup_distance(chi1, chi2, spectrum.level.vertices);
  const auto a = symmetric_eigenvalues(build_schrodinger(p, chi1, spectrum).matrix);
  const auto b = symmetric_eigenvalues(build_schrodinger(p, chi2, spectrum).matrix);
  for (std::size_t i = 0; i < a.size(); ++i) r.displacement = std::max(r.displacement, std::abs(a[i] - b[i]));
  if (r.displacement > r.sup_distance + 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "eigenvalue displacement " << r.displacement << " exceeds the potential distance " << r.sup_distance;
    throw Error(ErrorKind::Hypothesis, os.str());
  }
  return r;
}

SeparationReport separation_check(const ScalarFunction& p, const std::vector<double>& family, double c,
                                  double beta, double lambda_bar) {
  if (!std::is_sorted(family.begin(), family.end()))
    throw Error(ErrorKind::Domain, "the eigenvalue family must be sorted");
  for (double x : family)
    if (x < lambda_bar) throw Error(ErrorKind::Domain, "family member below lambda_bar");
  SeparationReport r;
  r.increasing = true;
  for (std::size_t i = 1; i < family.size(); ++i)
    if (!(p(family[i]) > p(family[i - 1]))) r.increasing = false;
  r.sharp_c = INFINITY;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t k = i + 1; k < family.size(); ++k) {
      const double gap = std::abs(family[k] - family[i]);
      if (gap == 0.0) continue;
      const double ratio = std::abs(p(family[k]) - p(family[i])) / std::pow(gap, beta);
      if (ratio < r.sharp_c) {
        r.sharp_c = ratio;
        r.worst_first = i;
        r.worst_second = k;
      }
    }
  r.holds = r.increasing && r.sharp_c >= c;
  return r;
}

}  // namespace gasket

#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "gasket/clusters.hpp"
#include "gasket/error.hpp"

using namespace gasket;

namespace {

const LevelSpectrum& level(int m) {
  static std::vector<std::unique_ptr<LevelSpectrum>> cache(8);
  if (!cache[m]) cache[m] = std::make_unique<LevelSpectrum>(build_level_spectrum(m));
  return *cache[m];
}

const ScalarFunction kZero = ScalarFunction::constant(0.0);

}  // namespace

TEST_CASE("Schrodinger matrix special cases") {
  const auto& ls = level(3);
  const auto p = ScalarFunction::identity();
  const auto h0 = build_schrodinger(p, SimpleFunction::constant(0.0), ls);
  for (std::size_t i = 0; i < h0.matrix.rows(); ++i)
    for (std::size_t j = 0; j < h0.matrix.cols(); ++j)
      CHECK(h0.matrix(i, j) == (i == j ? h0.basis.meta[i].lambda : 0.0));

  const SimpleFunction chi(1, {0.2, -0.3, 0.7});
  const auto hp = build_schrodinger(kZero, chi, ls);
  const auto direct = compress(multiplication_symbol(chi), h0.basis, ls.level);
  CHECK(hp.matrix == direct.matrix);

  const auto h = build_schrodinger(p, chi, ls);
  const auto sep = compress(separable_symbol(p, 0.0, chi), h0.basis, ls.level);
  CHECK(max_abs([&] {
          Matrix d = h.matrix;
          for (std::size_t i = 0; i < d.data().size(); ++i) d.data()[i] -= sep.matrix.data()[i];
          return d;
        }()) <= 1e-10);

  const auto sigma = symmetric_eigenvalues(h.matrix);
  CHECK(sigma.front() >= h0.basis.meta.front().lambda - 0.3 - 1e-9);
}

TEST_CASE("constant potential shifts every cluster exactly") {
  const auto& ls = level(4);
  const auto p = ScalarFunction::identity();
  const auto h = build_schrodinger(p, SimpleFunction::constant(0.25), ls);
  const auto scan = identify_clusters(h, family_centers(p, 4), 0.25, 0.25);
  for (const auto& psi : scan.clusters) {
    CHECK(psi.complete);
    for (double x : psi.positions) CHECK(std::abs(x - 0.25) <= 1e-12);
    const auto m = cluster_moments(psi, 3);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 1; k <= 3; ++k) CHECK(m[static_cast<std::size_t>(k)] == doctest::Approx(std::pow(0.25, k)));
  }
}

TEST_CASE("clusters of a simple potential") {
  const auto& ls = level(5);
  const auto p = ScalarFunction::identity();
  const SimpleFunction chi(1, {0.0, 0.4, 1.0});
  const auto h = build_schrodinger(p, chi, ls);
  const auto centers = family_centers(p, 5);
  REQUIRE(centers.size() >= 3);
  const auto scan = identify_clusters(h, centers, 0.0, 1.0);
  std::int64_t inside = 0;
  for (const auto& psi : scan.clusters) {
    CHECK(psi.complete);
    inside += static_cast<std::int64_t>(psi.positions.size());
    // Localized eigenfunctions sit exactly at the cell values.
    const auto counts = localization_counts(6, psi.j, 1);
    for (double a : chi.values) {
      std::int64_t hits = 0;
      for (double x : psi.positions)
        if (std::abs(x - a) <= 1e-10) ++hits;
      CHECK(hits >= counts.m_j_N);
    }
    cluster_moments(psi, 4);
  }
  CHECK(inside + scan.outside == scan.total);
  CHECK(scan.total == static_cast<std::int64_t>(ls.level.interior_size()));

  // Shifting the potential translates the atoms.
  const SimpleFunction shifted(1, {0.5, 0.9, 1.5});
  const auto scan2 = identify_clusters(build_schrodinger(p, shifted, ls), centers, 0.5, 1.5);
  for (std::size_t c = 0; c < scan.clusters.size(); ++c)
    for (std::size_t i = 0; i < scan.clusters[c].positions.size(); ++i)
      CHECK(std::abs(scan2.clusters[c].positions[i] - scan.clusters[c].positions[i] - 0.5) <= 1e-9);

  const auto report = weak_limit_check(chi, p, {2, 3, 4}, ScalarFunction::identity(), ls);
  CHECK(report.target == doctest::Approx(1.4 / 3.0));
  CHECK(report.samples.back().abs_error <= report.samples.front().abs_error);
}

TEST_CASE("overlapping windows are rejected") {
  const auto& ls = level(3);
  const auto p = ScalarFunction::identity();
  const auto h = build_schrodinger(p, SimpleFunction::constant(0.0), ls);
  std::vector<ClusterCenter> centers = {{2, 100.0, 100.0, 6}, {3, 101.0, 101.0, 12}};
  try {
    identify_clusters(h, centers, 0.0, 2.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Separation);
  }
}

TEST_CASE("Lipschitz bound for perturbed potentials") {
  const auto& ls = level(3);
  const auto p = ScalarFunction::identity();
  const SimpleFunction chi(2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  CHECK(lipschitz_check(p, chi, chi, ls).displacement == 0.0);
  auto plus = chi.values;
  for (double& x : plus) x += 0.3;
  const auto shift = lipschitz_check(p, chi, SimpleFunction(2, plus), ls);
  CHECK(std::abs(shift.displacement - 0.3) <= 1e-10);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto values = chi.values;
    for (double& x : values) x += 0.5 * unit(rng);
    const auto r = lipschitz_check(p, chi, SimpleFunction(2, values), ls);
    CHECK(r.displacement <= r.sup_distance + 1e-9);
  }
}

TEST_CASE("separation condition") {
  const auto family = [] {
    std::vector<double> f;
    for (const auto& r : separated_sequence(6).records) f.push_back(r.value);
    return f;
  }();
  const auto ident = separation_check(ScalarFunction::identity(), family, 1.0, 1.0, family.front());
  CHECK(ident.holds);
  CHECK(ident.sharp_c == doctest::Approx(1.0));
  CHECK_FALSE(separation_check(ScalarFunction::constant(2.0), family, 1e-6, 1.0, family.front()).holds);

  const ScalarFunction root{[](double x) { return std::sqrt(x); }, "sqrt", {}, {}};
  const auto r = separation_check(root, family, 0.1, 0.5, family.front());
  CHECK(r.holds);
  // Oracle: for a < b, (sqrt b - sqrt a)/sqrt(b - a) is smallest at the ratio-5 pairs,
  // (sqrt 5 - 1)/2.
  CHECK(r.sharp_c == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-9));
}

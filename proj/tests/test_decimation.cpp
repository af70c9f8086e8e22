#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "gasket/decimation.hpp"
#include "gasket/eigensolver.hpp"
#include "gasket/error.hpp"
#include "gasket/geometry.hpp"

using namespace gasket;

TEST_CASE("decimation preimages") {
  const auto [lo, hi] = decimation_preimages(2.0);
  CHECK(lo == doctest::Approx(0.4384471872).epsilon(1e-10));
  CHECK(hi == doctest::Approx(4.5615528128).epsilon(1e-10));
  CHECK(std::abs(decimate(lo) - 2.0) < 1e-12);
  CHECK(std::abs(decimate(hi) - 2.0) < 1e-12);

  const auto zero = decimation_preimages(0.0);
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 5.0);

  const auto dbl = decimation_preimages(6.25);
  CHECK(dbl.first == 2.5);
  CHECK(dbl.second == 2.5);

  try {
    decimation_preimages(6.3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("eigenvalue limits") {
  std::vector<double> graph;
  const double lambda1 = eigenvalue_limit(2, 1, "", 1e-12, Branch::Contracting, &graph);
  // Independent fixed-point iteration of the contracting root, 40 steps from 2.
  CHECK(lambda1 == doctest::Approx(16.815998889348393).epsilon(1e-11));
  CHECK(graph.size() <= 41);
  const double lambda5 = eigenvalue_limit(5, 1, "");
  CHECK(lambda5 > lambda1);

  // Stopping rule: the returned value agrees with the previous iterate.
  const auto r = make_record(5, 2, "+-+");
  const int last = r.birth + static_cast<int>(r.graph_values.size()) - 1;
  const double prev = renormalization(last - 1) * r.graph_values[r.graph_values.size() - 2];
  CHECK(std::abs(r.value - prev) < 1e-12 * r.value);

  try {
    eigenvalue_limit(2, 1, "", 1e-12, Branch::Expanding);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Convergence);
  }
  CHECK_THROWS_AS(eigenvalue_limit(6, 2, "-"), Error);
}

TEST_CASE("record invariants") {
  for (int j = 1; j <= 4; ++j) CHECK(series_multiplicity(5, j) == (pow3(j - 1) + 3) / 2);
  for (int j = 2; j <= 4; ++j) CHECK(series_multiplicity(6, j) == (pow3(j) - 3) / 2);
  CHECK(series_multiplicity(2, 1) == 1);
  CHECK_THROWS_AS(series_multiplicity(2, 2), Error);
  CHECK_THROWS_AS(series_multiplicity(6, 1), Error);

  for (const auto& lr : graph_records(5)) {
    const auto& r = lr.record;
    CHECK(r.graph_values.front() == r.series);
    for (std::size_t k = 1; k < r.graph_values.size(); ++k)
      CHECK(std::abs(decimate(r.graph_values[k]) - r.graph_values[k - 1]) < 1e-12);
    CHECK((r.branches.empty() || r.branches.back() == '+'));
    CHECK(r.resolvable_at(5));
  }
  CHECK(make_record(6, 3, "").branches == "+");
  CHECK(make_record(6, 3, "").value == make_record(6, 3, "+").value);
}

TEST_CASE("multiplicity sum equals the interior dimension") {
  for (int m = 1; m <= 7; ++m) {
    std::int64_t total = 0;
    for (const auto& lr : graph_records(m)) total += lr.record.multiplicity;
    CHECK(total == (pow3(m + 1) - 3) / 2);
  }
}

TEST_CASE("decimation matches the dense eigensolve") {
  for (int m = 1; m <= 5; ++m) {
    CAPTURE(m);
    const auto predicted = predicted_graph_spectrum(m);
    const auto dense = symmetric_eigenvalues(build_dirichlet_laplacian(m, false).matrix);
    REQUIRE(predicted.size() == dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i)
      CHECK(std::abs(predicted[i] - dense[i]) <= 1e-8 * std::max(1.0, std::abs(dense[i])));
  }
}

TEST_CASE("enumerate_spectrum edge cases") {
  const double lambda1 = make_record(2, 1, "").value;
  const auto empty = enumerate_spectrum(lambda1 * 0.99);
  CHECK(empty.records.empty());
  CHECK(empty.dimension() == 0);

  const auto one = enumerate_spectrum(lambda1);
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].series == 2);
  CHECK(one.records[0].multiplicity == 1);
  CHECK(one.dimension() == 1);

  CHECK_THROWS_AS(enumerate_spectrum(0.0), Error);
  EnumerationOptions tiny;
  tiny.record_cap = 3;
  try {
    enumerate_spectrum(1e5, tiny);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceLimit);
  }
}

TEST_CASE("enumerate_spectrum agrees with unpruned brute force") {
  const double cutoff = 2.0e4;
  // Every word up to length 8 for every admissible birth, no pruning.
  std::set<std::string> brute;
  for (int series : {2, 5, 6})
    for (int birth = (series == 6 ? 2 : 1); birth <= (series == 2 ? 1 : 7); ++birth)
      for (int len = 0; len <= 8; ++len)
        for (int bits = 0; bits < (1 << len); ++bits) {
          std::string w;
          for (int i = 0; i < len; ++i) w.push_back(((bits >> (len - 1 - i)) & 1) ? '+' : '-');
          if (!w.empty() && w.back() == '-') continue;
          if (series == 6 && (w.empty() || w.front() == '-')) continue;
          const auto r = make_record(series, birth, w);
          if (r.value <= cutoff) brute.insert(r.key());
        }
  const auto table = enumerate_spectrum(cutoff);
  std::set<std::string> fast;
  for (const auto& r : table.records) fast.insert(r.key());
  CHECK(fast == brute);
  CHECK(std::is_sorted(table.records.begin(), table.records.end()));
}

TEST_CASE("counting function is a nondecreasing right-continuous step function") {
  const auto table = enumerate_spectrum(5e4);
  std::int64_t prev = 0;
  for (double lam = 1.0; lam <= 5e4; lam *= 1.07) {
    const auto d = table.counting(lam);
    CHECK(d >= prev);
    prev = d;
  }
  for (const auto& r : table.records) {
    CHECK(table.counting(r.value) >= r.multiplicity);
    CHECK(table.counting(r.value) > table.counting(std::nextafter(r.value, 0.0)));
  }
}

TEST_CASE("localization counts") {
  const auto c = localization_counts(6, 4, 2);
  CHECK(c.d_j == 39);
  CHECK(c.d_j_N == 27);
  CHECK(c.m_j_N == 3);
  CHECK(c.alpha_N == 12);
  CHECK(c.d_j_N == 9 * c.m_j_N);

  const auto f = localization_counts(5, 3, 1);
  CHECK(f.d_j == 6);
  CHECK(f.d_j_N == 3);
  CHECK(f.m_j_N == 1);
  CHECK(f.alpha_N == 3);

  for (int series : {5, 6})
    for (int j = 2; j <= 12; ++j)
      for (int n = 1; n < j; ++n) {
        const auto k = localization_counts(series, j, n);
        CHECK(k.d_j == k.d_j_N + k.alpha_N);
        CHECK(k.d_j_N == pow3(n) * k.m_j_N);
        if (series == 6) CHECK(k.alpha_N == (pow3(n + 1) - 3) / 2);
        if (series == 5) CHECK(k.alpha_N == (pow3(n) + 3) / 2);
      }
  CHECK_THROWS_AS(localization_counts(6, 3, 3), Error);
  CHECK_THROWS_AS(localization_counts(2, 3, 1), Error);
}

TEST_CASE("separated sequence") {
  const auto seq = separated_sequence(6);
  REQUIRE(seq.records.size() == 5);
  CHECK(seq.records.front().birth == 2);
  for (std::size_t i = 1; i < seq.records.size(); ++i) {
    CHECK(seq.records[i].birth == seq.records[i - 1].birth + 1);
    CHECK(std::abs(seq.records[i].value / seq.records[i - 1].value - 5.0) < 1e-10 * 5.0);
    CHECK(seq.gaps[i] > seq.gaps[i - 1]);
  }
  CHECK(separated_sequence(1).records.size() == 1);
}

TEST_CASE("resolvable window") {
  for (int m = 2; m <= 6; ++m) {
    const double window = resolvable_window(m);
    const auto table = enumerate_spectrum(window);
    for (const auto& r : table.records)
      if (r.value < window) CHECK(r.resolvable_at(m));
  }
}

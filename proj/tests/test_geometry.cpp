#include "doctest.h"

#include <cmath>
#include <set>
#include <utility>

#include "gasket/eigensolver.hpp"
#include "gasket/error.hpp"
#include "gasket/geometry.hpp"

using namespace gasket;

namespace {

// Independent recount: apply the three midpoint maps to the outer triangle in
// planar coordinates and deduplicate points rounded to a fine grid.
std::size_t brute_force_vertex_count(int m) {
  using P = std::pair<double, double>;
  const P a[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  std::vector<std::array<P, 3>> cells{{a[0], a[1], a[2]}};
  for (int level = 0; level < m; ++level) {
    std::vector<std::array<P, 3>> next;
    for (const auto& t : cells)
      for (int i = 0; i < 3; ++i) {
        std::array<P, 3> s;
        for (int k = 0; k < 3; ++k)
          s[k] = {(t[k].first + t[i].first) / 2, (t[k].second + t[i].second) / 2};
        next.push_back(s);
      }
    cells = std::move(next);
  }
  std::set<std::pair<long long, long long>> seen;
  for (const auto& t : cells)
    for (const auto& p : t) seen.insert({std::llround(p.first * 1e9), std::llround(p.second * 1e9)});
  return seen.size();
}

}  // namespace

TEST_CASE("cell addresses enumerate words lexicographically") {
  const auto cells = CellAddress::all(2);
  REQUIRE(cells.size() == 9);
  CHECK(cells.front().to_string() == "11");
  CHECK(cells[5].to_string() == "23");
  CHECK(cells.back().to_string() == "33");
  CHECK(CellAddress::parse("213").index() == 1 * 9 + 0 * 3 + 2);
  CHECK(CellAddress::parse("2").contains(CellAddress::parse("213")));
  CHECK_FALSE(CellAddress::parse("3").contains(CellAddress::parse("213")));
  CHECK(CellAddress().level() == 0);
  CHECK_THROWS_AS(CellAddress::parse("14"), Error);
}

TEST_CASE("vertex counts at small levels") {
  CHECK(build_vertices(0).size() == 3);
  CHECK(build_vertices(0).cell_count() == 1);

  const auto v1 = build_vertices(1);
  CHECK(v1.size() == 6);
  CHECK(v1.cell_count() == 3);
  CHECK(v1.interior.size() == 3);

  CHECK(build_vertices(2).size() == 15);
}

TEST_CASE("vertex set invariants against an independent recount") {
  for (int m = 0; m <= 6; ++m) {
    CAPTURE(m);
    const auto v = build_vertices(m);
    CHECK(static_cast<std::int64_t>(v.size()) == (pow3(m + 1) + 3) / 2);
    CHECK(static_cast<std::int64_t>(v.interior.size()) == (pow3(m + 1) - 3) / 2);
    CHECK(v.size() == brute_force_vertex_count(m));
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(v.incidence[i].size() == (v.is_boundary[i] ? 1u : (m == 0 ? 1u : 2u)));
  }
}

TEST_CASE("vertex ids are deterministic") {
  const auto a = build_vertices(4);
  const auto b = build_vertices(4);
  CHECK(a.lattice == b.lattice);
  CHECK(a.cell_vertices == b.cell_vertices);
}

TEST_CASE("level cap is a resource limit") {
  try {
    build_vertices(9);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceLimit);
  }
  CHECK_NOTHROW(build_vertices(3, 3));
  CHECK_THROWS_AS(build_vertices(4, 3), Error);
}

TEST_CASE("self-similar measure weights") {
  const auto v0 = build_vertices(0);
  const auto mu0 = build_measure(v0);
  for (double w : mu0.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto v1 = build_vertices(1);
  const auto mu1 = build_measure(v1);
  for (std::size_t i = 0; i < v1.size(); ++i)
    CHECK(mu1.weights[i] == doctest::Approx(v1.is_boundary[i] ? 1.0 / 9.0 : 2.0 / 9.0).epsilon(1e-15));

  for (int m = 0; m <= 6; ++m) {
    const auto v = build_vertices(m);
    const auto mu = build_measure(v);
    CHECK(std::abs(mu.total() - 1.0) < 1e-14);
    for (int n = 0; n <= std::min(m, 3); ++n)
      for (const auto& cell : CellAddress::all(n))
        CHECK(std::abs(mu.cell_mass(v, cell) - 1.0 / static_cast<double>(pow3(n))) < 1e-14);
  }
}

TEST_CASE("integrate_simple closed form") {
  CHECK(integrate_simple(SimpleFunction::indicator(CellAddress::parse("1")), 1) ==
        doctest::Approx(1.0 / 3.0));
  for (int k = 0; k <= 4; ++k)
    CHECK(integrate_simple(SimpleFunction::constant(1.7), k) == doctest::Approx(std::pow(1.7, k)));
  std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const SimpleFunction f(2, a);
  for (int k = 0; k <= 3; ++k) {
    double s = 0;
    for (double x : a) s += std::pow(x, k) / 9.0;
    CHECK(integrate_simple(f, k) == doctest::Approx(s));
  }
  CHECK_THROWS_AS(SimpleFunction(1, {1.0, 2.0}), Error);
}

TEST_CASE("vertex quadrature is exact for simple functions") {
  const SimpleFunction f(2, {0.5, -1, 2, 3, 0.25, 7, -4, 1, 1.5});
  for (int m = 2; m <= 5; ++m) {
    const auto level = make_level(m);
    double sum = 0.0;
    const SpatialFunction g(f);
    for (std::size_t c = 0; c < level.vertices.cell_count(); ++c)
      for (auto vx : level.vertices.cell_vertices[c])
        sum += level.measure.incidence_weight * g.at(level.vertices, static_cast<std::int64_t>(c), vx);
    CHECK(sum == doctest::Approx(integrate_simple(f, 1)).epsilon(1e-13));
  }
}

TEST_CASE("simple functions are constant on finer cells") {
  const SimpleFunction f(1, {2.0, 3.0, 5.0});
  const SpatialFunction g(f);
  CHECK(*g.constant_on(CellAddress::parse("21")) == 3.0);
  CHECK(*g.constant_on(CellAddress::parse("3")) == 5.0);
  CHECK_FALSE(g.constant_on(CellAddress()).has_value());
  CHECK_FALSE(coordinate_function(0).constant_on(CellAddress::parse("111")).has_value());
}

TEST_CASE("Dirichlet Laplacian at level 1") {
  const auto lap = build_dirichlet_laplacian(1, false);
  REQUIRE(lap.matrix.rows() == 3);
  const auto eig = solve_symmetric(lap.matrix, EigenMethod::Jacobi);
  CHECK(eig.values[0] == doctest::Approx(2.0));
  CHECK(eig.values[1] == doctest::Approx(5.0));
  CHECK(eig.values[2] == doctest::Approx(5.0));

  const auto ren = build_dirichlet_laplacian(1, true);
  const auto reig = solve_symmetric(ren.matrix, EigenMethod::Jacobi);
  CHECK(reig.values[0] == doctest::Approx(15.0));
  CHECK(reig.values[1] == doctest::Approx(37.5));
  CHECK(reig.values[2] == doctest::Approx(37.5));
}

TEST_CASE("Dirichlet Laplacian structure") {
  for (int m = 1; m <= 5; ++m) {
    CAPTURE(m);
    const auto lap = build_dirichlet_laplacian(m, false);
    const auto& a = lap.matrix;
    CHECK(static_cast<std::int64_t>(a.rows()) == (pow3(m + 1) - 3) / 2);
    CHECK(a == a.transposed());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      CHECK(a(i, i) == 4.0);
      int neighbours = 0;
      for (std::size_t j = 0; j < a.cols(); ++j)
        if (i != j && a(i, j) != 0.0) {
          CHECK(a(i, j) == -1.0);
          ++neighbours;
        }
      CHECK(neighbours <= 4);
    }
    CHECK(symmetric_eigenvalues(a).front() > 0.0);
  }
  CHECK_THROWS_AS(build_dirichlet_laplacian(0, false), Error);
}

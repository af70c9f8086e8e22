#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gasket/error.hpp"
#include "gasket/operators.hpp"

using namespace gasket;

namespace {

const LevelSpectrum& level(int m) {
  static std::vector<std::unique_ptr<LevelSpectrum>> cache(8);
  if (!cache[m]) cache[m] = std::make_unique<LevelSpectrum>(build_level_spectrum(m));
  return *cache[m];
}

SimpleFunction simple_level1(double a, double b, double c) { return SimpleFunction(1, {a, b, c}); }

bool off_block_zero(const Matrix& g, const std::vector<std::size_t>& starts) {
  auto block_of = [&](std::size_t i) {
    std::size_t b = 0;
    while (b + 1 < starts.size() && i >= starts[b + 1]) ++b;
    return b;
  };
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (block_of(i) != block_of(j) && g(i, j) != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("symbol presets") {
  const auto& vs = level(1).level.vertices;
  const auto r = riesz_symbol(1.0);
  CHECK(r.at(vs, 0, 0, 2.0) == doctest::Approx(1.5));
  REQUIRE(r.limit_q);
  CHECK(r.limit_q->constant_on(CellAddress()) == 1.0);
  CHECK(bessel_symbol(1.0).at(vs, 0, 0, 1.0) == doctest::Approx(1.5));
  for (double beta : {0.0, -1.0}) {
    try {
      riesz_symbol(beta);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
  const auto c = constant_symbol(2.5);
  CHECK(c.limit_q->constant_on(CellAddress()) == 2.5);

  const auto chi = simple_level1(1.0, 2.0, 3.0);
  const auto sep = separable_symbol({[](double x) { return 1.0 / x; }, "1/lambda", {}, {}}, 0.0, chi);
  CHECK(sep.at(level(2).level.vertices, 0, level(2).level.vertices.cell_vertices[0][0], 4.0) ==
        doctest::Approx(1.25));
  CHECK(sep.limit_q->simple()->values == chi.values);
  const auto diag = check_symbol(sep, level(2).level.vertices, {10.0, 100.0, 1000.0});
  CHECK(diag.limit_trend_nonincreasing);
  CHECK(diag.limit_distances.back() == doctest::Approx(1e-3));
}

TEST_CASE("function descriptors") {
  CHECK(ScalarFunction::parse("identity")(3.0) == 3.0);
  CHECK(ScalarFunction::parse("power:3")(2.0) == 8.0);
  CHECK(*ScalarFunction::parse("power:3").power == 3);
  CHECK(ScalarFunction::parse("log")(std::exp(2.0)) == doctest::Approx(2.0));
  CHECK(ScalarFunction::parse("poly:1,0,2")(3.0) == 19.0);
  CHECK_THROWS_AS(ScalarFunction::parse("power:x"), Error);
  CHECK_THROWS_AS(ScalarFunction::parse("sin"), Error);
}

TEST_CASE("trivial compressions") {
  const auto& ls = level(3);
  const auto basis = basis_up_to(ls.bundles, 1e300);
  const auto one = compress(constant_symbol(1.0), basis, ls.level);
  CHECK(one.matrix == Matrix::identity(basis.size()));

  const auto& b = ls.bundle("5:2:+");
  const auto riesz = riesz_symbol(1.0);
  const auto op = compress(riesz, basis_from_bundle(b), ls.level);
  const double p = 1.0 + 1.0 / b.record.value;
  for (std::size_t i = 0; i < op.dimension(); ++i)
    for (std::size_t j = 0; j < op.dimension(); ++j) CHECK(op.matrix(i, j) == (i == j ? p : 0.0));

  // A non-constant multiplication symbol goes through the vertex sums.
  const auto x = compress(multiplication_symbol(coordinate_function(0)), basis, ls.level);
  CHECK(x.exact_rows == 0);
  CHECK(x.asymmetry < 1e-13);
  CHECK(asymmetry(x.matrix) == 0.0);

  const auto other = basis_up_to(level(2).bundles, 1e300);
  try {
    compress(riesz, other, ls.level);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Structural);
  }
}

TEST_CASE("indicator on a split 6-series bundle is block diagonal") {
  const auto& ls = level(4);
  const auto split = localized_split(ls.bundle("6:3:+"), 1, ls.level);
  const auto basis = basis_from_split(split);
  REQUIRE(basis.size() == 12);
  const auto op = compress(multiplication_symbol(SimpleFunction::indicator(CellAddress::parse("1"))), basis,
                           ls.level);
  CHECK(op.exact_rows == 9);
  CHECK(off_block_zero(op.matrix, {0, 3, 6, 9}));
  for (std::size_t i = 0; i < 9; ++i) CHECK(op.matrix(i, i) == (i < 3 ? 1.0 : 0.0));

  // Tr(G^2) splits into the localized blocks plus the trailing block.
  double tail = 0.0;
  for (std::size_t i = 9; i < 12; ++i)
    for (std::size_t j = 9; j < 12; ++j) tail += op.matrix(i, j) * op.matrix(j, i);
  CHECK(trace_F(op, ScalarFunction::monomial(2)) == doctest::Approx(3.0 + tail).epsilon(1e-12));
}

TEST_CASE("trace functional is linear and positive") {
  const auto& ls = level(3);
  const auto basis = basis_up_to(ls.bundles, 3000.0);
  const auto op = compress(separable_symbol({[](double x) { return 10.0 / x; }, "10/lambda", {}, {}}, 0.0,
                                            coordinate_function(1)),
                           basis, ls.level);
  const auto f = ScalarFunction::polynomial({0.3, -1.0, 2.0});
  const auto g = ScalarFunction::monomial(3);
  const ScalarFunction sum{[&](double x) { return f(x) + 2.5 * g(x); }, "f+2.5g", {}, {}};
  CHECK(trace_F(op, sum) == doctest::Approx(trace_F(op, f) + 2.5 * trace_F(op, g)).epsilon(1e-10));
  const ScalarFunction square{[](double x) { return (x - 0.4) * (x - 0.4); }, "sq", {}, {}};
  CHECK(trace_F(op, square) >= 0.0);

  const auto c = compress(constant_symbol(1.75), basis, ls.level);
  CHECK(trace_F(c, ScalarFunction::identity()) == doctest::Approx(1.75 * static_cast<double>(basis.size())));

  for (int k = 0; k <= 6; ++k) {
    const auto sigma = operator_spectrum(op);
    double s = 0.0;
    for (double x : sigma) s += std::pow(x, k);
    CHECK(power_trace(op.matrix, k) == doctest::Approx(s).epsilon(1e-10));
  }

  ScalarFunction narrow = ScalarFunction::identity();
  narrow.domain = std::pair{0.0, 0.5};
  try {
    trace_F(op, narrow);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
  }
}

TEST_CASE("log det") {
  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  CHECK(log_det(d) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  const auto& ls = level(3);
  const auto basis = basis_up_to(ls.bundles, 1e300);
  CHECK(log_det(compress(constant_symbol(2.0), basis, ls.level)) ==
        doctest::Approx(static_cast<double>(basis.size()) * std::log(2.0)).epsilon(1e-14));
  try {
    log_det(compress(constant_symbol(-1.0), basis, ls.level));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }

  // p1 <= p2 pointwise gives ordered spectra and ordered determinants.
  const auto b = basis_from_bundle(ls.bundle("6:2:+"));
  const auto lo = compress(multiplication_symbol(simple_level1(1.0, 2.0, 3.0)), b, ls.level);
  const auto hi = compress(multiplication_symbol(simple_level1(1.5, 2.0, 3.5)), b, ls.level);
  CHECK(log_det(lo) <= log_det(hi));
  const auto s_lo = operator_spectrum(lo);
  const auto s_hi = operator_spectrum(hi);
  for (std::size_t i = 0; i < s_lo.size(); ++i) CHECK(s_lo[i] <= s_hi[i] + 1e-10);
}

TEST_CASE("spectrum map matches constant-coefficient compressions") {
  const auto& ls = level(4);
  const double cutoff = 0.99 * resolvable_window(4);
  const auto table = enumerate_spectrum(cutoff);
  const auto p = ScalarFunction{[](double x) { return 1.0 + std::pow(x, -1.0); }, "riesz", {}, {}};
  const auto mapped = spectrum_map(p, table);
  const auto op = compress(riesz_symbol(1.0), basis_up_to(ls.bundles, cutoff), ls.level);
  const auto sigma = operator_spectrum(op);
  REQUIRE(sigma.size() == mapped.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) CHECK(std::abs(sigma[i] - mapped[i]) <= 1e-10);
  CHECK(mapped.front() > 1.0);

  const auto ident = spectrum_map(ScalarFunction::identity(), table);
  CHECK(ident.front() == doctest::Approx(16.815998889348393).epsilon(1e-11));
  CHECK(static_cast<std::int64_t>(ident.size()) == table.dimension());
}

TEST_CASE("spectral bounds contain every compressed spectrum") {
  const auto& ls = level(4);
  const double window = resolvable_window(4);
  const auto table = enumerate_spectrum(0.99 * window);

  const auto c = spectral_bounds(constant_symbol(2.0), table, ls, 0.1);
  CHECK(c.A == doctest::Approx(1.9));
  CHECK(c.B == doctest::Approx(2.1));

  const auto r = spectral_bounds(riesz_symbol(1.0), table, ls, 0.1);
  CHECK(r.A == doctest::Approx(0.9));
  CHECK(r.B == doctest::Approx(std::max(1.1, 1.0 + 1.0 / 16.815998889348393)));
  CHECK(r.lambda_bar == doctest::Approx(16.815998889348393));

  // Symbols without head/tail coupling: constant coefficient or lambda-free.
  const auto x = multiplication_symbol(coordinate_function(0));
  for (const auto& symbol : {riesz_symbol(0.5), bessel_symbol(1.0), x}) {
    const auto b = spectral_bounds(symbol, table, ls, 0.05);
    for (double cutoff : {b.lambda_bar, 5.0 * b.lambda_bar, 0.99 * window}) {
      const auto op = compress(symbol, basis_up_to(ls.bundles, cutoff), ls.level);
      for (double s : operator_spectrum(op)) {
        CHECK(s >= b.A - 1e-12);
        CHECK(s <= b.B + 1e-12);
      }
    }
  }

  // With q(lambda) + chi(x) the head and the tail couple through chi, so
  // larger compressions may leave [A, B]; the sum of the ranges still bounds them.
  const auto chi = simple_level1(0.5, 1.0, 2.0);
  const auto sep = separable_symbol({[](double x) { return 40.0 / x; }, "40/lambda", {}, {}}, 0.0, chi);
  const auto op = compress(sep, basis_up_to(ls.bundles, 0.99 * window), ls.level);
  for (double s : operator_spectrum(op)) {
    CHECK(s >= 0.5 - 1e-12);
    CHECK(s <= 2.0 + 40.0 / 16.815998889348393 + 1e-12);
  }
  CHECK_THROWS_AS(spectral_bounds(constant_coefficient_symbol(ScalarFunction::identity()), table, ls, 0.1),
                  Error);
}

TEST_CASE("traces do not depend on the non-localized completion") {
  const auto& ls = level(4);
  const auto split = localized_split(ls.bundle("6:3:+"), 1, ls.level);
  const auto symbol = separable_symbol({[](double x) { return 1.0 / x; }, "1/lambda", {}, {}}, 0.0,
                                       SpatialFunction([](Point p) { return 1.0 + p.x * p.x + p.y; }, "1+x^2+y"));
  const auto a = compress(symbol, basis_from_split(split), ls.level);
  const auto b = compress(symbol, basis_from_split(rotate_nonlocalized(split, 12345)), ls.level);
  CHECK(max_abs(a.matrix) > 0.0);
  for (int k = 1; k <= 4; ++k)
    CHECK(std::abs(trace_F(a, ScalarFunction::monomial(k)) - trace_F(b, ScalarFunction::monomial(k))) < 1e-9);
  CHECK(std::abs(log_det(a) - log_det(b)) < 1e-9);
}

#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "grfl/error.hpp"
#include "grfl/mesh.hpp"
#include "support.hpp"

using namespace grfl;
using support::two_pi;

namespace {

// Derivative along `axis` by an explicit O(n^2) DFT on every grid line.
Scalar dense_dft_derivative(const Grid& grid, const Scalar& u, int axis) {
  const auto& n = grid.n();
  const int len = n[axis];
  const double L = grid.length()[axis];
  Scalar out(u.size(), 0.0);
  std::array<int, 3> lo{0, 0, 0};
  for (lo[0] = 0; lo[0] < (axis == 0 ? 1 : n[0]); ++lo[0])
    for (lo[1] = 0; lo[1] < (axis == 1 ? 1 : n[1]); ++lo[1])
      for (lo[2] = 0; lo[2] < (axis == 2 ? 1 : n[2]); ++lo[2]) {
        std::vector<double> line(len);
        std::vector<std::size_t> at(len);
        for (int s = 0; s < len; ++s) {
          auto c = lo;
          c[axis] = s;
          at[s] = grid.index(c[0], c[1], c[2]);
          line[s] = u[at[s]];
        }
        for (int s = 0; s < len; ++s) {
          std::complex<double> acc = 0.0;
          for (int m = 0; m < len; ++m) {
            const int sm = m <= len / 2 ? m : m - len;
            if (2 * sm == len) continue;
            std::complex<double> coef = 0.0;
            for (int r = 0; r < len; ++r) coef += line[r] * std::polar(1.0, -two_pi * m * r / len);
            acc += std::complex<double>(0.0, two_pi * sm / L) * coef * std::polar(1.0, two_pi * m * s / len);
          }
          out[at[s]] = acc.real() / len;
        }
      }
  return out;
}

}  // namespace

TEST_CASE("make_grid spacing and validation") {
  const Grid a = make_grid({16, 16, 16}, {1, 1, 1}, Backend::spectral);
  CHECK(a.spacing()[0] == 1.0 / 16);
  CHECK(a.points() == 4096);
  const Grid b = make_grid({8, 16, 32}, {1, 2, 4}, Backend::central4);
  for (int k = 0; k < 3; ++k) CHECK(b.spacing()[k] == 0.125);
  CHECK_THROWS_AS(make_grid({2, 16, 16}, {1, 1, 1}, Backend::spectral), InvalidGrid);
  CHECK_THROWS_AS(make_grid({16, 16, 16}, {1, 0, 1}, Backend::spectral), InvalidGrid);
  CHECK_THROWS_AS(make_grid({16, 16, 16}, {1, -2, 1}, Backend::central4), InvalidGrid);
}

TEST_CASE("spectral partial on constants and eigenfunctions") {
  const Grid grid = support::cube(16);
  const Scalar one(grid.points(), 3.0);
  CHECK(support::max_abs(partial(grid, one, 0)) < 1e-14);
  const Scalar s = sample(grid, [](double x, double, double) { return std::sin(two_pi * x); });
  const Scalar c = sample(grid, [](double x, double, double) { return two_pi * std::cos(two_pi * x); });
  CHECK(support::max_abs_diff(partial(grid, s, 0), c) <= 1e-12);

  const Grid rect = make_grid({8, 12, 10}, {1.0, 2.0, 3.0}, Backend::spectral);
  const Scalar s3 = sample(rect, [](double, double, double z) { return std::sin(two_pi * z / 3.0); });
  const Scalar c3 = sample(rect, [](double, double, double z) { return two_pi / 3.0 * std::cos(two_pi * z / 3.0); });
  CHECK(support::max_abs_diff(partial(rect, s3, 2), c3) <= 1e-12);
}

TEST_CASE("spectral partial matches a dense DFT oracle") {
  const Grid grid = make_grid({8, 10, 12}, {1.0, 1.5, 2.0}, Backend::spectral);
  std::mt19937_64 rng(5);
  const Scalar u = support::band_limited(grid, rng, 3);
  for (int axis = 0; axis < 3; ++axis)
    CHECK(support::max_abs_diff(partial(grid, u, axis), dense_dft_derivative(grid, u, axis)) <= 1e-10);
}

TEST_CASE("gradient equals three partials") {
  const Grid grid = support::cube(12);
  std::mt19937_64 rng(9);
  const Scalar u = support::band_limited(grid, rng, 2);
  const auto g = gradient(grid, u);
  for (int a = 0; a < 3; ++a) CHECK(support::max_abs_diff(g[a], partial(grid, u, a)) == 0.0);
}

TEST_CASE("mixed partials commute and derivatives integrate to zero") {
  const Grid grid = support::cube(16);
  std::mt19937_64 rng(13);
  const Scalar u = support::band_limited(grid, rng, 3);
  const Field id = [&] {
    Field g(Symmetry::sym2, grid.points());
    for (int c : {0, 3, 5}) std::fill(g.comp(c).begin(), g.comp(c).end(), 1.0);
    return g;
  }();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Scalar ab = partial(grid, partial(grid, u, b), a);
      const Scalar ba = partial(grid, partial(grid, u, a), b);
      CHECK(support::max_abs_diff(ab, ba) <= 1e-10);
    }
    CHECK(std::abs(integrate_scalar(grid, partial(grid, u, a), id)) <= 1e-12);
  }
}

TEST_CASE("partial rejects non-finite input") {
  const Grid grid = support::cube(8);
  Scalar u(grid.points(), 0.0);
  u[17] = std::nan("");
  CHECK_THROWS_AS(partial(grid, u, 1), NonFinite);
}

TEST_CASE("integrate_scalar examples") {
  const Grid grid = support::cube(16);
  Field g(Symmetry::sym2, grid.points());
  for (int c : {0, 3, 5}) std::fill(g.comp(c).begin(), g.comp(c).end(), 1.0);
  const Scalar one(grid.points(), 1.0);
  CHECK(integrate_scalar(grid, one, g) == doctest::Approx(1.0).epsilon(1e-15));
  const Scalar s = sample(grid, [](double x, double, double) { return std::sin(two_pi * x); });
  CHECK(std::abs(integrate_scalar(grid, s, g)) <= 1e-14);
  std::fill(g.comp(0).begin(), g.comp(0).end(), 4.0);
  CHECK(integrate_scalar(grid, one, g) == doctest::Approx(2.0).epsilon(1e-15));
  g.comp(0)[5] = -1.0;
  CHECK_THROWS_AS(integrate_scalar(grid, one, g), NonSPDMetric);
}

TEST_CASE("central4 converges at fourth order") {
  std::array<double, 3> err{};
  const int ns[3] = {16, 32, 64};
  for (int r = 0; r < 3; ++r) {
    const Grid grid = make_grid({ns[r], 4, 4}, {1, 1, 1}, Backend::central4);
    const Scalar s = sample(grid, [](double x, double, double) { return std::sin(two_pi * x); });
    const Scalar c = sample(grid, [](double x, double, double) { return two_pi * std::cos(two_pi * x); });
    err[r] = support::max_abs_diff(partial(grid, s, 0), c);
  }
  const double order1 = std::log2(err[0] / err[1]);
  const double order2 = std::log2(err[1] / err[2]);
  CHECK(order1 >= 3.8);
  CHECK(order2 >= 3.8);
}

TEST_CASE("derivative symbols") {
  const Grid sp = support::cube(8);
  CHECK(sp.symbol(0)[1] == doctest::Approx(two_pi));
  CHECK(sp.symbol(0)[4] == 0.0);  // Nyquist
  CHECK(sp.symbol(0)[7] == doctest::Approx(-two_pi));
  CHECK(sp.symbol(2).size() == 5);
  const Grid c4 = support::cube(8, Backend::central4);
  const double h = 1.0 / 8, k = two_pi;
  CHECK(c4.symbol(1)[1] == doctest::Approx((8 * std::sin(k * h) - std::sin(2 * k * h)) / (6 * h)));
}

#pragma once

// Shared fixtures for the unit tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "grfl/field.hpp"
#include "grfl/mesh.hpp"

namespace support {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline grfl::Grid cube(int n, grfl::Backend b = grfl::Backend::spectral) {
  return grfl::make_grid({n, n, n}, {1.0, 1.0, 1.0}, b);
}

// Random trigonometric polynomial with integer modes |m_a| <= kmax.
inline grfl::Scalar band_limited(const grfl::Grid& grid, std::mt19937_64& rng, int kmax, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  grfl::Scalar out(grid.points(), 0.0);
  const auto& L = grid.length();
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b)
      for (int c = 0; c <= kmax; ++c) {
        const double cc = amp * u(rng), ss = amp * u(rng);
        std::size_t p = 0;
        for (int i = 0; i < grid.n()[0]; ++i)
          for (int j = 0; j < grid.n()[1]; ++j)
            for (int k = 0; k < grid.n()[2]; ++k, ++p) {
              const double ph = two_pi * (a * grid.x(0, i) / L[0] + b * grid.x(1, j) / L[1] + c * grid.x(2, k) / L[2]);
              out[p] += cc * std::cos(ph) + ss * std::sin(ph);
            }
      }
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Metric delta + amp * smooth symmetric perturbation.
inline grfl::Field perturbed_metric(const grfl::Grid& grid, std::mt19937_64& rng, double amp, int kmax = 1) {
  grfl::Field g(grfl::Symmetry::sym2, grid.points());
  for (int c = 0; c < 6; ++c) {
    grfl::Scalar p = band_limited(grid, rng, kmax);
    const double m = max_abs(p);
    const bool diag = (c == 0 || c == 3 || c == 5);
    for (std::size_t x = 0; x < p.size(); ++x) g.comp(c)[x] = (diag ? 1.0 : 0.0) + amp * p[x] / m;
  }
  return g;
}

// Every component an independent band-limited field scaled to max |.| = amp.
inline grfl::Field random_field(const grfl::Grid& grid, std::mt19937_64& rng, grfl::Symmetry sym, double amp,
                                int kmax = 1) {
  grfl::Field out(sym, grid.points());
  for (int c = 0; c < out.components(); ++c) {
    const grfl::Scalar p = band_limited(grid, rng, kmax);
    const double m = max_abs(p);
    for (std::size_t x = 0; x < p.size(); ++x) out.comp(c)[x] = amp * p[x] / m;
  }
  return out;
}

inline grfl::Scalar random_scalar(const grfl::Grid& grid, std::mt19937_64& rng, double amp, int kmax = 1) {
  grfl::Scalar p = band_limited(grid, rng, kmax);
  const double m = max_abs(p);
  for (double& v : p) v *= amp / m;
  return p;
}

inline grfl::Field identity_metric(const grfl::Grid& grid) {
  grfl::Field g(grfl::Symmetry::sym2, grid.points());
  for (int c : {0, 3, 5}) std::fill(g.comp(c).begin(), g.comp(c).end(), 1.0);
  return g;
}

// g = exp(2 phi) delta with phi = eps sin(2 pi x^1)
struct Conformal {
  double eps;
  double phi(double x) const { return eps * std::sin(two_pi * x); }
  double d1(double x) const { return eps * two_pi * std::cos(two_pi * x); }
  double d2(double x) const { return -eps * two_pi * two_pi * std::sin(two_pi * x); }
  // Ricci of e^{2 phi} delta in 3D for phi = phi(x^1)
  grfl::Mat3 ricci(double x) const {
    const double a = -2.0 * d2(x), b = -(d2(x) + d1(x) * d1(x));
    return {a, 0, 0, 0, b, 0, 0, 0, b};
  }
  double scalar(double x) const { return std::exp(-2.0 * phi(x)) * (-4.0 * d2(x) - 2.0 * d1(x) * d1(x)); }
};

inline grfl::Field conformal_metric(const grfl::Grid& grid, const Conformal& c) {
  grfl::Field g(grfl::Symmetry::sym2, grid.points());
  const grfl::Scalar e = grfl::sample(grid, [&](double x, double, double) { return std::exp(2.0 * c.phi(x)); });
  for (int k : {0, 3, 5}) std::copy(e.begin(), e.end(), g.comp(k).begin());
  return g;
}

inline double rel_linf(std::span<const double> got, std::span<const double> want) {
  return support::max_abs_diff(got, want) / std::max(support::max_abs(want), 1e-300);
}

}  // namespace support

#pragma once

// Periodic 3-torus lattice and its derivative / integration machinery.
//
// Axes are 0-based in code (axis 0 is x^1). Sample (i0, i1, i2) sits at
// x^a = i_a * h_a and is stored at flat index (i0 * n1 + i1) * n2 + i2, so
// x^3 is the fastest-varying coordinate.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "grfl/field.hpp"

namespace grfl {

enum class Backend { spectral, central4 };

const char* backend_name(Backend b);

namespace detail {
struct SpectralPlan;
}

class Grid {
 public:
  // Throws InvalidGrid if any n < 4 or L <= 0.
  Grid(std::array<int, 3> n, std::array<double, 3> length, Backend backend = Backend::spectral);

  const std::array<int, 3>& n() const { return n_; }
  const std::array<double, 3>& length() const { return length_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  Backend backend() const { return backend_; }
  std::size_t points() const { return points_; }
  double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
  double volume() const { return length_[0] * length_[1] * length_[2]; }

  std::size_t index(int i0, int i1, int i2) const {
    return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(n_[1]) + static_cast<std::size_t>(i1)) *
               static_cast<std::size_t>(n_[2]) +
           static_cast<std::size_t>(i2);
  }
  std::array<int, 3> coords(std::size_t p) const;
  double x(int axis, int i) const { return i * spacing_[axis]; }

  // Same lattice and backend (the spectral plan may be shared or not).
  bool same_shape(const Grid& other) const;

  // Number of complex coefficients of a real-to-complex transform.
  std::size_t spectrum_size() const;
  const detail::SpectralPlan& plan() const { return *plan_; }

  // Derivative symbol along `axis` for each spectral index: with the spectral
  // backend the integer wavenumber 2 pi m / L (zero at Nyquist), with central4
  // its modified wavenumber (8 sin(kh) - sin(2kh)) / (6h). For axis 2 only the
  // n2/2 + 1 non-negative indices are listed.
  const std::vector<double>& symbol(int axis) const { return symbol_[axis]; }
  // Exact continuous wavenumber 2 pi m / L for each spectral index (m signed).
  const std::vector<double>& wavenumber(int axis) const { return wavenumber_[axis]; }

 private:
  std::array<int, 3> n_;
  std::array<double, 3> length_;
  std::array<double, 3> spacing_;
  Backend backend_;
  std::size_t points_;
  std::shared_ptr<const detail::SpectralPlan> plan_;
  std::array<std::vector<double>, 3> symbol_;
  std::array<std::vector<double>, 3> wavenumber_;
};

Grid make_grid(std::array<int, 3> n, std::array<double, 3> length, Backend backend);

using Spectrum = std::vector<std::complex<double>>;

// Unnormalized forward real-to-complex DFT, and its inverse including the 1/N.
Spectrum forward_transform(const Grid& grid, std::span<const double> u);
Scalar inverse_transform(const Grid& grid, Spectrum spec);

// Periodic partial derivative along `axis` (0..2) with the grid's backend.
// Throws NonFinite on non-finite input.
Scalar partial(const Grid& grid, std::span<const double> u, int axis);
// All three partials; the spectral backend reuses one forward transform.
std::array<Scalar, 3> gradient(const Grid& grid, std::span<const double> u);

// sum_p s[p] sqrt(det g[p]) h1 h2 h3; throws NonSPDMetric if any det g <= 0.
double integrate_scalar(const Grid& grid, std::span<const double> s, const Field& g);
// Same with a precomputed sqrt(det g) weight.
double integrate_weighted(const Grid& grid, std::span<const double> s, std::span<const double> sqrt_det);

// Sample a function of position on the lattice.
template <class F>
Scalar sample(const Grid& grid, F&& fn) {
  Scalar out(grid.points());
  std::size_t p = 0;
  for (int i = 0; i < grid.n()[0]; ++i)
    for (int j = 0; j < grid.n()[1]; ++j)
      for (int k = 0; k < grid.n()[2]; ++k) out[p++] = fn(grid.x(0, i), grid.x(1, j), grid.x(2, k));
  return out;
}

}  // namespace grfl

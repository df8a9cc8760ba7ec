#include "grfl/mesh.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "grfl/error.hpp"
#include "grfl/kernels.hpp"

namespace grfl {

namespace detail {

// FFTW plans for one lattice. Planning is serialized; execution through the
// new-array interface is reentrant.
struct SpectralPlan {
  std::array<int, 3> n;
  std::size_t real_size;
  std::size_t complex_size;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit SpectralPlan(std::array<int, 3> dims) : n(dims) {
    real_size = static_cast<std::size_t>(n[0]) * n[1] * n[2];
    complex_size = static_cast<std::size_t>(n[0]) * n[1] * (n[2] / 2 + 1);
    static std::mutex planner;
    std::lock_guard<std::mutex> lock(planner);
    double* in = fftw_alloc_real(real_size);
    fftw_complex* out = fftw_alloc_complex(complex_size);
    r2c = fftw_plan_dft_r2c_3d(n[0], n[1], n[2], in, out, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_3d(n[0], n[1], n[2], out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  ~SpectralPlan() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;
};

}  // namespace detail

namespace {

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(ptr); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* ptr;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(ptr); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* ptr;
};

void require_finite(std::span<const double> u) {
  for (double v : u)
    if (!std::isfinite(v)) throw NonFinite("non-finite sample in derivative input");
}

}  // namespace

const char* backend_name(Backend b) { return b == Backend::spectral ? "spectral" : "central4"; }

Grid::Grid(std::array<int, 3> n, std::array<double, 3> length, Backend backend)
    : n_(n), length_(length), backend_(backend) {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 4) throw InvalidGrid("axis " + std::to_string(a + 1) + ": n must be >= 4");
    if (!(length[a] > 0.0) || !std::isfinite(length[a]))
      throw InvalidGrid("axis " + std::to_string(a + 1) + ": L must be positive");
    spacing_[a] = length[a] / n[a];
  }
  points_ = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  plan_ = std::make_shared<const detail::SpectralPlan>(n);
  for (int a = 0; a < 3; ++a) {
    const int count = (a == 2) ? n[a] / 2 + 1 : n[a];
    symbol_[a].resize(count);
    wavenumber_[a].resize(count);
    for (int m = 0; m < count; ++m) {
      const int signed_m = (m <= n[a] / 2) ? m : m - n[a];
      const double k = 2.0 * std::numbers::pi * signed_m / length[a];
      wavenumber_[a][m] = k;
      const bool nyquist = (n[a] % 2 == 0) && (m == n[a] / 2);
      if (backend == Backend::spectral) {
        symbol_[a][m] = nyquist ? 0.0 : k;
      } else {
        const double h = spacing_[a];
        symbol_[a][m] = (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
        if (nyquist) symbol_[a][m] = 0.0;
      }
    }
  }
}

std::array<int, 3> Grid::coords(std::size_t p) const {
  const int k = static_cast<int>(p % n_[2]);
  p /= n_[2];
  const int j = static_cast<int>(p % n_[1]);
  const int i = static_cast<int>(p / n_[1]);
  return {i, j, k};
}

bool Grid::same_shape(const Grid& other) const {
  return n_ == other.n_ && length_ == other.length_ && backend_ == other.backend_;
}

std::size_t Grid::spectrum_size() const { return plan_->complex_size; }

Grid make_grid(std::array<int, 3> n, std::array<double, 3> length, Backend backend) {
  return Grid(n, length, backend);
}

Spectrum forward_transform(const Grid& grid, std::span<const double> u) {
  const auto& plan = grid.plan();
  RealBuffer in(plan.real_size);
  ComplexBuffer out(plan.complex_size);
  std::copy(u.begin(), u.end(), in.ptr);
  fftw_execute_dft_r2c(plan.r2c, in.ptr, out.ptr);
  Spectrum spec(plan.complex_size);
  for (std::size_t m = 0; m < plan.complex_size; ++m) spec[m] = {out.ptr[m][0], out.ptr[m][1]};
  return spec;
}

Scalar inverse_transform(const Grid& grid, Spectrum spec) {
  const auto& plan = grid.plan();
  ComplexBuffer in(plan.complex_size);
  RealBuffer out(plan.real_size);
  for (std::size_t m = 0; m < plan.complex_size; ++m) {
    in.ptr[m][0] = spec[m].real();
    in.ptr[m][1] = spec[m].imag();
  }
  fftw_execute_dft_c2r(plan.c2r, in.ptr, out.ptr);
  const double scale = 1.0 / static_cast<double>(plan.real_size);
  Scalar u(plan.real_size);
  for (std::size_t p = 0; p < plan.real_size; ++p) u[p] = out.ptr[p] * scale;
  return u;
}

namespace {

// Multiply a half-spectrum by i * symbol_axis and transform back.
Scalar spectral_derivative(const Grid& grid, const fftw_complex* spec, int axis) {
  const auto& plan = grid.plan();
  const auto& n = grid.n();
  const int nz = n[2] / 2 + 1;
  const auto& sym = grid.symbol(axis);
  const double scale = 1.0 / static_cast<double>(plan.real_size);
  ComplexBuffer work(plan.complex_size);
  std::size_t m = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < nz; ++k, ++m) {
        const double s = scale * (axis == 0 ? sym[i] : axis == 1 ? sym[j] : sym[k]);
        work.ptr[m][0] = -s * spec[m][1];
        work.ptr[m][1] = s * spec[m][0];
      }
  RealBuffer out(plan.real_size);
  fftw_execute_dft_c2r(plan.c2r, work.ptr, out.ptr);
  return Scalar(out.ptr, out.ptr + plan.real_size);
}

Scalar central4_derivative(const Grid& grid, std::span<const double> u, int axis) {
  Scalar out(u.size());
  kernels::central4(u, out, grid.n(), axis, 1.0 / (12.0 * grid.spacing()[axis]));
  return out;
}

}  // namespace

Scalar partial(const Grid& grid, std::span<const double> u, int axis) {
  require_finite(u);
  if (grid.backend() == Backend::central4) return central4_derivative(grid, u, axis);
  const auto& plan = grid.plan();
  RealBuffer in(plan.real_size);
  ComplexBuffer spec(plan.complex_size);
  std::copy(u.begin(), u.end(), in.ptr);
  fftw_execute_dft_r2c(plan.r2c, in.ptr, spec.ptr);
  return spectral_derivative(grid, spec.ptr, axis);
}

std::array<Scalar, 3> gradient(const Grid& grid, std::span<const double> u) {
  require_finite(u);
  if (grid.backend() == Backend::central4)
    return {central4_derivative(grid, u, 0), central4_derivative(grid, u, 1), central4_derivative(grid, u, 2)};
  const auto& plan = grid.plan();
  RealBuffer in(plan.real_size);
  ComplexBuffer spec(plan.complex_size);
  std::copy(u.begin(), u.end(), in.ptr);
  fftw_execute_dft_r2c(plan.r2c, in.ptr, spec.ptr);
  return {spectral_derivative(grid, spec.ptr, 0), spectral_derivative(grid, spec.ptr, 1),
          spectral_derivative(grid, spec.ptr, 2)};
}

double integrate_weighted(const Grid& grid, std::span<const double> s, std::span<const double> sqrt_det) {
  return kernels::weighted_sum(s, sqrt_det) * grid.cell_volume();
}

double integrate_scalar(const Grid& grid, std::span<const double> s, const Field& g) {
  std::vector<double> w(grid.points());
  for (std::size_t p = 0; p < w.size(); ++p) {
    const double d = det3(sym2_at(g, p));
    if (!(d > 0.0)) throw NonSPDMetric(p, d);
    w[p] = std::sqrt(d);
  }
  return integrate_weighted(grid, s, w);
}

}  // namespace grfl

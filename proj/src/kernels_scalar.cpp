#include "grfl/kernels.hpp"

#include <algorithm>
#include <limits>

namespace grfl::kernels::detail::scalar {

void axpy_to(double* y, const double* x, double a, const double* k, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double weighted_sum(const double* s, const double* w, std::size_t n) {
  // Four interleaved partial sums, same association as the vector version.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) acc[l] += s[i + l] * w[i + l];
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += s[i] * w[i];
  return total;
}

void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    const double a = in.c[0][p], b = in.c[1][p], c = in.c[2][p];
    const double d = in.c[3][p], e = in.c[4][p], f = in.c[5][p];
    const double c00 = d * f - e * e;
    const double c01 = c * e - b * f;
    const double c02 = b * e - c * d;
    const double c11 = a * f - c * c;
    const double c12 = b * c - a * e;
    const double c22 = a * d - b * b;
    const double dt = a * c00 + b * c01 + c * c02;
    const double r = 1.0 / dt;
    det[p] = dt;
    inv.c[0][p] = c00 * r;
    inv.c[1][p] = c01 * r;
    inv.c[2][p] = c02 * r;
    inv.c[3][p] = c11 * r;
    inv.c[4][p] = c12 * r;
    inv.c[5][p] = c22 * r;
  }
}

void central4(const double* u, double* out, std::array<int, 3> dims, int axis, double inv_12h) {
  std::size_t inner = 1;
  for (int a = axis + 1; a < 3; ++a) inner *= static_cast<std::size_t>(dims[a]);
  std::size_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(dims[a]);
  const int n = dims[axis];
  const std::size_t line = static_cast<std::size_t>(n) * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* base = u + o * line;
    double* obase = out + o * line;
    for (int i = 0; i < n; ++i) {
      const double* p1 = base + static_cast<std::size_t>((i + 1) % n) * inner;
      const double* m1 = base + static_cast<std::size_t>((i - 1 + n) % n) * inner;
      const double* p2 = base + static_cast<std::size_t>((i + 2) % n) * inner;
      const double* m2 = base + static_cast<std::size_t>((i - 2 + 2 * n) % n) * inner;
      double* dst = obase + static_cast<std::size_t>(i) * inner;
      for (std::size_t j = 0; j < inner; ++j)
        dst[j] = (8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) * inv_12h;
    }
  }
}

double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  const double w12 = 2.0 * m[1], w13 = 2.0 * m[2], w23 = 2.0 * m[4];
  for (std::size_t j = 0; j < n; ++j) {
    const double v = m[0] * q.c[0][j] + m[3] * q.c[3][j] + m[5] * q.c[5][j] + w12 * q.c[1][j] +
                     w13 * q.c[2][j] + w23 * q.c[4][j];
    best = std::min(best, v);
  }
  return best;
}

}  // namespace grfl::kernels::detail::scalar

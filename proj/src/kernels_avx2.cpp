// Compiled with -mavx2 -mfma; only reached when CPUID reports both.
#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "grfl/kernels.hpp"

namespace grfl::kernels::detail::avx2 {

void axpy_to(double* y, const double* x, double a, const double* k, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + a * k[i];
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double weighted_sum(const double* s, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(s + i), _mm256_loadu_pd(w + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += s[i] * w[i];
  return total;
}

void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d a = _mm256_loadu_pd(in.c[0] + p), b = _mm256_loadu_pd(in.c[1] + p);
    const __m256d c = _mm256_loadu_pd(in.c[2] + p), d = _mm256_loadu_pd(in.c[3] + p);
    const __m256d e = _mm256_loadu_pd(in.c[4] + p), f = _mm256_loadu_pd(in.c[5] + p);
    const __m256d c00 = _mm256_fmsub_pd(d, f, _mm256_mul_pd(e, e));
    const __m256d c01 = _mm256_fmsub_pd(c, e, _mm256_mul_pd(b, f));
    const __m256d c02 = _mm256_fmsub_pd(b, e, _mm256_mul_pd(c, d));
    const __m256d c11 = _mm256_fmsub_pd(a, f, _mm256_mul_pd(c, c));
    const __m256d c12 = _mm256_fmsub_pd(b, c, _mm256_mul_pd(a, e));
    const __m256d c22 = _mm256_fmsub_pd(a, d, _mm256_mul_pd(b, b));
    const __m256d dt = _mm256_fmadd_pd(a, c00, _mm256_fmadd_pd(b, c01, _mm256_mul_pd(c, c02)));
    const __m256d r = _mm256_div_pd(one, dt);
    _mm256_storeu_pd(det + p, dt);
    _mm256_storeu_pd(inv.c[0] + p, _mm256_mul_pd(c00, r));
    _mm256_storeu_pd(inv.c[1] + p, _mm256_mul_pd(c01, r));
    _mm256_storeu_pd(inv.c[2] + p, _mm256_mul_pd(c02, r));
    _mm256_storeu_pd(inv.c[3] + p, _mm256_mul_pd(c11, r));
    _mm256_storeu_pd(inv.c[4] + p, _mm256_mul_pd(c12, r));
    _mm256_storeu_pd(inv.c[5] + p, _mm256_mul_pd(c22, r));
  }
  if (p < n) {
    Sym3View tail_in{};
    Sym3Out tail_out{};
    for (int k = 0; k < 6; ++k) {
      tail_in.c[k] = in.c[k] + p;
      tail_out.c[k] = inv.c[k] + p;
    }
    scalar::sym3_inverse(tail_in, tail_out, det + p, n - p);
  }
}

namespace {

inline __m256d stencil(__m256d p1, __m256d m1, __m256d p2, __m256d m2, __m256d eight, __m256d s) {
  return _mm256_mul_pd(_mm256_fmsub_pd(eight, _mm256_sub_pd(p1, m1), _mm256_sub_pd(p2, m2)), s);
}

}  // namespace

void central4(const double* u, double* out, std::array<int, 3> dims, int axis, double inv_12h) {
  std::size_t inner = 1;
  for (int a = axis + 1; a < 3; ++a) inner *= static_cast<std::size_t>(dims[a]);
  std::size_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(dims[a]);
  const int n = dims[axis];
  const std::size_t line = static_cast<std::size_t>(n) * inner;
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d s = _mm256_set1_pd(inv_12h);
  const auto scalar_point = [&](const double* base, double* obase, int i) {
    obase[i] = (8.0 * (base[(i + 1) % n] - base[(i - 1 + n) % n]) -
                (base[(i + 2) % n] - base[(i - 2 + 2 * n) % n])) *
               inv_12h;
  };
  for (std::size_t o = 0; o < outer; ++o) {
    const double* base = u + o * line;
    double* obase = out + o * line;
    if (inner == 1) {
      // Contiguous periodic line: vector interior, wrap-around edges scalar.
      int i = 0;
      for (; i < 2 && i < n; ++i) scalar_point(base, obase, i);
      for (; i + 4 <= n - 2; i += 4) {
        const __m256d r = stencil(_mm256_loadu_pd(base + i + 1), _mm256_loadu_pd(base + i - 1),
                                  _mm256_loadu_pd(base + i + 2), _mm256_loadu_pd(base + i - 2), eight, s);
        _mm256_storeu_pd(obase + i, r);
      }
      for (; i < n; ++i) scalar_point(base, obase, i);
      continue;
    }
    for (int i = 0; i < n; ++i) {
      const double* p1 = base + static_cast<std::size_t>((i + 1) % n) * inner;
      const double* m1 = base + static_cast<std::size_t>((i - 1 + n) % n) * inner;
      const double* p2 = base + static_cast<std::size_t>((i + 2) % n) * inner;
      const double* m2 = base + static_cast<std::size_t>((i - 2 + 2 * n) % n) * inner;
      double* dst = obase + static_cast<std::size_t>(i) * inner;
      std::size_t j = 0;
      for (; j + 4 <= inner; j += 4) {
        const __m256d r = stencil(_mm256_loadu_pd(p1 + j), _mm256_loadu_pd(m1 + j), _mm256_loadu_pd(p2 + j),
                                  _mm256_loadu_pd(m2 + j), eight, s);
        _mm256_storeu_pd(dst + j, r);
      }
      for (; j < inner; ++j) dst[j] = (8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) * inv_12h;
    }
  }
}

double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n) {
  const __m256d m11 = _mm256_set1_pd(m[0]), m22 = _mm256_set1_pd(m[3]), m33 = _mm256_set1_pd(m[5]);
  const __m256d w12 = _mm256_set1_pd(2.0 * m[1]), w13 = _mm256_set1_pd(2.0 * m[2]);
  const __m256d w23 = _mm256_set1_pd(2.0 * m[4]);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d v = _mm256_mul_pd(m11, _mm256_loadu_pd(q.c[0] + j));
    v = _mm256_fmadd_pd(m22, _mm256_loadu_pd(q.c[3] + j), v);
    v = _mm256_fmadd_pd(m33, _mm256_loadu_pd(q.c[5] + j), v);
    v = _mm256_fmadd_pd(w12, _mm256_loadu_pd(q.c[1] + j), v);
    v = _mm256_fmadd_pd(w13, _mm256_loadu_pd(q.c[2] + j), v);
    v = _mm256_fmadd_pd(w23, _mm256_loadu_pd(q.c[4] + j), v);
    best = _mm256_min_pd(best, v);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  if (j < n) {
    Sym3View tail{};
    for (int k = 0; k < 6; ++k) tail.c[k] = q.c[k] + j;
    result = std::min(result, scalar::sym3_frobenius_min(m, tail, n - j));
  }
  return result;
}

}  // namespace grfl::kernels::detail::avx2

#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version picked at runtime from CPUID. The two are
// kept interchangeable up to rounding; tests/test_kernels.cpp holds them to it.

#include <array>
#include <cstddef>
#include <span>

namespace grfl::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
// Best ISA on this CPU, unless GRFL_SIMD=scalar is set in the environment.
Isa detected_isa();
Isa active_isa();
// Throws std::invalid_argument if the CPU lacks the requested ISA.
void set_active_isa(Isa isa);

// y = x + a * k
void axpy_to(std::span<double> y, std::span<const double> x, double a, std::span<const double> k);
// y += a * x
void axpy(std::span<double> y, double a, std::span<const double> x);
// sum_i s[i] * w[i]
double weighted_sum(std::span<const double> s, std::span<const double> w);

// Packed symmetric 3x3 matrices in structure-of-arrays form, component order
// (11, 12, 13, 22, 23, 33).
struct Sym3View {
  std::array<const double*, 6> c;
};
struct Sym3Out {
  std::array<double*, 6> c;
};
// Pointwise inverse (adjugate / det) and determinant for n matrices.
void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n);

// Fourth-order central difference with periodic wrap along `axis` of a
// row-major (n0, n1, n2) array: (8(u+1 - u-1) - (u+2 - u-2)) * inv_12h.
void central4(std::span<const double> u, std::span<double> out, std::array<int, 3> dims, int axis,
              double inv_12h);

// min_j ( m11 q11[j] + m22 q22[j] + m33 q33[j] + 2 (m12 q12[j] + m13 q13[j] + m23 q23[j]) )
// with m the packed symmetric matrix and q a batch of packed matrices (SoA).
double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n);

namespace detail {
// Direct entry points, used for equivalence testing.
namespace scalar {
void axpy_to(double* y, const double* x, double a, const double* k, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
double weighted_sum(const double* s, const double* w, std::size_t n);
void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n);
void central4(const double* u, double* out, std::array<int, 3> dims, int axis, double inv_12h);
double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n);
}  // namespace scalar
namespace avx2 {
void axpy_to(double* y, const double* x, double a, const double* k, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
double weighted_sum(const double* s, const double* w, std::size_t n);
void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n);
void central4(const double* u, double* out, std::array<int, 3> dims, int axis, double inv_12h);
double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n);
}  // namespace avx2
}  // namespace detail

}  // namespace grfl::kernels

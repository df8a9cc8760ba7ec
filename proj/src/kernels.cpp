#include "grfl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace grfl::kernels {

namespace {

bool cpu_has_avx2() {
#if GRFL_HAVE_AVX2
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("GRFL_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

bool use_avx2() {
#if GRFL_HAVE_AVX2
  return active().load(std::memory_order_relaxed) == Isa::avx2;
#else
  return false;
#endif
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa detected_isa() { return initial_isa(); }

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument(std::string("ISA not supported: ") + isa_name(isa));
  active().store(isa);
}

#if GRFL_HAVE_AVX2
#define GRFL_DISPATCH(fn, ...) (use_avx2() ? detail::avx2::fn(__VA_ARGS__) : detail::scalar::fn(__VA_ARGS__))
#else
#define GRFL_DISPATCH(fn, ...) detail::scalar::fn(__VA_ARGS__)
#endif

void axpy_to(std::span<double> y, std::span<const double> x, double a, std::span<const double> k) {
  GRFL_DISPATCH(axpy_to, y.data(), x.data(), a, k.data(), y.size());
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
  GRFL_DISPATCH(axpy, y.data(), a, x.data(), y.size());
}

double weighted_sum(std::span<const double> s, std::span<const double> w) {
  return GRFL_DISPATCH(weighted_sum, s.data(), w.data(), s.size());
}

void sym3_inverse(Sym3View in, Sym3Out inv, double* det, std::size_t n) {
  GRFL_DISPATCH(sym3_inverse, in, inv, det, n);
}

void central4(std::span<const double> u, std::span<double> out, std::array<int, 3> dims, int axis,
              double inv_12h) {
  GRFL_DISPATCH(central4, u.data(), out.data(), dims, axis, inv_12h);
}

double sym3_frobenius_min(const std::array<double, 6>& m, Sym3View q, std::size_t n) {
  return GRFL_DISPATCH(sym3_frobenius_min, m, q, n);
}

#undef GRFL_DISPATCH

}  // namespace grfl::kernels

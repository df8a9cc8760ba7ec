#include "grfl/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace grfl {

int component_count(Symmetry sym) {
  switch (sym) {
    case Symmetry::scalar: return 1;
    case Symmetry::covector: return 3;
    case Symmetry::sym2: return 6;
    case Symmetry::antisym2: return 3;
    case Symmetry::antisym3: return 1;
    case Symmetry::rank3: return 27;
    case Symmetry::rank4: return 81;
  }
  return 0;
}

int rank_of(Symmetry sym) {
  switch (sym) {
    case Symmetry::scalar: return 0;
    case Symmetry::covector: return 1;
    case Symmetry::sym2:
    case Symmetry::antisym2: return 2;
    case Symmetry::antisym3:
    case Symmetry::rank3: return 3;
    case Symmetry::rank4: return 4;
  }
  return 0;
}

Field::Field(Symmetry sym, std::size_t points, double value)
    : sym_(sym), points_(points), data_(static_cast<std::size_t>(component_count(sym)) * points, value) {}

double Field::at(int i, int j, std::size_t p) const {
  switch (sym_) {
    case Symmetry::sym2: return comp(sym_slot(i, j))[p];
    case Symmetry::antisym2: {
      const auto s = antisym_slot(i, j);
      return s.slot < 0 ? 0.0 : s.sign * comp(s.slot)[p];
    }
    default: throw std::logic_error("Field::at needs a rank-2 field");
  }
}

bool Field::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor::Tensor(int rank, std::size_t points, double value)
    : rank_(rank), components_(pow3(rank)), points_(points),
      data_(static_cast<std::size_t>(pow3(rank)) * points, value) {}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void unflatten(int comp, int rank, int* idx) {
  for (int s = rank - 1; s >= 0; --s) {
    idx[s] = comp % 3;
    comp /= 3;
  }
}

Tensor to_dense(const Scalar& s) {
  Tensor t(0, s.size());
  std::copy(s.begin(), s.end(), t.comp(0).begin());
  return t;
}

Tensor to_dense(const Field& f) {
  const std::size_t n = f.points();
  switch (f.symmetry()) {
    case Symmetry::scalar: {
      Tensor t(0, n);
      std::copy(f.comp(0).begin(), f.comp(0).end(), t.comp(0).begin());
      return t;
    }
    case Symmetry::covector: {
      Tensor t(1, n);
      std::copy(f.raw().begin(), f.raw().end(), t.raw().begin());
      return t;
    }
    case Symmetry::sym2: {
      Tensor t(2, n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          auto src = f.comp(sym_slot(i, j));
          std::copy(src.begin(), src.end(), t.comp(idx2(i, j)).begin());
        }
      return t;
    }
    case Symmetry::antisym2: {
      Tensor t(2, n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const auto s = antisym_slot(i, j);
          if (s.slot < 0) continue;
          auto src = f.comp(s.slot);
          auto dst = t.comp(idx2(i, j));
          for (std::size_t p = 0; p < n; ++p) dst[p] = s.sign * src[p];
        }
      return t;
    }
    case Symmetry::antisym3: {
      Tensor t(3, n);
      auto h = f.comp(0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            const double e = levi_civita(i, j, k);
            if (e == 0.0) continue;
            auto dst = t.comp(idx3(i, j, k));
            for (std::size_t p = 0; p < n; ++p) dst[p] = e * h[p];
          }
      return t;
    }
    case Symmetry::rank3:
    case Symmetry::rank4: {
      Tensor t(rank_of(f.symmetry()), n);
      std::copy(f.raw().begin(), f.raw().end(), t.raw().begin());
      return t;
    }
  }
  throw std::logic_error("to_dense: unknown symmetry");
}

Field to_sym2(const Tensor& t) {
  if (t.rank() != 2) throw std::logic_error("to_sym2 needs a rank-2 tensor");
  Field f(Symmetry::sym2, t.points());
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      auto src = t.comp(idx2(i, j));
      std::copy(src.begin(), src.end(), f.comp(sym_slot(i, j)).begin());
    }
  return f;
}

double det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

std::array<double, 3> sym3_eigenvalues(const Mat3& m) {
  // Trigonometric solution of the characteristic cubic.
  const double p1 = m[1] * m[1] + m[2] * m[2] + m[5] * m[5];
  const double q = (m[0] + m[4] + m[8]) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> e{m[0], m[4], m[8]};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (m[0] - q) * (m[0] - q) + (m[4] - q) * (m[4] - q) + (m[8] - q) * (m[8] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b{};
  for (int i = 0; i < 9; ++i) b[i] = m[i] / p;
  b[0] -= q / p;
  b[4] -= q / p;
  b[8] -= q / p;
  const double r = std::clamp(det3(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e3, e2, e1};
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace grfl

#pragma once

// Storage for scalar and tensor fields on a grid. Every component is one
// row-major (x1, x2, x3) array of doubles; components are stored back to back.
//
// Packed orders (these are also the checkpoint orders):
//   sym2      (11, 12, 13, 22, 23, 33)
//   antisym2  (12, 13, 23)
//   antisym3  (123)
// Dense tensors of rank r keep all 3^r components with the first index
// slowest: component (i0, ..., i_{r-1}) lives at sum_s i_s * 3^(r-1-s).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace grfl {

using Scalar = std::vector<double>;

enum class Symmetry { scalar, covector, sym2, antisym2, antisym3, rank3, rank4 };

int component_count(Symmetry sym);
int rank_of(Symmetry sym);

// sym2 packed slot of (i, j), either order.
constexpr int sym_slot(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

struct AntisymSlot {
  int slot;  // -1 on the diagonal
  double sign;
};

// antisym2 packed slot of (i, j) with the sign that maps the stored value to T_ij.
constexpr AntisymSlot antisym_slot(int i, int j) {
  if (i == j) return {-1, 0.0};
  const double sign = i < j ? 1.0 : -1.0;
  const int a = i < j ? i : j;
  const int b = i < j ? j : i;
  const int slot = (a == 0) ? (b == 1 ? 0 : 1) : 2;
  return {slot, sign};
}

// Levi-Civita symbol epsilon_{ijk}.
constexpr double levi_civita(int i, int j, int k) {
  return 0.5 * static_cast<double>((i - j) * (j - k) * (k - i));
}

class Field {
 public:
  Field() = default;
  Field(Symmetry sym, std::size_t points, double value = 0.0);

  Symmetry symmetry() const { return sym_; }
  std::size_t points() const { return points_; }
  int components() const { return component_count(sym_); }

  std::span<double> comp(int c) { return {data_.data() + static_cast<std::size_t>(c) * points_, points_}; }
  std::span<const double> comp(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * points_, points_};
  }
  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  // T_{i j} for sym2/antisym2 fields, expanded from packed storage.
  double at(int i, int j, std::size_t p) const;

  bool all_finite() const;
  bool operator==(const Field& other) const = default;

 private:
  Symmetry sym_ = Symmetry::scalar;
  std::size_t points_ = 0;
  std::vector<double> data_;
};

// Dense rank-r tensor field with all 3^r components stored.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rank, std::size_t points, double value = 0.0);

  int rank() const { return rank_; }
  int components() const { return components_; }
  std::size_t points() const { return points_; }

  std::span<double> comp(int c) { return {data_.data() + static_cast<std::size_t>(c) * points_, points_}; }
  std::span<const double> comp(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * points_, points_};
  }
  double& operator()(int c, std::size_t p) { return data_[static_cast<std::size_t>(c) * points_ + p]; }
  double operator()(int c, std::size_t p) const { return data_[static_cast<std::size_t>(c) * points_ + p]; }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  bool all_finite() const;

 private:
  int rank_ = 0;
  int components_ = 1;
  std::size_t points_ = 0;
  std::vector<double> data_;
};

constexpr int pow3(int r) {
  int v = 1;
  for (int i = 0; i < r; ++i) v *= 3;
  return v;
}

constexpr int idx2(int i, int j) { return 3 * i + j; }
constexpr int idx3(int i, int j, int k) { return 9 * i + 3 * j + k; }
constexpr int idx4(int i, int j, int k, int l) { return 27 * i + 9 * j + 3 * k + l; }

// Decompose a dense component number into its index tuple.
void unflatten(int comp, int rank, int* idx);

// Expand packed storage into a dense tensor (scalar -> rank 0, covector -> 1,
// sym2/antisym2 -> 2, antisym3 -> 3 via the Levi-Civita symbol).
Tensor to_dense(const Field& f);
Tensor to_dense(const Scalar& s);
// Pack the symmetric part (i <= j components are read directly).
Field to_sym2(const Tensor& t);

// Small pointwise helpers.
using Mat3 = std::array<double, 9>;

inline Mat3 sym2_at(const Field& g, std::size_t p) {
  const double a = g.comp(0)[p], b = g.comp(1)[p], c = g.comp(2)[p];
  const double d = g.comp(3)[p], e = g.comp(4)[p], f = g.comp(5)[p];
  return {a, b, c, b, d, e, c, e, f};
}

double det3(const Mat3& m);
// Eigenvalues of a symmetric 3x3 matrix in ascending order.
std::array<double, 3> sym3_eigenvalues(const Mat3& m);

}  // namespace grfl

#pragma once

// Levi-Civita connection and curvature of a metric on the lattice.
//
// Index conventions (one place, used everywhere):
//   Gamma^k_ij         = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), stored [k][i][j]
//   R^k_ijl            = d_i Gamma^k_jl - d_j Gamma^k_il + Gamma^k_ip Gamma^p_jl - Gamma^k_jp Gamma^p_il,
//                        stored [k][i][j][l]
//   R_ijkl             = g_kp R^p_ijl
//   R_ik               = g^jl R_ijkl,  R = g^ij R_ij
// With these a round sphere has R_ijkl = K (g_ik g_jl - g_il g_jk) and positive Ricci.
// Covariant derivatives put the new index first: (nabla T)_{m a1..ar} = nabla_m T_{a1..ar}.

#include <memory>
#include <mutex>
#include <utility>

#include "grfl/field.hpp"
#include "grfl/mesh.hpp"

namespace grfl {

inline constexpr double kDetFloor = 1e-8;

// Pointwise determinant, and positive-definiteness (leading minors > 0, det >= floor).
Scalar metric_det(const Field& g);
// Throws NonSPDMetric at the first failing point.
void require_spd(const Field& g, double det_floor = kDetFloor);

Field inverse_metric(const Field& g, double det_floor = kDetFloor);

Tensor christoffel(const Grid& grid, const Field& g, const Field& g_inv);
Tensor christoffel(const Grid& grid, const Field& g);

struct Riemann {
  Tensor up;    // R^k_ijl
  Tensor down;  // R_ijkl
};
Riemann riemann(const Grid& grid, const Field& g, const Tensor& gamma);

std::pair<Field, Scalar> ricci_and_scalar(const Tensor& riemann_down, const Field& g_inv);

// d_i d_j f - Gamma^k_ij d_k f
Field covariant_hessian(const Grid& grid, const Scalar& f, const Tensor& gamma);
Scalar laplacian(const Grid& grid, const Scalar& f, const Field& g_inv, const Tensor& gamma);

// B_ijkl = g^pr g^qs R_piqj R_rksl
Tensor quad_b(const Tensor& riemann_down, const Field& g_inv);

class CurvatureBundle {
 public:
  CurvatureBundle(const Grid& grid, const Field& g);

  const Field& g() const { return g_; }
  const Field& g_inv() const { return g_inv_; }
  const Scalar& det() const { return det_; }
  const Scalar& sqrt_det() const { return sqrt_det_; }
  const Tensor& gamma() const { return gamma_; }
  const Tensor& riemann_up() const { return riem_.up; }
  const Tensor& riemann_down() const { return riem_.down; }
  const Field& ricci() const { return ricci_; }
  const Scalar& scalar() const { return scalar_; }
  // Computed on first use.
  const Tensor& quad_b() const;

 private:
  Field g_;
  Field g_inv_;
  Scalar det_;
  Scalar sqrt_det_;
  Tensor gamma_;
  Riemann riem_;
  Field ricci_;
  Scalar scalar_;
  struct Lazy {
    std::once_flag once;
    Tensor value;
  };
  std::shared_ptr<Lazy> quad_ = std::make_shared<Lazy>();
};

// Generic tensor calculus on fully covariant dense tensors.
Tensor covariant_derivative(const Grid& grid, const Tensor& t, const Tensor& gamma);
// g^{ab} nabla_a nabla_b T
Tensor tensor_laplacian(const Grid& grid, const Tensor& t, const Tensor& gamma, const Field& g_inv);
// g^{ab} T_{..a..b..} over slots a < b; result has rank r - 2.
Tensor contract(const Tensor& t, const Field& g_inv, int slot_a, int slot_b);
// Contract T against S on one slot each with the inverse metric:
// g^{ab} T_{..a..} S_{..b..}, free indices of T first, then those of S.
Tensor contract_pair(const Tensor& t, int slot_t, const Tensor& s, int slot_s, const Field& g_inv);
// Pointwise <T, S> with every index of S raised by g_inv, and |T|^2 = <T, T>.
Scalar inner_product(const Tensor& t, const Tensor& s, const Field& g_inv);
Scalar norm_sq(const Tensor& t, const Field& g_inv);
// Pointwise metric norms assembled into L-infinity and weighted L2.
struct TensorNorms {
  double linf = 0.0;
  double l2 = 0.0;
};
TensorNorms tensor_norms(const Grid& grid, const Tensor& t, const Field& g_inv, const Scalar& sqrt_det);

// a * x + b * y, component-wise.
Tensor lincomb(double a, const Tensor& x, double b, const Tensor& y);
// Slot permutation: out_{a_0 .. a_{r-1}} = t_{a_perm[0] .. a_perm[r-1]}.
Tensor permute(const Tensor& t, const std::array<int, 6>& perm);
// Symmetric rank-2 field as a dense tensor and back, or a scalar as rank 0.
inline Tensor dense(const Field& f) { return to_dense(f); }

}  // namespace grfl

#pragma once

// Maxwell potential A (covector) and B-field (2-form), their strengths
// F = dA and H = dB, and the stress contractions that drive the metric.

#include "grfl/field.hpp"
#include "grfl/mesh.hpp"

namespace grfl {

// F_ij = d_i A_j - d_j A_i, packed (12, 13, 23).
Field field_strength_F(const Grid& grid, const Field& A);
// H_123 = d_1 B_23 + d_2 B_31 + d_3 B_12.
Field field_strength_H(const Grid& grid, const Field& B);

struct MatterBundle {
  Field F;         // antisym2
  Field H;         // antisym3
  Field stress_F;  // F_ia g^ab F_jb
  Field stress_H;  // H_ikl H_j^kl
  Scalar F2;       // F_ij F^ij
  Scalar H2;       // H_ijk H^ijk
};

MatterBundle contractions(const Field& F, const Field& H, const Field& g_inv);
MatterBundle matter_bundle(const Grid& grid, const Field& A, const Field& B, const Field& g_inv);

// nabla_k F_i^k as a covector.
Field divergence_F(const Grid& grid, const Field& F, const Field& g_inv, const Tensor& gamma);
// nabla_k H^k_ij as a packed 2-form.
Field divergence_H(const Grid& grid, const Field& H, const Field& g_inv, const Tensor& gamma);

// Flat-background Coulomb gauge: remove the longitudinal part of every
// nonzero Fourier mode, using the grid's derivative symbol so the discrete
// divergence vanishes. The constant mode is kept.
Field hodge_project_A(const Grid& grid, const Field& A);
// B' = P B P mode by mode with P = I - k k^T / |k|^2.
Field hodge_project_B(const Grid& grid, const Field& B);

// sum_k d_k A_k, and (sum_k d_k B_ki)_i as a covector.
Scalar flat_divergence_A(const Grid& grid, const Field& A);
Field flat_divergence_B(const Grid& grid, const Field& B);

}  // namespace grfl

#pragma once

// The action
//   S = int e^-f (-chi + R + |grad f|^2 - H^2/12 - F^2/2) dV,
// its closed-form rate under the coupled flow, and the eigenvalue functional
//   lambda = lowest eigenvalue of L = -4 Lap + R - H^2/12 - F^2/2.

#include <array>

#include "grfl/flow.hpp"

namespace grfl {

double action_S(const FlowState& s, double chi);
double action_S(const FlowState& s, double chi, const Snapshot& snap);

struct ActionReport {
  double S = 0.0;
  double dSdt_formula = 0.0;
  // Integrals (with e^-f dV) of
  //   (-chi + R - |grad f|^2 + 2 Lap f - H^2/12 - F^2/2)^2
  //   2 |R_ij + nabla_i nabla_j f - 1/4 S^H_ij - S^F_ij|^2
  //   2 |nabla_k F_i^k - F_i^k nabla_k f|^2
  //   1/2 |nabla_k H^k_ij - H^k_ij nabla_k f|^2
  // with every free index contracted through the metric.
  std::array<double, 4> terms{};
};

ActionReport dS_dt_formula(const FlowState& s, double chi);
ActionReport dS_dt_formula(const FlowState& s, double chi, const Snapshot& snap);

// Pointwise pieces shared with the critical-point residuals.
struct GradientPieces {
  Scalar scalar_eq;  // -chi + R - |grad f|^2 + 2 Lap f - H^2/12 - F^2/2
  Field tensor_eq;   // R_ij + nabla_i nabla_j f - 1/4 S^H - S^F
  Field vector_eq;   // nabla_k F_i^k - F_i^k nabla_k f
  Field form_eq;     // nabla_k H^k_ij - H^k_ij nabla_k f
};
GradientPieces gradient_pieces(const FlowState& s, double chi, const Snapshot& snap, const Scalar& f);

struct LambdaOptions {
  double tol = 1e-10;    // ||L u - lambda u|| <= tol ||u||
  int max_outer = 200;
  int max_inner = 1000;
};

struct SpectralResult {
  double lambda = 0.0;
  Scalar u;  // positive, int u^2 dV = 1
  int iterations = 0;
  double residual = 0.0;
};

// Discretized in symmetric divergence form, A = 4 sum D_i^T (w g^ij) D_j + w V
// with w = sqrt(det g), as the generalized problem A u = lambda w u, solved by
// shifted inverse iteration with preconditioned CG inner solves. On even axes
// the problem is restricted to functions without Nyquist content, where the
// discrete derivatives are injective on nonconstant modes.
SpectralResult lambda_eigen(const FlowState& s, double tol);
SpectralResult lambda_eigen(const FlowState& s, const LambdaOptions& opts);

// The potential R - H^2/12 - F^2/2.
Scalar schrodinger_potential(const Snapshot& snap);
// (L u) pointwise with the discretization above.
Scalar apply_schrodinger(const Grid& grid, const Snapshot& snap, const Scalar& potential, const Scalar& u);
double rayleigh_quotient(const Grid& grid, const Snapshot& snap, const Scalar& potential, const Scalar& u);

// Weights of the three squares in the d lambda/dt integrand
//   c_ric |R_ij + nabla_i nabla_j f - 1/4 S^H - S^F|^2
//   + c_h |nabla_k H^k_ij - H^k_ij nabla_k f|^2 + c_f |nabla_k F_i^k - F_i^k nabla_k f|^2.
struct LambdaRateCoefficients {
  double ricci = 1.0;
  double h = 0.25;
  double f = 1.0;
  // As displayed alongside the monotonicity of lambda.
  static LambdaRateCoefficients printed() { return {1.0, 0.25, 1.0}; }
  // Obtained by differentiating lambda along the plain flow directly.
  static LambdaRateCoefficients first_variation() { return {2.0, 0.5, 2.0}; }
};

// f = -2 log u from the ground state (so that e^-f = u^2 and int e^-f dV = 1).
double dlambda_dt_formula(const FlowState& s, const SpectralResult& ground,
                          LambdaRateCoefficients c = LambdaRateCoefficients::printed());
double dlambda_dt_formula(const FlowState& s, LambdaRateCoefficients c = LambdaRateCoefficients::printed());

}  // namespace grfl

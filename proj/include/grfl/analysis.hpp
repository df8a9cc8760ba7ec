#pragma once

// Certification suites run on a single state snapshot.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "grfl/flow.hpp"

namespace grfl {

struct ResidualReport {
  std::string identity_name;
  double linf = 0.0;
  double l2 = 0.0;
  // L2 norm of the reference quantity (the left-hand side where there is one),
  // for relative statements; 0 when not meaningful.
  double reference_l2 = 0.0;
  double dt_used = 0.0;
  std::array<int, 3> resolution{};

  double relative_l2() const { return reference_l2 > 0.0 ? l2 / reference_l2 : l2; }
};

// ---- principal symbol -------------------------------------------------------

struct EllipticityReport {
  double min_quadratic_form = 0.0;
  long samples = 0;
  double metric_condition_max = 0.0;
  std::uint64_t seed = 0;
};

// min over unit xi in R^{12 x 3} of sum_i sum_kl g^kl xi^i_k xi^i_l, over all
// sample metrics. Half the draws are uniform on the unit sphere of R^36, half
// are rank one (eta (x) zeta with unit eta, zeta), which is where the minimum
// lives; both are valid unit xi.
EllipticityReport symbol_positivity(const std::vector<Mat3>& g_samples, long xi_samples, std::uint64_t seed);

// Random SPD matrices with eigenvalues exp(u), u uniform in +-ln(sqrt(cond_max)),
// and a uniformly random rotation.
std::vector<Mat3> random_spd_metrics(std::size_t count, double cond_max, std::uint64_t seed);

// ---- critical points ----------------------------------------------------------

// Residuals of
//   R_ij + nabla_i nabla_j f - 1/4 S^H - S^F,   nabla_k (F_i^k e^-f),
//   nabla_k (H^k_ij e^-f),   -chi + R + 2 Lap f - |grad f|^2 - H^2/12 - F^2/2.
std::array<ResidualReport, 4> critical_residuals(const FlowState& s, double chi);

// ---- curvature evolution --------------------------------------------------------

enum class CurvatureKind { riemann, ricci, scalar };
const char* curvature_kind_name(CurvatureKind k);

struct CoefficientFit {
  std::string term;
  double printed = 0.0;
  double fitted = 0.0;
};

struct EvolutionReport {
  ResidualReport residual;
  // Least-squares fit of the measured rate minus the pure-curvature terms
  // onto each printed matter term; reported, never used to correct.
  std::vector<CoefficientFit> fits;
};

// Centered difference of the curvature between rk4 probes at t +- dt_probe in
// plain mode, against the closed-form rate. Residual norms use the metric at t.
EvolutionReport verify_curvature_evolution(const FlowState& s, double dt_probe, CurvatureKind which);

struct EvolutionStudy {
  EvolutionReport coarse;  // dt_probe
  EvolutionReport fine;    // dt_probe / 2
  double convergence_factor = 0.0;  // coarse / fine residual (L2)
};
EvolutionStudy curvature_evolution_study(const FlowState& s, double dt_probe, CurvatureKind which);

// ---- structural identities -------------------------------------------------------

// F-Bianchi, H-Bianchi, S^H - H^2 g / 3, and the Riemann symmetries.
std::vector<ResidualReport> structural_identities(const FlowState& s);

// ---- integration by parts ----------------------------------------------------------

struct IbpReport {
  double lhs = 0.0;  // int (Lap f - |grad f|^2)(R - |grad f|^2 + 2 Lap f) e^-f dV
  double rhs = 0.0;  // 2 int nabla_i nabla_j f (nabla^i nabla^j f + R^ij) e^-f dV
  double abs_diff = 0.0;
  double rel_diff = 0.0;
};
IbpReport integration_by_parts_check(const FlowState& s);

}  // namespace grfl

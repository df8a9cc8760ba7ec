#pragma once

// Evolving fields and the three flow systems:
//   plain    dg = -2(Ric - 1/4 S^H - S^F),  dA_i = -nabla_k F_i^k,  dB_ij = nabla_k H^k_ij
//   coupled  the same for (g, A, B), plus
//            df = chi - 2R - 3 Lap f + kappa |grad f|^2 + H^2/3 + 3/2 F^2
//            with kappa = 2 (thm31) or 1 (intro)
//   deturck  dg = -2 Ric + nabla_i V_j + nabla_j V_i + 1/2 S^H + 2 S^F,
//            V_i = g_ik g^jl (Gamma^k_jl - Gamma~^k_jl) against a fixed background
// where S^H_ij = H_ikl H_j^kl and S^F_ij = F_i^k F_jk. f is frozen in plain and deturck.

#include <optional>

#include "grfl/field.hpp"
#include "grfl/geometry.hpp"
#include "grfl/matter.hpp"
#include "grfl/mesh.hpp"

namespace grfl {

enum class FlowMode { plain, coupled, deturck };
enum class FVariant { thm31, intro };
enum class Integrator { euler, rk4 };

const char* mode_name(FlowMode m);
const char* f_variant_name(FVariant v);
const char* integrator_name(Integrator i);

struct FlowState {
  explicit FlowState(Grid grid_);

  Grid grid;
  double t = 0.0;
  Field g;  // sym2
  Field A;  // covector
  Field B;  // antisym2
  Scalar f;
};

// Identity metric, zero potentials and dilaton.
FlowState flat_state(const Grid& grid);

struct FlowParams {
  FlowMode mode = FlowMode::plain;
  double chi = 0.0;
  FVariant f_variant = FVariant::thm31;
  double cfl = 0.2;
  Integrator integrator = Integrator::rk4;
  bool reproject_gauge = false;
  // DeTurck background metric; run() fills it with the initial metric when empty.
  std::optional<Field> background_g;
};

struct Rates {
  Field g;
  Field A;
  Field B;
  Scalar f;  // zeros unless mode == coupled
};

// Everything the right-hand sides and functionals need from one state.
struct Snapshot {
  Snapshot(const FlowState& s);
  CurvatureBundle curv;
  MatterBundle matter;
  Field div_F;  // nabla_k F_i^k
  Field div_H;  // nabla_k H^k_ij
};

Rates rhs_plain(const FlowState& s);
Rates rhs_coupled(const FlowState& s, const FlowParams& params);
Rates rhs_deturck(const FlowState& s, const FlowParams& params);
Rates rhs(const FlowState& s, const FlowParams& params);

Rates rhs_plain(const FlowState& s, const Snapshot& snap);
Rates rhs_coupled(const FlowState& s, const FlowParams& params, const Snapshot& snap);

// V_i = g_ik g^jl (Gamma^k_jl - Gamma~^k_jl)
Field deturck_vector(const Grid& grid, const Field& g, const Field& background_g);

// One explicit step of size dt > 0. Throws StepRejected when the result (or an
// intermediate stage) is not finite or the metric leaves the SPD set.
FlowState step(const FlowState& s, const FlowParams& params, double dt);
// Same update with a signed step; used for centered probes in time.
FlowState probe_step(const FlowState& s, const FlowParams& params, double dt);

// cfl * min(h_a^2) / (6 * max over points of lambda_max(g^-1))
double suggest_dt(const FlowState& s, const FlowParams& params);

// Apply the flat Coulomb gauge to A and B.
void project_gauge(FlowState& s);

}  // namespace grfl

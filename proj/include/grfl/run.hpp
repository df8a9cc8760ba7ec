#pragma once

// Time loop over step() with per-step diagnostics.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grfl/flow.hpp"

namespace grfl {

struct TimeSeriesRow {
  long step = 0;
  double t = 0.0;
  double S = 0.0;
  double dSdt_formula = 0.0;
  double dSdt_finite_difference = 0.0;
  std::optional<double> lambda;
  double integral_F2 = 0.0;
  double integral_H2 = 0.0;
  double integral_R = 0.0;
  double integral_R2 = 0.0;
  double min_det_g = 0.0;
  double max_abs_f = 0.0;
};

TimeSeriesRow diagnostics_row(const FlowState& s, const FlowParams& params, long step, bool with_lambda,
                              double lambda_tol);

// Fill dSdt_finite_difference from the S column: three-point differences on
// the (possibly non-uniform) time grid, one-sided at both ends.
void fill_finite_differences(std::vector<TimeSeriesRow>& rows);

struct RunOptions {
  double t_end = 0.0;
  int cadence = 1;          // rows every `cadence` steps (plus the first and last)
  int cadence_lambda = 10;  // lambda on rows whose step is a multiple of this
  bool compute_lambda = true;
  double lambda_tol = 1e-10;
  // Fixed step instead of suggest_dt (0 = adaptive).
  double fixed_dt = 0.0;
  std::function<void(const FlowState&, const TimeSeriesRow&)> observer;
};

struct RunResult {
  explicit RunResult(FlowState s) : final_state(std::move(s)) {}
  std::vector<TimeSeriesRow> rows;
  FlowState final_state;
  long steps = 0;
  std::optional<std::string> rejection;  // set when a step was rejected
};

// Integrates to t_end; stops early on StepRejected and reports it with the
// partial series. Fills the DeTurck background with the initial metric if unset.
RunResult run(const FlowState& initial, FlowParams params, const RunOptions& opts);

}  // namespace grfl

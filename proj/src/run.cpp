#include "grfl/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grfl/error.hpp"
#include "grfl/functional.hpp"

namespace grfl {

TimeSeriesRow diagnostics_row(const FlowState& s, const FlowParams& params, long step, bool with_lambda,
                              double lambda_tol) {
  const Snapshot snap(s);
  const ActionReport rep = dS_dt_formula(s, params.chi, snap);
  TimeSeriesRow row;
  row.step = step;
  row.t = s.t;
  row.S = rep.S;
  row.dSdt_formula = rep.dSdt_formula;
  const Scalar& R = snap.curv.scalar();
  Scalar R2(R.size());
  for (std::size_t p = 0; p < R.size(); ++p) R2[p] = R[p] * R[p];
  const Scalar& w = snap.curv.sqrt_det();
  row.integral_F2 = integrate_weighted(s.grid, snap.matter.F2, w);
  row.integral_H2 = integrate_weighted(s.grid, snap.matter.H2, w);
  row.integral_R = integrate_weighted(s.grid, R, w);
  row.integral_R2 = integrate_weighted(s.grid, R2, w);
  row.min_det_g = *std::min_element(snap.curv.det().begin(), snap.curv.det().end());
  row.max_abs_f = 0.0;
  for (double v : s.f) row.max_abs_f = std::max(row.max_abs_f, std::abs(v));
  if (with_lambda) row.lambda = lambda_eigen(s, lambda_tol).lambda;
  return row;
}

void fill_finite_differences(std::vector<TimeSeriesRow>& rows) {
  const std::size_t n = rows.size();
  if (n < 2) {
    if (n == 1) rows[0].dSdt_finite_difference = 0.0;
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || k == n - 1) {
      const std::size_t a = k == 0 ? 0 : n - 2, b = a + 1;
      rows[k].dSdt_finite_difference = (rows[b].S - rows[a].S) / (rows[b].t - rows[a].t);
      continue;
    }
    const double h1 = rows[k].t - rows[k - 1].t, h2 = rows[k + 1].t - rows[k].t;
    rows[k].dSdt_finite_difference = -h2 / (h1 * (h1 + h2)) * rows[k - 1].S + (h2 - h1) / (h1 * h2) * rows[k].S +
                                     h1 / (h2 * (h1 + h2)) * rows[k + 1].S;
  }
}

RunResult run(const FlowState& initial, FlowParams params, const RunOptions& opts) {
  if (!(opts.t_end > initial.t)) throw std::invalid_argument("run: t_end must exceed the initial time");
  if (opts.cadence < 1 || opts.cadence_lambda < 1) throw std::invalid_argument("run: cadence must be >= 1");
  if (params.mode == FlowMode::deturck && !params.background_g) params.background_g = initial.g;

  RunResult result(initial);
  FlowState& s = result.final_state;
  // A state can pass step validation (finite fields, SPD metric) and still
  // overflow the weighted integrals, e.g. a dilaton of order 1e3; such rows
  // end the run as rejected instead of entering the series.
  auto record = [&](long step) {
    const bool lam = opts.compute_lambda && step % opts.cadence_lambda == 0;
    TimeSeriesRow row = diagnostics_row(s, params, step, lam, opts.lambda_tol);
    if (!std::isfinite(row.S) || !std::isfinite(row.dSdt_formula)) {
      result.rejection = StepRejected(s.t, "non-finite diagnostics at step " + std::to_string(step)).what();
      return false;
    }
    result.rows.push_back(row);
    if (opts.observer) opts.observer(s, result.rows.back());
    return true;
  };
  if (!record(0)) {
    fill_finite_differences(result.rows);
    return result;
  }
  const double t_tol = 1e-12 * std::max(1.0, std::abs(opts.t_end));
  long k = 0;
  while (s.t < opts.t_end - t_tol) {
    double dt = opts.fixed_dt > 0.0 ? opts.fixed_dt : suggest_dt(s, params);
    if (s.t + dt > opts.t_end - t_tol) dt = opts.t_end - s.t;
    try {
      s = step(s, params, dt);
    } catch (const StepRejected& e) {
      result.rejection = e.what();
      break;
    }
    ++k;
    result.steps = k;
    const bool last = !(s.t < opts.t_end - t_tol);
    if ((k % opts.cadence == 0 || last) && !record(k)) break;
  }
  fill_finite_differences(result.rows);
  return result;
}

}  // namespace grfl

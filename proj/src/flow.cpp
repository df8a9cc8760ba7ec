#include "grfl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "grfl/error.hpp"
#include "grfl/kernels.hpp"

namespace grfl {

const char* mode_name(FlowMode m) {
  switch (m) {
    case FlowMode::plain: return "plain";
    case FlowMode::coupled: return "coupled";
    case FlowMode::deturck: return "deturck";
  }
  return "?";
}

const char* f_variant_name(FVariant v) { return v == FVariant::thm31 ? "thm31" : "intro"; }
const char* integrator_name(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

FlowState::FlowState(Grid grid_)
    : grid(std::move(grid_)),
      g(Symmetry::sym2, grid.points()),
      A(Symmetry::covector, grid.points()),
      B(Symmetry::antisym2, grid.points()),
      f(grid.points(), 0.0) {}

FlowState flat_state(const Grid& grid) {
  FlowState s(grid);
  for (int c : {sym_slot(0, 0), sym_slot(1, 1), sym_slot(2, 2)}) std::fill(s.g.comp(c).begin(), s.g.comp(c).end(), 1.0);
  return s;
}

Snapshot::Snapshot(const FlowState& s)
    : curv(s.grid, s.g),
      matter(matter_bundle(s.grid, s.A, s.B, curv.g_inv())),
      div_F(divergence_F(s.grid, matter.F, curv.g_inv(), curv.gamma())),
      div_H(divergence_H(s.grid, matter.H, curv.g_inv(), curv.gamma())) {}

namespace {

void require_finite(const Field& f, const char* what) {
  if (!f.all_finite()) throw NonFinite(std::string("non-finite ") + what);
}

Rates matter_rates(const FlowState& s, const Snapshot& snap) {
  const std::size_t n = s.grid.points();
  Rates r;
  r.A = Field(Symmetry::covector, n);
  for (int c = 0; c < 3; ++c) {
    auto src = snap.div_F.comp(c);
    auto dst = r.A.comp(c);
    for (std::size_t p = 0; p < n; ++p) dst[p] = -src[p];
  }
  r.B = snap.div_H;
  r.f.assign(n, 0.0);
  return r;
}

// -2 Ric + a S^H + b S^F
Field metric_rate(const Snapshot& snap, double a, double b) {
  const std::size_t n = snap.curv.g().points();
  Field dg(Symmetry::sym2, n);
  for (int c = 0; c < 6; ++c) {
    auto ric = snap.curv.ricci().comp(c);
    auto sh = snap.matter.stress_H.comp(c);
    auto sf = snap.matter.stress_F.comp(c);
    auto out = dg.comp(c);
    for (std::size_t p = 0; p < n; ++p) out[p] = -2.0 * ric[p] + a * sh[p] + b * sf[p];
  }
  return dg;
}

void check_rates(const Rates& r) {
  require_finite(r.g, "metric rate");
  require_finite(r.A, "A rate");
  require_finite(r.B, "B rate");
  for (double v : r.f)
    if (!std::isfinite(v)) throw NonFinite("non-finite dilaton rate");
}

}  // namespace

Rates rhs_plain(const FlowState& s, const Snapshot& snap) {
  Rates r = matter_rates(s, snap);
  r.g = metric_rate(snap, 0.5, 2.0);
  check_rates(r);
  return r;
}

Rates rhs_plain(const FlowState& s) { return rhs_plain(s, Snapshot(s)); }

Rates rhs_coupled(const FlowState& s, const FlowParams& params, const Snapshot& snap) {
  Rates r = rhs_plain(s, snap);
  const std::size_t n = s.grid.points();
  const auto& ginv = snap.curv.g_inv();
  const Scalar lap = laplacian(s.grid, s.f, ginv, snap.curv.gamma());
  const auto df = gradient(s.grid, s.f);
  const double kappa = params.f_variant == FVariant::thm31 ? 2.0 : 1.0;
  for (std::size_t p = 0; p < n; ++p) {
    double grad2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) grad2 += ginv.comp(sym_slot(i, j))[p] * df[i][p] * df[j][p];
    r.f[p] = params.chi - 2.0 * snap.curv.scalar()[p] - 3.0 * lap[p] + kappa * grad2 +
             snap.matter.H2[p] / 3.0 + 1.5 * snap.matter.F2[p];
  }
  check_rates(r);
  return r;
}

Rates rhs_coupled(const FlowState& s, const FlowParams& params) { return rhs_coupled(s, params, Snapshot(s)); }

Field deturck_vector(const Grid& grid, const Field& g, const Field& background_g) {
  const Field ginv = inverse_metric(g);
  const Tensor gam = christoffel(grid, g, ginv);
  const Tensor bg = christoffel(grid, background_g);
  const std::size_t n = grid.points();
  Field V(Symmetry::covector, n);
  for (std::size_t p = 0; p < n; ++p) {
    double w[3] = {0.0, 0.0, 0.0};  // g^jl (Gamma^k_jl - Gamma~^k_jl)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          w[k] += ginv.comp(sym_slot(j, l))[p] * (gam(idx3(k, j, l), p) - bg(idx3(k, j, l), p));
    for (int i = 0; i < 3; ++i) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += g.comp(sym_slot(i, k))[p] * w[k];
      V.comp(i)[p] = v;
    }
  }
  return V;
}

Rates rhs_deturck(const FlowState& s, const FlowParams& params) {
  if (!params.background_g) throw ValidationError("background_g", "DeTurck flow needs a background metric");
  const Snapshot snap(s);
  Rates r = matter_rates(s, snap);
  r.g = metric_rate(snap, 0.5, 2.0);
  const Field V = deturck_vector(s.grid, s.g, *params.background_g);
  const Tensor dV = covariant_derivative(s.grid, to_dense(V), snap.curv.gamma());  // [m][i] = nabla_m V_i
  const std::size_t n = s.grid.points();
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      auto out = r.g.comp(sym_slot(i, j));
      auto a = dV.comp(idx2(i, j));
      auto b = dV.comp(idx2(j, i));
      for (std::size_t p = 0; p < n; ++p) out[p] += a[p] + b[p];
    }
  check_rates(r);
  return r;
}

Rates rhs(const FlowState& s, const FlowParams& params) {
  switch (params.mode) {
    case FlowMode::plain: return rhs_plain(s);
    case FlowMode::coupled: return rhs_coupled(s, params);
    case FlowMode::deturck: return rhs_deturck(s, params);
  }
  throw std::logic_error("unknown flow mode");
}

namespace {

// out = base + a * k, field by field
void add_scaled(FlowState& out, const FlowState& base, double a, const Rates& k) {
  kernels::axpy_to(out.g.raw(), base.g.raw(), a, k.g.raw());
  kernels::axpy_to(out.A.raw(), base.A.raw(), a, k.A.raw());
  kernels::axpy_to(out.B.raw(), base.B.raw(), a, k.B.raw());
  kernels::axpy_to(out.f, base.f, a, k.f);
}

void accumulate(FlowState& out, double a, const Rates& k) {
  kernels::axpy(out.g.raw(), a, k.g.raw());
  kernels::axpy(out.A.raw(), a, k.A.raw());
  kernels::axpy(out.B.raw(), a, k.B.raw());
  kernels::axpy(out.f, a, k.f);
}

Rates stage(const FlowState& s, const FlowParams& params, double t) {
  try {
    return rhs(s, params);
  } catch (const NonSPDMetric& e) {
    throw StepRejected(t, e.what());
  } catch (const NonFinite& e) {
    throw StepRejected(t, e.what());
  }
}

void validate(const FlowState& s) {
  bool finite = s.g.all_finite() && s.A.all_finite() && s.B.all_finite();
  for (double v : s.f) finite = finite && std::isfinite(v);
  if (!finite) throw StepRejected(s.t, "non-finite field after step");
  try {
    require_spd(s.g, kDetFloor);
  } catch (const NonSPDMetric& e) {
    throw StepRejected(s.t, e.what());
  }
}

}  // namespace

FlowState probe_step(const FlowState& s, const FlowParams& params, double dt) {
  FlowState next = s;
  if (params.integrator == Integrator::euler) {
    add_scaled(next, s, dt, stage(s, params, s.t));
  } else {
    FlowState tmp = s;
    const Rates k1 = stage(s, params, s.t);
    add_scaled(tmp, s, 0.5 * dt, k1);
    const Rates k2 = stage(tmp, params, s.t);
    add_scaled(tmp, s, 0.5 * dt, k2);
    const Rates k3 = stage(tmp, params, s.t);
    add_scaled(tmp, s, dt, k3);
    const Rates k4 = stage(tmp, params, s.t);
    accumulate(next, dt / 6.0, k1);
    accumulate(next, dt / 3.0, k2);
    accumulate(next, dt / 3.0, k3);
    accumulate(next, dt / 6.0, k4);
  }
  next.t = s.t + dt;
  if (params.reproject_gauge) project_gauge(next);
  validate(next);
  return next;
}

FlowState step(const FlowState& s, const FlowParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  return probe_step(s, params, dt);
}

double suggest_dt(const FlowState& s, const FlowParams& params) {
  double lam = 0.0;
  for (std::size_t p = 0; p < s.grid.points(); ++p) {
    const auto e = sym3_eigenvalues(sym2_at(s.g, p));
    if (!(e[0] > 0.0)) throw NonSPDMetric(p, det3(sym2_at(s.g, p)));
    lam = std::max(lam, 1.0 / e[0]);
  }
  const auto& h = s.grid.spacing();
  const double h2 = std::min({h[0] * h[0], h[1] * h[1], h[2] * h[2]});
  return params.cfl * h2 / (6.0 * lam);
}

void project_gauge(FlowState& s) {
  s.A = hodge_project_A(s.grid, s.A);
  s.B = hodge_project_B(s.grid, s.B);
}

}  // namespace grfl

#include "grfl/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "grfl/error.hpp"
#include "grfl/functional.hpp"
#include "grfl/kernels.hpp"

namespace grfl {

namespace {

ResidualReport make_report(const std::string& name, const Grid& grid, const Tensor& residual, const Tensor* reference,
                           const CurvatureBundle& cb, double dt = 0.0) {
  ResidualReport r;
  r.identity_name = name;
  const TensorNorms n = tensor_norms(grid, residual, cb.g_inv(), cb.sqrt_det());
  r.linf = n.linf;
  r.l2 = n.l2;
  if (reference) r.reference_l2 = tensor_norms(grid, *reference, cb.g_inv(), cb.sqrt_det()).l2;
  r.dt_used = dt;
  r.resolution = grid.n();
  return r;
}

Tensor scaled(const Tensor& t, const Scalar& w) {
  Tensor out = t;
  for (int c = 0; c < out.components(); ++c) {
    auto d = out.comp(c);
    for (std::size_t p = 0; p < d.size(); ++p) d[p] *= w[p];
  }
  return out;
}

double integral_inner(const Grid& grid, const Tensor& a, const Tensor& b, const CurvatureBundle& cb) {
  return integrate_weighted(grid, inner_product(a, b, cb.g_inv()), cb.sqrt_det());
}

}  // namespace

// ---- principal symbol ----------------------------------------------------------

std::vector<Mat3> random_spd_metrics(std::size_t count, double cond_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double half = 0.5 * std::log(cond_max);
  std::uniform_real_distribution<double> u(-half, half);
  std::normal_distribution<double> nd;
  std::vector<Mat3> out(count);
  for (auto& g : out) {
    double q[4];
    double norm = 0.0;
    for (double& v : q) {
      v = nd(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : q) v /= norm;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    const double rot[9] = {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
                           2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
                           2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
    const double ev[3] = {std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += rot[3 * i + k] * ev[k] * rot[3 * j + k];
        g[3 * i + j] = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) g[3 * j + i] = g[3 * i + j];
  }
  return out;
}

EllipticityReport symbol_positivity(const std::vector<Mat3>& g_samples, long xi_samples, std::uint64_t seed) {
  if (g_samples.empty() || xi_samples < 1) throw std::invalid_argument("symbol_positivity: empty sample set");
  const std::size_t n = g_samples.size();
  std::array<std::vector<double>, 6> ginv;
  for (auto& v : ginv) v.resize(n);
  EllipticityReport rep;
  rep.seed = seed;
  rep.samples = xi_samples;
  for (std::size_t j = 0; j < n; ++j) {
    const Mat3& g = g_samples[j];
    const auto ev = sym3_eigenvalues(g);
    if (!(ev[0] > 0.0)) throw NonSPDMetric(j, det3(g));
    rep.metric_condition_max = std::max(rep.metric_condition_max, ev[2] / ev[0]);
    const double d = det3(g);
    const double inv[6] = {(g[4] * g[8] - g[5] * g[7]) / d, (g[2] * g[7] - g[1] * g[8]) / d,
                           (g[1] * g[5] - g[2] * g[4]) / d, (g[0] * g[8] - g[2] * g[6]) / d,
                           (g[2] * g[3] - g[0] * g[5]) / d, (g[0] * g[4] - g[1] * g[3]) / d};
    for (int c = 0; c < 6; ++c) ginv[c][j] = inv[c];
  }
  kernels::Sym3View q;
  for (int c = 0; c < 6; ++c) q.c[c] = ginv[c].data();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double best = std::numeric_limits<double>::infinity();
  for (long s = 0; s < xi_samples; ++s) {
    // M_kl = sum_i xi^i_k xi^i_l
    std::array<double, 6> m{};
    if (s % 2 == 0) {
      double xi[12][3];
      double norm = 0.0;
      for (auto& row : xi)
        for (double& v : row) {
          v = nd(rng);
          norm += v * v;
        }
      norm = std::sqrt(norm);
      for (int i = 0; i < 12; ++i)
        for (int k = 0; k < 3; ++k)
          for (int l = k; l < 3; ++l) m[sym_slot(k, l)] += xi[i][k] * xi[i][l] / (norm * norm);
    } else {
      // eta (x) zeta with |eta| = |zeta| = 1 gives M = zeta zeta^T
      double zeta[3], norm = 0.0;
      for (int i = 0; i < 12; ++i) (void)nd(rng);  // eta drops out of M
      for (double& v : zeta) {
        v = nd(rng);
        norm += v * v;
      }
      for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l) m[sym_slot(k, l)] = zeta[k] * zeta[l] / norm;
    }
    best = std::min(best, kernels::sym3_frobenius_min(m, q, n));
  }
  rep.min_quadratic_form = best;
  return rep;
}

// ---- critical points --------------------------------------------------------------

std::array<ResidualReport, 4> critical_residuals(const FlowState& s, double chi) {
  const Snapshot snap(s);
  const auto pieces = gradient_pieces(s, chi, snap, s.f);
  Scalar w(s.f.size());
  for (std::size_t p = 0; p < w.size(); ++p) w[p] = std::exp(-s.f[p]);
  const auto& cb = snap.curv;
  return {make_report("critical_metric", s.grid, to_dense(pieces.tensor_eq), nullptr, cb),
          make_report("critical_maxwell", s.grid, scaled(to_dense(pieces.vector_eq), w), nullptr, cb),
          make_report("critical_bfield", s.grid, scaled(to_dense(pieces.form_eq), w), nullptr, cb),
          make_report("critical_dilaton", s.grid, to_dense(pieces.scalar_eq), nullptr, cb)};
}

// ---- curvature evolution -------------------------------------------------------------

const char* curvature_kind_name(CurvatureKind k) {
  switch (k) {
    case CurvatureKind::riemann: return "riemann";
    case CurvatureKind::ricci: return "ricci";
    case CurvatureKind::scalar: return "scalar";
  }
  return "?";
}

namespace {

Tensor curvature_of(const CurvatureBundle& cb, CurvatureKind which) {
  switch (which) {
    case CurvatureKind::riemann: return cb.riemann_down();
    case CurvatureKind::ricci: return to_dense(cb.ricci());
    case CurvatureKind::scalar: return to_dense(cb.scalar());
  }
  throw std::logic_error("curvature_of");
}

// Matter pieces of the closed-form rates for one stress tensor S.
struct MatterTerms {
  Tensor bracket;   // second covariant derivatives of S
  Tensor coupling;  // S times curvature
};

MatterTerms matter_terms(const Grid& grid, const CurvatureBundle& cb, const Field& stress, CurvatureKind which) {
  const std::size_t n = grid.points();
  const Tensor S = to_dense(stress);
  // T[a][b][c][d] = nabla_a nabla_b S_cd
  const Tensor T = covariant_derivative(grid, covariant_derivative(grid, S, cb.gamma()), cb.gamma());
  const Tensor& Rm = cb.riemann_down();
  const Field& gi = cb.g_inv();
  auto G = [&](int a, int b, std::size_t p) { return gi.comp(sym_slot(a, b))[p]; };

  Tensor br4(4, n), cp4(4, n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const int c = idx4(i, j, k, l);
          for (std::size_t p = 0; p < n; ++p) {
            br4(c, p) = T(idx4(i, l, k, j), p) - T(idx4(i, k, j, l), p) - T(idx4(j, l, k, i), p) +
                        T(idx4(j, k, i, l), p);
            double s = 0.0;
            for (int m = 0; m < 3; ++m)
              for (int q = 0; q < 3; ++q)
                s += G(m, q, p) * (S(idx2(k, m), p) * Rm(idx4(i, j, q, l), p) + S(idx2(m, l), p) * Rm(idx4(i, j, k, q), p));
            cp4(c, p) = s;
          }
        }
  if (which == CurvatureKind::riemann) return {std::move(br4), std::move(cp4)};

  const Field ric = cb.ricci();
  if (which == CurvatureKind::ricci) {
    Tensor br2 = contract(br4, gi, 1, 3);
    Tensor cp2(2, n);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (std::size_t p = 0; p < n; ++p) {
          double s = 0.0;
          for (int m = 0; m < 3; ++m)
            for (int q = 0; q < 3; ++q) {
              s += G(m, q, p) * S(idx2(k, m), p) * ric.at(i, q, p);
              for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l)
                  s -= G(m, q, p) * G(j, l, p) * S(idx2(m, l), p) * Rm(idx4(i, j, k, q), p);
            }
          cp2(idx2(i, k), p) = s;
        }
    return {std::move(br2), std::move(cp2)};
  }

  // scalar: g^jl g^ik (T[i][l][k][j] - T[i][k][j][l]) and -<Ric, S>
  Tensor br0(0, n), cp0(0, n);
  for (std::size_t p = 0; p < n; ++p) {
    double b = 0.0, c = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            b += G(j, l, p) * G(i, k, p) * (T(idx4(i, l, k, j), p) - T(idx4(i, k, j, l), p));
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
          for (int q = 0; q < 3; ++q) c -= G(i, a, p) * G(k, q, p) * ric.at(i, k, p) * S(idx2(a, q), p);
    br0(0, p) = b;
    cp0(0, p) = c;
  }
  return {std::move(br0), std::move(cp0)};
}

// Ricci-flow part of the closed-form rate.
Tensor curvature_terms(const Grid& grid, const CurvatureBundle& cb, CurvatureKind which) {
  const std::size_t n = grid.points();
  const Field& gi = cb.g_inv();
  auto G = [&](int a, int b, std::size_t p) { return gi.comp(sym_slot(a, b))[p]; };
  const Tensor& Rm = cb.riemann_down();
  const Field& ric = cb.ricci();
  if (which == CurvatureKind::riemann) {
    Tensor out = tensor_laplacian(grid, Rm, cb.gamma(), gi);
    const Tensor& B = cb.quad_b();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const int c = idx4(i, j, k, l);
            for (std::size_t p = 0; p < n; ++p) {
              double v = 2.0 * (B(idx4(i, j, k, l), p) - B(idx4(i, j, l, k), p) - B(idx4(i, l, j, k), p) +
                                B(idx4(i, k, j, l), p));
              for (int a = 0; a < 3; ++a)
                for (int q = 0; q < 3; ++q)
                  v -= G(a, q, p) * (Rm(idx4(a, j, k, l), p) * ric.at(q, i, p) + Rm(idx4(i, a, k, l), p) * ric.at(q, j, p) +
                                     Rm(idx4(i, j, a, l), p) * ric.at(q, k, p) + Rm(idx4(i, j, k, a), p) * ric.at(q, l, p));
              out(c, p) += v;
            }
          }
    return out;
  }
  if (which == CurvatureKind::ricci) {
    Tensor out = tensor_laplacian(grid, to_dense(ric), cb.gamma(), gi);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (std::size_t p = 0; p < n; ++p) {
          double v = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int r = 0; r < 3; ++r)
              for (int q = 0; q < 3; ++q)
                for (int s = 0; s < 3; ++s)
                  v += 2.0 * G(a, r, p) * G(q, s, p) * Rm(idx4(a, i, q, k), p) * ric.at(r, s, p);
          for (int a = 0; a < 3; ++a)
            for (int q = 0; q < 3; ++q) v -= 2.0 * G(a, q, p) * ric.at(a, i, p) * ric.at(q, k, p);
          out(idx2(i, k), p) += v;
        }
    return out;
  }
  Tensor out(0, n);
  const Scalar lap = laplacian(grid, cb.scalar(), gi, cb.gamma());
  const Scalar ric2 = norm_sq(to_dense(ric), gi);
  for (std::size_t p = 0; p < n; ++p) out(0, p) = lap[p] + 2.0 * ric2[p];
  return out;
}

struct PrintedCoefficients {
  double h_bracket, h_coupling, f_bracket, f_coupling;
};

PrintedCoefficients printed_coefficients(CurvatureKind which) {
  if (which == CurvatureKind::scalar) return {0.5, 0.5, 2.0, 2.0};
  return {0.25, 0.25, 1.0, 1.0};
}

}  // namespace

EvolutionReport verify_curvature_evolution(const FlowState& s, double dt_probe, CurvatureKind which) {
  if (!(dt_probe > 0.0)) throw std::invalid_argument("verify_curvature_evolution: dt_probe must be positive");
  FlowParams plain;
  plain.mode = FlowMode::plain;
  plain.integrator = Integrator::rk4;
  const FlowState sp = probe_step(s, plain, dt_probe);
  const FlowState sm = probe_step(s, plain, -dt_probe);
  const Tensor lhs = lincomb(0.5 / dt_probe, curvature_of(CurvatureBundle(s.grid, sp.g), which), -0.5 / dt_probe,
                             curvature_of(CurvatureBundle(s.grid, sm.g), which));

  const Snapshot snap(s);
  const auto& cb = snap.curv;
  const Tensor curv = curvature_terms(s.grid, cb, which);
  const MatterTerms h = matter_terms(s.grid, cb, snap.matter.stress_H, which);
  const MatterTerms f = matter_terms(s.grid, cb, snap.matter.stress_F, which);
  const PrintedCoefficients pc = printed_coefficients(which);

  Tensor rhs = curv;
  auto add = [&](double a, const Tensor& t) {
    auto o = rhs.raw();
    auto x = t.raw();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * x[i];
  };
  add(pc.h_bracket, h.bracket);
  add(pc.h_coupling, h.coupling);
  add(pc.f_bracket, f.bracket);
  add(pc.f_coupling, f.coupling);

  EvolutionReport rep;
  const std::string name = std::string("evolution_") + curvature_kind_name(which);
  const Tensor diff = lincomb(1.0, lhs, -1.0, rhs);
  rep.residual = make_report(name, s.grid, diff, &lhs, cb, dt_probe);

  // Fit lhs - curv on every matter term that is not identically zero.
  std::vector<std::pair<CoefficientFit, const Tensor*>> basis;
  const double hscale = tensor_norms(s.grid, to_dense(snap.matter.stress_H), cb.g_inv(), cb.sqrt_det()).l2;
  const double fscale = tensor_norms(s.grid, to_dense(snap.matter.stress_F), cb.g_inv(), cb.sqrt_det()).l2;
  if (hscale > 0.0) {
    basis.push_back({{"H_second_derivatives", pc.h_bracket, 0.0}, &h.bracket});
    basis.push_back({{"H_curvature_coupling", pc.h_coupling, 0.0}, &h.coupling});
  }
  if (fscale > 0.0) {
    basis.push_back({{"F_second_derivatives", pc.f_bracket, 0.0}, &f.bracket});
    basis.push_back({{"F_curvature_coupling", pc.f_coupling, 0.0}, &f.coupling});
  }
  // Terms that vanish identically (the H coupling of the Ricci rate, since
  // S^H is pure trace in 3D) carry no information about their coefficient.
  {
    std::vector<double> nrm;
    for (auto& b : basis) nrm.push_back(integral_inner(s.grid, *b.second, *b.second, cb));
    const double top = nrm.empty() ? 0.0 : *std::max_element(nrm.begin(), nrm.end());
    std::vector<std::pair<CoefficientFit, const Tensor*>> kept;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (nrm[i] > 1e-20 * top && nrm[i] > 0.0) kept.push_back(basis[i]);
    basis.swap(kept);
  }
  if (!basis.empty()) {
    const Tensor target = lincomb(1.0, lhs, -1.0, curv);
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b(i) = integral_inner(s.grid, *basis[i].second, target, cb);
      for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = integral_inner(s.grid, *basis[i].second, *basis[j].second, cb);
    }
    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(b);
    for (int i = 0; i < m; ++i) {
      basis[i].first.fitted = x(i);
      rep.fits.push_back(basis[i].first);
    }
  }
  return rep;
}

EvolutionStudy curvature_evolution_study(const FlowState& s, double dt_probe, CurvatureKind which) {
  EvolutionStudy st{verify_curvature_evolution(s, dt_probe, which), verify_curvature_evolution(s, 0.5 * dt_probe, which),
                    0.0};
  st.convergence_factor = st.fine.residual.l2 > 0.0 ? st.coarse.residual.l2 / st.fine.residual.l2
                                                    : std::numeric_limits<double>::infinity();
  return st;
}

// ---- structural identities ---------------------------------------------------------------

std::vector<ResidualReport> structural_identities(const FlowState& s) {
  const Snapshot snap(s);
  const auto& cb = snap.curv;
  const std::size_t n = s.grid.points();
  std::vector<ResidualReport> out;

  const Tensor dF = covariant_derivative(s.grid, to_dense(snap.matter.F), cb.gamma());  // [m][i][j]
  Tensor fb(3, n);
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (std::size_t p = 0; p < n; ++p)
          fb(idx3(m, i, j), p) = dF(idx3(m, i, j), p) + dF(idx3(j, m, i), p) + dF(idx3(i, j, m), p);
  out.push_back(make_report("bianchi_F", s.grid, fb, &dF, cb));

  const Tensor dH = covariant_derivative(s.grid, to_dense(snap.matter.H), cb.gamma());  // [m][i][j][k]
  Tensor hb(4, n);
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (std::size_t p = 0; p < n; ++p)
            hb(idx4(m, i, j, k), p) = dH(idx4(m, i, j, k), p) - dH(idx4(i, m, j, k), p) - dH(idx4(j, i, m, k), p) -
                                      dH(idx4(k, i, j, m), p);
  out.push_back(make_report("bianchi_H", s.grid, hb, &dH, cb));

  Tensor iso = to_dense(snap.matter.stress_H);
  const Tensor gd = to_dense(s.g);
  for (int c = 0; c < 9; ++c)
    for (std::size_t p = 0; p < n; ++p) iso(c, p) -= snap.matter.H2[p] / 3.0 * gd(c, p);
  const Tensor sh = to_dense(snap.matter.stress_H);
  out.push_back(make_report("h_isotropy", s.grid, iso, &sh, cb));

  const Tensor& R = cb.riemann_down();
  Tensor a1(4, n), a2(4, n), ps(4, n), b1(4, n);
  for (int c = 0; c < 81; ++c) {
    int x[4];
    unflatten(c, 4, x);
    const int i = x[0], j = x[1], k = x[2], l = x[3];
    for (std::size_t p = 0; p < n; ++p) {
      const double v = R(c, p);
      a1(c, p) = v + R(idx4(j, i, k, l), p);
      a2(c, p) = v + R(idx4(i, j, l, k), p);
      ps(c, p) = v - R(idx4(k, l, i, j), p);
      b1(c, p) = v + R(idx4(j, k, i, l), p) + R(idx4(k, i, j, l), p);
    }
  }
  out.push_back(make_report("riemann_antisym_first_pair", s.grid, a1, &R, cb));
  out.push_back(make_report("riemann_antisym_second_pair", s.grid, a2, &R, cb));
  out.push_back(make_report("riemann_pair_symmetry", s.grid, ps, &R, cb));
  out.push_back(make_report("riemann_first_bianchi", s.grid, b1, &R, cb));
  return out;
}

// ---- integration by parts ------------------------------------------------------------------

IbpReport integration_by_parts_check(const FlowState& s) {
  const CurvatureBundle cb(s.grid, s.g);
  const std::size_t n = s.grid.points();
  const Field hess = covariant_hessian(s.grid, s.f, cb.gamma());
  const Tensor hd = to_dense(hess);
  const auto df = gradient(s.grid, s.f);
  const auto& gi = cb.g_inv();
  const Scalar hh = norm_sq(hd, gi);
  const Scalar hr = inner_product(hd, to_dense(cb.ricci()), gi);
  Scalar lhs(n), rhs(n);
  for (std::size_t p = 0; p < n; ++p) {
    double lap = 0.0, grad2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        lap += gi.comp(sym_slot(i, j))[p] * hess.comp(sym_slot(i, j))[p];
        grad2 += gi.comp(sym_slot(i, j))[p] * df[i][p] * df[j][p];
      }
    const double w = std::exp(-s.f[p]);
    lhs[p] = (lap - grad2) * (cb.scalar()[p] - grad2 + 2.0 * lap) * w;
    rhs[p] = 2.0 * (hh[p] + hr[p]) * w;
  }
  IbpReport r;
  r.lhs = integrate_weighted(s.grid, lhs, cb.sqrt_det());
  r.rhs = integrate_weighted(s.grid, rhs, cb.sqrt_det());
  r.abs_diff = std::abs(r.lhs - r.rhs);
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.rel_diff = scale > 0.0 ? r.abs_diff / scale : 0.0;
  return r;
}

}  // namespace grfl

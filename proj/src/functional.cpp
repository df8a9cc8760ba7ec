#include "grfl/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grfl/error.hpp"

namespace grfl {

namespace {

double dot_inv(const Field& ginv, std::size_t p, const double* a, const double* b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += ginv.comp(sym_slot(i, j))[p] * a[i] * b[j];
  return s;
}

// |T|^2 for a sym2 or antisym2 field, both indices raised.
double rank2_norm_sq(const Field& t, const Field& ginv, std::size_t p) {
  const Mat3 gi = sym2_at(ginv, p);
  double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = t.at(i, j, p);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double up = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) up += gi[3 * i + a] * gi[3 * j + b] * m[a][b];
      s += m[i][j] * up;
    }
  return s;
}

double covector_norm_sq(const Field& v, const Field& ginv, std::size_t p) {
  const double a[3] = {v.comp(0)[p], v.comp(1)[p], v.comp(2)[p]};
  return dot_inv(ginv, p, a, a);
}

}  // namespace

double action_S(const FlowState& s, double chi, const Snapshot& snap) {
  const std::size_t n = s.grid.points();
  const auto df = gradient(s.grid, s.f);
  const auto& ginv = snap.curv.g_inv();
  Scalar integrand(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double d[3] = {df[0][p], df[1][p], df[2][p]};
    integrand[p] = std::exp(-s.f[p]) * (-chi + snap.curv.scalar()[p] + dot_inv(ginv, p, d, d) -
                                        snap.matter.H2[p] / 12.0 - 0.5 * snap.matter.F2[p]);
  }
  return integrate_weighted(s.grid, integrand, snap.curv.sqrt_det());
}

double action_S(const FlowState& s, double chi) { return action_S(s, chi, Snapshot(s)); }

GradientPieces gradient_pieces(const FlowState& s, double chi, const Snapshot& snap, const Scalar& f) {
  const std::size_t n = s.grid.points();
  const auto& curv = snap.curv;
  const auto& m = snap.matter;
  const auto& ginv = curv.g_inv();
  const Field hess = covariant_hessian(s.grid, f, curv.gamma());
  const auto df = gradient(s.grid, f);

  GradientPieces out;
  out.scalar_eq.resize(n);
  out.tensor_eq = Field(Symmetry::sym2, n);
  out.vector_eq = Field(Symmetry::covector, n);
  out.form_eq = Field(Symmetry::antisym2, n);
  for (std::size_t p = 0; p < n; ++p) {
    const double d[3] = {df[0][p], df[1][p], df[2][p]};
    double lap = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) lap += ginv.comp(sym_slot(i, j))[p] * hess.comp(sym_slot(i, j))[p];
    out.scalar_eq[p] = -chi + curv.scalar()[p] - dot_inv(ginv, p, d, d) + 2.0 * lap - m.H2[p] / 12.0 - 0.5 * m.F2[p];
    for (int c = 0; c < 6; ++c)
      out.tensor_eq.comp(c)[p] =
          curv.ricci().comp(c)[p] + hess.comp(c)[p] - 0.25 * m.stress_H.comp(c)[p] - m.stress_F.comp(c)[p];
    // raised gradient nabla^k f
    double up[3];
    for (int k = 0; k < 3; ++k) {
      up[k] = 0.0;
      for (int l = 0; l < 3; ++l) up[k] += ginv.comp(sym_slot(k, l))[p] * d[l];
    }
    for (int i = 0; i < 3; ++i) {
      double v = snap.div_F.comp(i)[p];
      for (int k = 0; k < 3; ++k) v -= m.F.at(i, k, p) * up[k];
      out.vector_eq.comp(i)[p] = v;
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    const double h = m.H.comp(0)[p];
    for (int sl = 0; sl < 3; ++sl) {
      const int i = pairs[sl][0], j = pairs[sl][1];
      double v = snap.div_H.comp(sl)[p];
      for (int k = 0; k < 3; ++k) v -= h * levi_civita(k, i, j) * up[k];
      out.form_eq.comp(sl)[p] = v;
    }
  }
  return out;
}

ActionReport dS_dt_formula(const FlowState& s, double chi, const Snapshot& snap) {
  const std::size_t n = s.grid.points();
  const auto pieces = gradient_pieces(s, chi, snap, s.f);
  const auto& ginv = snap.curv.g_inv();
  std::array<Scalar, 4> dens;
  for (auto& d : dens) d.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double w = std::exp(-s.f[p]);
    dens[0][p] = w * pieces.scalar_eq[p] * pieces.scalar_eq[p];
    dens[1][p] = w * 2.0 * rank2_norm_sq(pieces.tensor_eq, ginv, p);
    dens[2][p] = w * 2.0 * covector_norm_sq(pieces.vector_eq, ginv, p);
    dens[3][p] = w * 0.5 * rank2_norm_sq(pieces.form_eq, ginv, p);
  }
  ActionReport r;
  r.S = action_S(s, chi, snap);
  for (int k = 0; k < 4; ++k) r.terms[k] = integrate_weighted(s.grid, dens[k], snap.curv.sqrt_det());
  r.dSdt_formula = r.terms[0] + r.terms[1] + r.terms[2] + r.terms[3];
  return r;
}

ActionReport dS_dt_formula(const FlowState& s, double chi) { return dS_dt_formula(s, chi, Snapshot(s)); }

Scalar schrodinger_potential(const Snapshot& snap) {
  const std::size_t n = snap.curv.scalar().size();
  Scalar v(n);
  for (std::size_t p = 0; p < n; ++p)
    v[p] = snap.curv.scalar()[p] - snap.matter.H2[p] / 12.0 - 0.5 * snap.matter.F2[p];
  return v;
}

namespace {

struct Operator {
  const Grid& grid;
  const Field& ginv;
  const Scalar& w;
  const Scalar& potential;

  // A u (not divided by w)
  Scalar apply(const Scalar& u) const {
    const std::size_t n = u.size();
    const auto du = gradient(grid, u);
    Scalar out(n);
    for (std::size_t p = 0; p < n; ++p) out[p] = w[p] * potential[p] * u[p];
    for (int i = 0; i < 3; ++i) {
      Scalar q(n);
      for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += ginv.comp(sym_slot(i, j))[p] * du[j][p];
        q[p] = 4.0 * w[p] * s;
      }
      const Scalar dq = partial(grid, q, i);
      for (std::size_t p = 0; p < n; ++p) out[p] -= dq[p];
    }
    return out;
  }
};

double dot(const Scalar& a, const Scalar& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

// Inverse of the constant-coefficient operator 4 a_ij k_i k_j + c0 in Fourier space.
struct FlatPreconditioner {
  const Grid& grid;
  std::array<double, 6> a;
  double c0;

  Scalar apply(const Scalar& r) const {
    Spectrum spec = forward_transform(grid, r);
    const auto& n = grid.n();
    const int nz = n[2] / 2 + 1;
    std::size_t m = 0;
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        for (int k = 0; k < nz; ++k, ++m) {
          const double kv[3] = {grid.symbol(0)[i], grid.symbol(1)[j], grid.symbol(2)[k]};
          double q = 0.0;
          for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) q += a[sym_slot(x, y)] * kv[x] * kv[y];
          const bool ny = (n[0] % 2 == 0 && 2 * i == n[0]) || (n[1] % 2 == 0 && 2 * j == n[1]) ||
                          (n[2] % 2 == 0 && 2 * k == n[2]);
          spec[m] = ny ? 0.0 : spec[m] / (4.0 * q + c0);
        }
    return inverse_transform(grid, std::move(spec));
  }
};

// Both derivative symbols vanish on the Nyquist planes of an even axis, so
// modes living there carry no kinetic energy and form a cluster of spurious
// eigenvalues near the mean potential. The eigenproblem is posed on their
// complement.
void strip_nyquist(const Grid& grid, Scalar& u) {
  const auto& n = grid.n();
  if (n[0] % 2 && n[1] % 2 && n[2] % 2) return;
  Spectrum spec = forward_transform(grid, u);
  const int nz = n[2] / 2 + 1;
  std::size_t m = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < nz; ++k, ++m) {
        const bool ny = (n[0] % 2 == 0 && 2 * i == n[0]) || (n[1] % 2 == 0 && 2 * j == n[1]) ||
                        (n[2] % 2 == 0 && 2 * k == n[2]);
        if (ny) spec[m] = 0.0;
      }
  u = inverse_transform(grid, std::move(spec));
}

}  // namespace

Scalar apply_schrodinger(const Grid& grid, const Snapshot& snap, const Scalar& potential, const Scalar& u) {
  const Operator op{grid, snap.curv.g_inv(), snap.curv.sqrt_det(), potential};
  Scalar out = op.apply(u);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] /= snap.curv.sqrt_det()[p];
  return out;
}

double rayleigh_quotient(const Grid& grid, const Snapshot& snap, const Scalar& potential, const Scalar& u) {
  const Operator op{grid, snap.curv.g_inv(), snap.curv.sqrt_det(), potential};
  const Scalar au = op.apply(u);
  double num = dot(u, au), den = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) den += snap.curv.sqrt_det()[p] * u[p] * u[p];
  return num / den;
}

SpectralResult lambda_eigen(const FlowState& s, const LambdaOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("lambda_eigen: tol must be positive");
  const Snapshot snap(s);
  const Grid& grid = s.grid;
  const std::size_t n = grid.points();
  const Scalar pot = schrodinger_potential(snap);
  const Scalar& w = snap.curv.sqrt_det();
  const Operator op{grid, snap.curv.g_inv(), w, pot};

  // A + shift W is positive definite once shift > -min V, since -4 Lap >= 0.
  const double vmin = *std::min_element(pot.begin(), pot.end());
  const double shift = 1.0 - vmin;

  FlatPreconditioner pre{grid, {}, 0.0};
  {
    double wsum = 0.0, msum = 0.0;
    std::array<double, 6> a{};
    for (std::size_t p = 0; p < n; ++p) {
      wsum += w[p];
      msum += w[p] * (pot[p] + shift);
      for (int c = 0; c < 6; ++c) a[c] += w[p] * snap.curv.g_inv().comp(c)[p];
    }
    for (int c = 0; c < 6; ++c) a[c] /= static_cast<double>(n);
    pre.a = a;
    pre.c0 = msum / static_cast<double>(n);
    (void)wsum;
  }
  auto apply_shifted = [&](const Scalar& x) {
    Scalar y = op.apply(x);
    for (std::size_t p = 0; p < n; ++p) y[p] += shift * w[p] * x[p];
    strip_nyquist(grid, y);
    return y;
  };
  const double inner_tol = std::max(1e-14, 1e-2 * opts.tol);
  auto solve = [&](const Scalar& b, Scalar x) {
    Scalar r = b;
    const Scalar ax = apply_shifted(x);
    for (std::size_t p = 0; p < n; ++p) r[p] -= ax[p];
    const double bnorm = std::sqrt(dot(b, b));
    Scalar z = pre.apply(r);
    Scalar d = z;
    double rz = dot(r, z);
    for (int it = 0; it < opts.max_inner; ++it) {
      if (std::sqrt(dot(r, r)) <= inner_tol * bnorm) break;
      const Scalar ad = apply_shifted(d);
      const double alpha = rz / dot(d, ad);
      for (std::size_t p = 0; p < n; ++p) {
        x[p] += alpha * d[p];
        r[p] -= alpha * ad[p];
      }
      z = pre.apply(r);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t p = 0; p < n; ++p) d[p] = z[p] + beta * d[p];
    }
    return x;
  };
  auto w_normalize = [&](Scalar& u) {
    double m = 0.0;
    for (std::size_t p = 0; p < n; ++p) m += w[p] * u[p] * u[p];
    const double scale = 1.0 / std::sqrt(m * grid.cell_volume());
    const double sum = std::accumulate(u.begin(), u.end(), 0.0);
    for (double& v : u) v *= (sum < 0.0 ? -scale : scale);
  };

  SpectralResult res;
  Scalar u(n, 1.0);
  w_normalize(u);
  for (int it = 1; it <= opts.max_outer; ++it) {
    const Scalar au = op.apply(u);
    double num = dot(u, au), den = 0.0;
    for (std::size_t p = 0; p < n; ++p) den += w[p] * u[p] * u[p];
    const double lam = num / den;
    // residual of the projected problem P (A - lam W) u = 0, measured as L u - lam u
    Scalar res_vec(n);
    for (std::size_t p = 0; p < n; ++p) res_vec[p] = au[p] - lam * w[p] * u[p];
    strip_nyquist(grid, res_vec);
    double rr = 0.0, uu = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double r = res_vec[p] / w[p];
      rr += r * r;
      uu += u[p] * u[p];
    }
    res.lambda = lam;
    res.residual = std::sqrt(rr / uu);
    res.iterations = it;
    if (res.residual <= opts.tol) {
      res.u = u;
      return res;
    }
    Scalar b(n);
    for (std::size_t p = 0; p < n; ++p) b[p] = w[p] * u[p];
    strip_nyquist(grid, b);
    Scalar guess = u;
    for (double& v : guess) v /= (lam + shift);
    u = solve(b, std::move(guess));
    w_normalize(u);
  }
  throw NoConvergence("lambda_eigen: residual " + std::to_string(res.residual) + " after " +
                      std::to_string(opts.max_outer) + " iterations");
}

SpectralResult lambda_eigen(const FlowState& s, double tol) {
  LambdaOptions opts;
  opts.tol = tol;
  return lambda_eigen(s, opts);
}

double dlambda_dt_formula(const FlowState& s, const SpectralResult& ground, LambdaRateCoefficients c) {
  const std::size_t n = s.grid.points();
  Scalar f(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (!(ground.u[p] > 0.0)) throw Error("dlambda_dt_formula: ground state is not positive");
    f[p] = -2.0 * std::log(ground.u[p]);
  }
  const Snapshot snap(s);
  const auto pieces = gradient_pieces(s, 0.0, snap, f);
  const auto& ginv = snap.curv.g_inv();
  Scalar dens(n);
  for (std::size_t p = 0; p < n; ++p) {
    dens[p] = std::exp(-f[p]) * (c.ricci * rank2_norm_sq(pieces.tensor_eq, ginv, p) +
                                 c.h * rank2_norm_sq(pieces.form_eq, ginv, p) +
                                 c.f * covector_norm_sq(pieces.vector_eq, ginv, p));
  }
  return integrate_weighted(s.grid, dens, snap.curv.sqrt_det());
}

double dlambda_dt_formula(const FlowState& s, LambdaRateCoefficients c) {
  return dlambda_dt_formula(s, lambda_eigen(s, LambdaOptions{}), c);
}

}  // namespace grfl

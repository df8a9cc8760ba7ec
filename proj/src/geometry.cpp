#include "grfl/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "grfl/error.hpp"
#include "grfl/kernels.hpp"
#include "grfl/parallel.hpp"

namespace grfl {

namespace {

kernels::Sym3View view(const Field& g) {
  kernels::Sym3View v;
  for (int c = 0; c < 6; ++c) v.c[c] = g.comp(c).data();
  return v;
}

kernels::Sym3Out out_view(Field& g) {
  kernels::Sym3Out v;
  for (int c = 0; c < 6; ++c) v.c[c] = g.comp(c).data();
  return v;
}

int flat_index(const int* idx, int rank) {
  int c = 0;
  for (int s = 0; s < rank; ++s) c = 3 * c + idx[s];
  return c;
}

}  // namespace

Scalar metric_det(const Field& g) {
  const std::size_t n = g.points();
  Scalar det(n);
  for (std::size_t p = 0; p < n; ++p) det[p] = det3(sym2_at(g, p));
  return det;
}

void require_spd(const Field& g, double det_floor) {
  const std::size_t n = g.points();
  for (std::size_t p = 0; p < n; ++p) {
    const Mat3 m = sym2_at(g, p);
    const double d = det3(m);
    const bool finite = std::isfinite(d);
    if (!finite || !(m[0] > 0.0) || !(m[0] * m[4] - m[1] * m[1] > 0.0) || !(d >= det_floor))
      throw NonSPDMetric(p, d);
  }
}

Field inverse_metric(const Field& g, double det_floor) {
  require_spd(g, det_floor);
  Field inv(Symmetry::sym2, g.points());
  Scalar det(g.points());
  kernels::sym3_inverse(view(g), out_view(inv), det.data(), g.points());
  return inv;
}

Tensor christoffel(const Grid& grid, const Field& g, const Field& g_inv) {
  const std::size_t n = grid.points();
  std::array<std::array<Scalar, 3>, 6> dg;
  parallel_for(6, [&](std::size_t c) { dg[c] = gradient(grid, g.comp(static_cast<int>(c))); });

  Tensor gamma(3, n);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      // lowered symbols Gamma_{l ij}
      std::array<Scalar, 3> low;
      for (int l = 0; l < 3; ++l) {
        low[l].resize(n);
        const auto& a = dg[sym_slot(j, l)][i];
        const auto& b = dg[sym_slot(i, l)][j];
        const auto& c = dg[sym_slot(i, j)][l];
        for (std::size_t p = 0; p < n; ++p) low[l][p] = 0.5 * (a[p] + b[p] - c[p]);
      }
      for (int k = 0; k < 3; ++k) {
        auto out = gamma.comp(idx3(k, i, j));
        auto g0 = g_inv.comp(sym_slot(k, 0)), g1 = g_inv.comp(sym_slot(k, 1)), g2 = g_inv.comp(sym_slot(k, 2));
        for (std::size_t p = 0; p < n; ++p) out[p] = g0[p] * low[0][p] + g1[p] * low[1][p] + g2[p] * low[2][p];
        if (i != j) std::copy(out.begin(), out.end(), gamma.comp(idx3(k, j, i)).begin());
      }
    }
  return gamma;
}

Tensor christoffel(const Grid& grid, const Field& g) { return christoffel(grid, g, inverse_metric(g)); }

Riemann riemann(const Grid& grid, const Field& g, const Tensor& gamma) {
  const std::size_t n = grid.points();
  // dG[k][j][l][m] = d_m Gamma^k_jl, computed for j <= l
  std::vector<std::array<Scalar, 3>> dgam(27);
  std::vector<int> todo;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int l = j; l < 3; ++l) todo.push_back(idx3(k, j, l));
  parallel_for(todo.size(), [&](std::size_t t) { dgam[todo[t]] = gradient(grid, gamma.comp(todo[t])); });
  auto d = [&](int k, int j, int l, int m) -> const Scalar& {
    return j <= l ? dgam[idx3(k, j, l)][m] : dgam[idx3(k, l, j)][m];
  };

  Riemann r{Tensor(4, n), Tensor(4, n)};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          auto out = r.up.comp(idx4(k, i, j, l));
          if (i == j) continue;  // antisymmetric in (i, j)
          const auto& a = d(k, j, l, i);
          const auto& b = d(k, i, l, j);
          for (std::size_t p = 0; p < n; ++p) out[p] = a[p] - b[p];
          for (int q = 0; q < 3; ++q) {
            auto g1 = gamma.comp(idx3(k, i, q)), g2 = gamma.comp(idx3(q, j, l));
            auto g3 = gamma.comp(idx3(k, j, q)), g4 = gamma.comp(idx3(q, i, l));
            for (std::size_t p = 0; p < n; ++p) out[p] += g1[p] * g2[p] - g3[p] * g4[p];
          }
        }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          auto out = r.down.comp(idx4(i, j, k, l));
          for (int q = 0; q < 3; ++q) {
            auto gk = g.comp(sym_slot(k, q));
            auto u = r.up.comp(idx4(q, i, j, l));
            for (std::size_t p = 0; p < n; ++p) out[p] += gk[p] * u[p];
          }
        }
  return r;
}

std::pair<Field, Scalar> ricci_and_scalar(const Tensor& riemann_down, const Field& g_inv) {
  const std::size_t n = g_inv.points();
  Field ric(Symmetry::sym2, n);
  for (int i = 0; i < 3; ++i)
    for (int k = i; k < 3; ++k) {
      auto out = ric.comp(sym_slot(i, k));
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          auto gi = g_inv.comp(sym_slot(j, l));
          auto rr = riemann_down.comp(idx4(i, j, k, l));
          for (std::size_t p = 0; p < n; ++p) out[p] += gi[p] * rr[p];
        }
    }
  Scalar s(n, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      auto gi = g_inv.comp(sym_slot(i, k));
      auto rr = ric.comp(sym_slot(i, k));
      for (std::size_t p = 0; p < n; ++p) s[p] += gi[p] * rr[p];
    }
  return {std::move(ric), std::move(s)};
}

Field covariant_hessian(const Grid& grid, const Scalar& f, const Tensor& gamma) {
  const std::size_t n = grid.points();
  const auto df = gradient(grid, f);
  Field hess(Symmetry::sym2, n);
  for (int i = 0; i < 3; ++i) {
    const auto ddf = gradient(grid, df[i]);
    for (int j = i; j < 3; ++j) {
      auto out = hess.comp(sym_slot(i, j));
      std::copy(ddf[j].begin(), ddf[j].end(), out.begin());
      for (int k = 0; k < 3; ++k) {
        auto gk = gamma.comp(idx3(k, i, j));
        for (std::size_t p = 0; p < n; ++p) out[p] -= gk[p] * df[k][p];
      }
    }
  }
  return hess;
}

Scalar laplacian(const Grid& grid, const Scalar& f, const Field& g_inv, const Tensor& gamma) {
  const Field hess = covariant_hessian(grid, f, gamma);
  const std::size_t n = grid.points();
  Scalar out(n, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto gi = g_inv.comp(sym_slot(i, j));
      auto h = hess.comp(sym_slot(i, j));
      for (std::size_t p = 0; p < n; ++p) out[p] += gi[p] * h[p];
    }
  return out;
}

Tensor quad_b(const Tensor& riemann_down, const Field& g_inv) {
  const std::size_t n = g_inv.points();
  // raised[r][i][s][j] = g^pr g^qs R_piqj
  Tensor half(4, n);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 3; ++i)
      for (int q = 0; q < 3; ++q)
        for (int j = 0; j < 3; ++j) {
          auto out = half.comp(idx4(r, i, q, j));
          for (int p = 0; p < 3; ++p) {
            auto gpr = g_inv.comp(sym_slot(p, r));
            auto rr = riemann_down.comp(idx4(p, i, q, j));
            for (std::size_t x = 0; x < n; ++x) out[x] += gpr[x] * rr[x];
          }
        }
  Tensor raised(4, n);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 3; ++i)
      for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 3; ++j) {
          auto out = raised.comp(idx4(r, i, s, j));
          for (int q = 0; q < 3; ++q) {
            auto gqs = g_inv.comp(sym_slot(q, s));
            auto hh = half.comp(idx4(r, i, q, j));
            for (std::size_t x = 0; x < n; ++x) out[x] += gqs[x] * hh[x];
          }
        }
  Tensor b(4, n);
  parallel_for(81, [&](std::size_t c) {
    int idx[4];
    unflatten(static_cast<int>(c), 4, idx);
    const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    auto out = b.comp(static_cast<int>(c));
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) {
        auto a = raised.comp(idx4(r, i, s, j));
        auto rr = riemann_down.comp(idx4(r, k, s, l));
        for (std::size_t x = 0; x < n; ++x) out[x] += a[x] * rr[x];
      }
  });
  return b;
}

CurvatureBundle::CurvatureBundle(const Grid& grid, const Field& g) : g_(g) {
  g_inv_ = inverse_metric(g_);
  det_ = metric_det(g_);
  sqrt_det_.resize(det_.size());
  for (std::size_t p = 0; p < det_.size(); ++p) sqrt_det_[p] = std::sqrt(det_[p]);
  gamma_ = christoffel(grid, g_, g_inv_);
  riem_ = riemann(grid, g_, gamma_);
  auto [ric, s] = ricci_and_scalar(riem_.down, g_inv_);
  ricci_ = std::move(ric);
  scalar_ = std::move(s);
}

const Tensor& CurvatureBundle::quad_b() const {
  std::call_once(quad_->once, [&] { quad_->value = grfl::quad_b(riem_.down, g_inv_); });
  return quad_->value;
}

Tensor covariant_derivative(const Grid& grid, const Tensor& t, const Tensor& gamma) {
  const int r = t.rank();
  const std::size_t n = t.points();
  Tensor out(r + 1, n);
  parallel_for(static_cast<std::size_t>(t.components()), [&](std::size_t c) {
    const auto grad = gradient(grid, t.comp(static_cast<int>(c)));
    int idx[8];
    unflatten(static_cast<int>(c), r, idx + 1);
    for (int m = 0; m < 3; ++m) {
      idx[0] = m;
      auto dst = out.comp(flat_index(idx, r + 1));
      std::copy(grad[m].begin(), grad[m].end(), dst.begin());
      for (int s = 0; s < r; ++s) {
        int src[8];
        std::copy(idx + 1, idx + 1 + r, src);
        const int a = idx[1 + s];
        for (int p = 0; p < 3; ++p) {
          src[s] = p;
          auto gm = gamma.comp(idx3(p, m, a));
          auto tv = t.comp(flat_index(src, r));
          for (std::size_t x = 0; x < n; ++x) dst[x] -= gm[x] * tv[x];
        }
      }
    }
  });
  return out;
}

Tensor contract(const Tensor& t, const Field& g_inv, int slot_a, int slot_b) {
  const int r = t.rank();
  if (slot_a >= slot_b || slot_b >= r) throw std::invalid_argument("contract: bad slots");
  const std::size_t n = t.points();
  Tensor out(r - 2, n);
  for (int c = 0; c < out.components(); ++c) {
    int free[8];
    unflatten(c, r - 2, free);
    auto dst = out.comp(c);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        int idx[8];
        for (int s = 0, f = 0; s < r; ++s) idx[s] = (s == slot_a) ? p : (s == slot_b) ? q : free[f++];
        auto gi = g_inv.comp(sym_slot(p, q));
        auto tv = t.comp(flat_index(idx, r));
        for (std::size_t x = 0; x < n; ++x) dst[x] += gi[x] * tv[x];
      }
  }
  return out;
}

Tensor contract_pair(const Tensor& t, int slot_t, const Tensor& s, int slot_s, const Field& g_inv) {
  const int rt = t.rank(), rs = s.rank();
  const std::size_t n = t.points();
  Tensor out(rt + rs - 2, n);
  for (int c = 0; c < out.components(); ++c) {
    int free[12];
    unflatten(c, rt + rs - 2, free);
    auto dst = out.comp(c);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        int it[8], is[8];
        for (int a = 0, f = 0; a < rt; ++a) it[a] = (a == slot_t) ? p : free[f++];
        for (int a = 0, f = rt - 1; a < rs; ++a) is[a] = (a == slot_s) ? q : free[f++];
        auto gi = g_inv.comp(sym_slot(p, q));
        auto tv = t.comp(flat_index(it, rt));
        auto sv = s.comp(flat_index(is, rs));
        for (std::size_t x = 0; x < n; ++x) dst[x] += gi[x] * tv[x] * sv[x];
      }
  }
  return out;
}

Tensor tensor_laplacian(const Grid& grid, const Tensor& t, const Tensor& gamma, const Field& g_inv) {
  const Tensor dd = covariant_derivative(grid, covariant_derivative(grid, t, gamma), gamma);
  return contract(dd, g_inv, 0, 1);
}

Scalar norm_sq(const Tensor& t, const Field& g_inv) { return inner_product(t, t, g_inv); }

Scalar inner_product(const Tensor& t, const Tensor& other, const Field& g_inv) {
  const int r = t.rank();
  const std::size_t n = t.points();
  if (other.rank() != r) throw std::invalid_argument("inner_product: rank mismatch");
  Tensor up = other;
  for (int s = 0; s < r; ++s) {
    Tensor next(r, n);
    for (int c = 0; c < up.components(); ++c) {
      int idx[8];
      unflatten(c, r, idx);
      auto dst = next.comp(c);
      const int a = idx[s];
      for (int p = 0; p < 3; ++p) {
        idx[s] = p;
        auto gi = g_inv.comp(sym_slot(a, p));
        auto src = up.comp(flat_index(idx, r));
        for (std::size_t x = 0; x < n; ++x) dst[x] += gi[x] * src[x];
      }
    }
    up = std::move(next);
  }
  Scalar out(n, 0.0);
  for (int c = 0; c < t.components(); ++c) {
    auto a = t.comp(c);
    auto b = up.comp(c);
    for (std::size_t x = 0; x < n; ++x) out[x] += a[x] * b[x];
  }
  return out;
}

TensorNorms tensor_norms(const Grid& grid, const Tensor& t, const Field& g_inv, const Scalar& sqrt_det) {
  const Scalar sq = norm_sq(t, g_inv);
  TensorNorms out;
  for (double v : sq) out.linf = std::max(out.linf, std::sqrt(std::max(v, 0.0)));
  out.l2 = std::sqrt(std::max(integrate_weighted(grid, sq, sqrt_det), 0.0));
  return out;
}

Tensor lincomb(double a, const Tensor& x, double b, const Tensor& y) {
  if (x.rank() != y.rank() || x.points() != y.points()) throw std::invalid_argument("lincomb: shape mismatch");
  Tensor out(x.rank(), x.points());
  auto o = out.raw();
  auto xs = x.raw();
  auto ys = y.raw();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xs[i] + b * ys[i];
  return out;
}

Tensor permute(const Tensor& t, const std::array<int, 6>& perm) {
  const int r = t.rank();
  Tensor out(r, t.points());
  for (int c = 0; c < out.components(); ++c) {
    int a[8], b[8];
    unflatten(c, r, a);
    for (int s = 0; s < r; ++s) b[s] = a[perm[s]];
    auto src = t.comp(flat_index(b, r));
    std::copy(src.begin(), src.end(), out.comp(c).begin());
  }
  return out;
}

}  // namespace grfl

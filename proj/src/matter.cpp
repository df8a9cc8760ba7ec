#include "grfl/matter.hpp"

#include <array>
#include <complex>

#include "grfl/parallel.hpp"

namespace grfl {

Field field_strength_F(const Grid& grid, const Field& A) {
  const std::size_t n = grid.points();
  std::array<std::array<Scalar, 3>, 3> dA;
  parallel_for(3, [&](std::size_t c) { dA[c] = gradient(grid, A.comp(static_cast<int>(c))); });
  Field F(Symmetry::antisym2, n);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int s = 0; s < 3; ++s) {
    const int i = pairs[s][0], j = pairs[s][1];
    auto out = F.comp(s);
    for (std::size_t p = 0; p < n; ++p) out[p] = dA[j][i][p] - dA[i][j][p];
  }
  return F;
}

Field field_strength_H(const Grid& grid, const Field& B) {
  const std::size_t n = grid.points();
  // B_23 is slot 2, B_31 = -B_13 is slot 1 negated, B_12 is slot 0
  const Scalar d1 = partial(grid, B.comp(2), 0);
  const Scalar d2 = partial(grid, B.comp(1), 1);
  const Scalar d3 = partial(grid, B.comp(0), 2);
  Field H(Symmetry::antisym3, n);
  auto h = H.comp(0);
  for (std::size_t p = 0; p < n; ++p) h[p] = d1[p] - d2[p] + d3[p];
  return H;
}

MatterBundle contractions(const Field& F, const Field& H, const Field& g_inv) {
  const std::size_t n = g_inv.points();
  MatterBundle m;
  m.F = F;
  m.H = H;
  m.stress_F = Field(Symmetry::sym2, n);
  m.stress_H = Field(Symmetry::sym2, n);
  m.F2.assign(n, 0.0);
  m.H2.assign(n, 0.0);
  auto h = H.comp(0);
  for (std::size_t p = 0; p < n; ++p) {
    Mat3 gi = sym2_at(g_inv, p);
    double f[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f[i][j] = F.at(i, j, p);
    // F with second index raised
    double fu[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int b = 0; b < 3; ++b) s += f[i][b] * gi[3 * b + j];
        fu[i][j] = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += fu[i][a] * f[j][a];
        m.stress_F.comp(sym_slot(i, j))[p] = s;
      }
    double f2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double up = 0.0;  // F^ij
        for (int a = 0; a < 3; ++a) up += gi[3 * i + a] * fu[a][j];
        f2 += f[i][j] * up;
      }
    m.F2[p] = f2;

    // H_ikl H_j^kl = h^2 eps_ikl eps_jmn g^km g^ln, contracted explicitly
    const double hh = h[p] * h[p];
    double sh[3][3] = {};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const double e1 = levi_civita(i, k, l);
            if (e1 == 0.0) continue;
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) {
                const double e2 = levi_civita(j, a, b);
                if (e2 != 0.0) s += e1 * e2 * gi[3 * k + a] * gi[3 * l + b];
              }
          }
        sh[i][j] = sh[j][i] = hh * s;
        m.stress_H.comp(sym_slot(i, j))[p] = hh * s;
      }
    double h2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h2 += gi[3 * i + j] * sh[i][j];
    m.H2[p] = h2;
  }
  return m;
}

MatterBundle matter_bundle(const Grid& grid, const Field& A, const Field& B, const Field& g_inv) {
  return contractions(field_strength_F(grid, A), field_strength_H(grid, B), g_inv);
}

Field divergence_F(const Grid& grid, const Field& F, const Field& g_inv, const Tensor& gamma) {
  const std::size_t n = grid.points();
  std::array<std::array<Scalar, 3>, 3> dF;  // dF[slot][k]
  parallel_for(3, [&](std::size_t c) { dF[c] = gradient(grid, F.comp(static_cast<int>(c))); });
  Field out(Symmetry::covector, n);
  for (int i = 0; i < 3; ++i) {
    auto dst = out.comp(i);
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double gkl = g_inv.comp(sym_slot(k, l))[p];
          // nabla_k F_il = d_k F_il - Gamma^q_ki F_ql - Gamma^q_kl F_iq
          const auto sl = antisym_slot(i, l);
          double v = sl.slot < 0 ? 0.0 : sl.sign * dF[sl.slot][k][p];
          for (int q = 0; q < 3; ++q)
            v -= gamma(idx3(q, k, i), p) * F.at(q, l, p) + gamma(idx3(q, k, l), p) * F.at(i, q, p);
          s += gkl * v;
        }
      dst[p] = s;
    }
  }
  return out;
}

Field divergence_H(const Grid& grid, const Field& H, const Field& g_inv, const Tensor& gamma) {
  const std::size_t n = grid.points();
  const auto dh = gradient(grid, H.comp(0));
  auto h = H.comp(0);
  Field out(Symmetry::antisym2, n);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int s = 0; s < 3; ++s) {
    const int i = pairs[s][0], j = pairs[s][1];
    auto dst = out.comp(s);
    for (std::size_t p = 0; p < n; ++p) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double gkl = g_inv.comp(sym_slot(k, l))[p];
          // nabla_k H_lij
          double v = levi_civita(l, i, j) * dh[k][p];
          for (int q = 0; q < 3; ++q)
            v -= h[p] * (gamma(idx3(q, k, l), p) * levi_civita(q, i, j) +
                         gamma(idx3(q, k, i), p) * levi_civita(l, q, j) +
                         gamma(idx3(q, k, j), p) * levi_civita(l, i, q));
          sum += gkl * v;
        }
      dst[p] = sum;
    }
  }
  return out;
}

namespace {

// Visit every half-spectrum mode with its symbol vector.
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const auto& n = grid.n();
  const int nz = n[2] / 2 + 1;
  std::size_t m = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < nz; ++k, ++m)
        fn(m, std::array<double, 3>{grid.symbol(0)[i], grid.symbol(1)[j], grid.symbol(2)[k]});
}

}  // namespace

Field hodge_project_A(const Grid& grid, const Field& A) {
  std::array<Spectrum, 3> a;
  for (int c = 0; c < 3; ++c) a[c] = forward_transform(grid, A.comp(c));
  for_each_mode(grid, [&](std::size_t m, const std::array<double, 3>& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    const std::complex<double> dot = (k[0] * a[0][m] + k[1] * a[1][m] + k[2] * a[2][m]) / k2;
    for (int c = 0; c < 3; ++c) a[c][m] -= k[c] * dot;
  });
  Field out(Symmetry::covector, grid.points());
  for (int c = 0; c < 3; ++c) {
    const Scalar v = inverse_transform(grid, std::move(a[c]));
    std::copy(v.begin(), v.end(), out.comp(c).begin());
  }
  return out;
}

Field hodge_project_B(const Grid& grid, const Field& B) {
  std::array<Spectrum, 3> b;
  for (int c = 0; c < 3; ++c) b[c] = forward_transform(grid, B.comp(c));
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for_each_mode(grid, [&](std::size_t m, const std::array<double, 3>& k) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    std::complex<double> mat[3][3] = {};
    for (int s = 0; s < 3; ++s) {
      mat[pairs[s][0]][pairs[s][1]] = b[s][m];
      mat[pairs[s][1]][pairs[s][0]] = -b[s][m];
    }
    double proj[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) proj[i][j] = (i == j ? 1.0 : 0.0) - k[i] * k[j] / k2;
    std::complex<double> tmp[3][3] = {};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) tmp[i][j] += proj[i][q] * mat[q][j];
    for (int s = 0; s < 3; ++s) {
      const int i = pairs[s][0], j = pairs[s][1];
      std::complex<double> v = 0.0;
      for (int q = 0; q < 3; ++q) v += tmp[i][q] * proj[q][j];
      b[s][m] = v;
    }
  });
  Field out(Symmetry::antisym2, grid.points());
  for (int c = 0; c < 3; ++c) {
    const Scalar v = inverse_transform(grid, std::move(b[c]));
    std::copy(v.begin(), v.end(), out.comp(c).begin());
  }
  return out;
}

Scalar flat_divergence_A(const Grid& grid, const Field& A) {
  Scalar div(grid.points(), 0.0);
  for (int c = 0; c < 3; ++c) {
    const Scalar d = partial(grid, A.comp(c), c);
    for (std::size_t p = 0; p < div.size(); ++p) div[p] += d[p];
  }
  return div;
}

Field flat_divergence_B(const Grid& grid, const Field& B) {
  const std::size_t n = grid.points();
  Field out(Symmetry::covector, n);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) {
      const auto s = antisym_slot(k, i);
      if (s.slot < 0) continue;
      const Scalar d = partial(grid, B.comp(s.slot), k);
      auto dst = out.comp(i);
      for (std::size_t p = 0; p < n; ++p) dst[p] += s.sign * d[p];
    }
  return out;
}

}  // namespace grfl

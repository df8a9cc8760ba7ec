#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "grfl/functional.hpp"
#include "support.hpp"

using namespace grfl;
using support::two_pi;

namespace {

FlowState perturbed_state(const Grid& grid, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  FlowState s = flat_state(grid);
  s.g = support::perturbed_metric(grid, rng, amp);
  s.A = support::random_field(grid, rng, Symmetry::covector, amp);
  s.B = support::random_field(grid, rng, Symmetry::antisym2, amp);
  s.f = support::random_scalar(grid, rng, amp);
  return s;
}

// A_2 = c sin(2 pi x) / 2 pi, A_3 = -c cos(2 pi x) / 2 pi: F_12^2 + F_13^2 = c^2, F^2 = 2 c^2.
void constant_field_strength(FlowState& s, double c) {
  const Scalar a2 = sample(s.grid, [&](double x, double, double) { return c * std::sin(two_pi * x) / two_pi; });
  const Scalar a3 = sample(s.grid, [&](double x, double, double) { return -c * std::cos(two_pi * x) / two_pi; });
  std::copy(a2.begin(), a2.end(), s.A.comp(1).begin());
  std::copy(a3.begin(), a3.end(), s.A.comp(2).begin());
}

// Spectral first-derivative matrix on n points of a unit period, Nyquist zeroed,
// assembled from the explicit DFT.
Eigen::MatrixXd derivative_matrix(int n) {
  using C = std::complex<double>;
  Eigen::MatrixXcd fwd(n, n), inv(n, n);
  Eigen::VectorXcd sym(n);
  for (int k = 0; k < n; ++k) {
    const int m = k <= n / 2 ? k : k - n;
    sym(k) = (2 * k == n) ? C(0.0) : C(0.0, two_pi * m);
    for (int j = 0; j < n; ++j) {
      fwd(k, j) = std::polar(1.0, -two_pi * k * j / n);
      inv(j, k) = std::polar(1.0 / n, two_pi * k * j / n);
    }
  }
  return (inv * sym.asDiagonal() * fwd).real();
}

// Orthogonal projector onto the one-dimensional modes other than Nyquist.
Eigen::MatrixXd nyquist_free_projector(int n) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  if (n % 2 == 0) {
    // the Nyquist mode is (-1)^j / sqrt(n)
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v(j) = (j % 2 ? -1.0 : 1.0) / std::sqrt(double(n));
    P -= v * v.transpose();
  }
  return P;
}

}  // namespace

TEST_CASE("action examples") {
  const Grid grid = support::cube(16);
  FlowState s = flat_state(grid);
  CHECK(action_S(s, 0.0) == 0.0);
  CHECK(action_S(s, -1.0) == doctest::Approx(1.0).epsilon(1e-14));

  // H_123 = c cos(2 pi z): H^2 = 6 H_123^2, so S = -(1/12) 6 c^2 <cos^2> = -c^2 / 4
  const double c = 0.4;
  const Scalar b12 = sample(grid, [&](double, double, double z) { return c * std::sin(two_pi * z) / two_pi; });
  std::copy(b12.begin(), b12.end(), s.B.comp(0).begin());
  CHECK(action_S(s, 0.0) == doctest::Approx(-c * c / 4.0).epsilon(1e-12));

  FlowState t = flat_state(grid);
  constant_field_strength(t, c);
  CHECK(action_S(t, 0.0) == doctest::Approx(-c * c).epsilon(1e-12));
}

TEST_CASE("dS/dt formula examples") {
  const Grid grid = support::cube(16);
  const FlowState s = flat_state(grid);
  const ActionReport r0 = dS_dt_formula(s, 0.0);
  for (double t : r0.terms) CHECK(t == 0.0);
  CHECK(r0.dSdt_formula == 0.0);

  const ActionReport rc = dS_dt_formula(s, 0.7);
  CHECK(rc.terms[0] == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(rc.terms[1] == 0.0);
  CHECK(rc.terms[2] == 0.0);
  CHECK(rc.terms[3] == 0.0);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FlowState q = perturbed_state(grid, seed, 0.05);
    const ActionReport r = dS_dt_formula(q, 0.3);
    double sum = 0.0;
    for (double t : r.terms) {
      CHECK(t >= -1e-12);
      sum += t;
    }
    CHECK(std::abs(r.dSdt_formula - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    CHECK(r.S == doctest::Approx(action_S(q, 0.3)).epsilon(1e-14));
  }
}

TEST_CASE("dS/dt formula against a centered difference along the coupled flow") {
  const Grid grid = support::cube(16);
  const FlowState s = perturbed_state(grid, 3, 0.05);
  FlowParams p;
  p.mode = FlowMode::coupled;
  p.chi = 0.3;
  const double dt = 1e-5;
  const double fd = (action_S(probe_step(s, p, dt), p.chi) - action_S(probe_step(s, p, -dt), p.chi)) / (2.0 * dt);
  const double formula = dS_dt_formula(s, p.chi).dSdt_formula;
  CHECK(std::abs(formula - fd) <= 1e-3 * std::abs(fd));
}

TEST_CASE("lambda: flat and constant shift") {
  const Grid grid = support::cube(16);
  FlowState s = flat_state(grid);
  const SpectralResult r0 = lambda_eigen(s, 1e-10);
  CHECK(std::abs(r0.lambda) <= 1e-10);
  const double u0 = r0.u[0];
  for (double v : r0.u) CHECK(v == doctest::Approx(u0).epsilon(1e-10));
  CHECK(u0 == doctest::Approx(1.0).epsilon(1e-12));  // unit volume

  const double c = 0.5;
  constant_field_strength(s, c);
  const SpectralResult r1 = lambda_eigen(s, 1e-10);
  CHECK(r1.lambda == doctest::Approx(-c * c).epsilon(1e-10));
  for (double v : r1.u) CHECK(v == doctest::Approx(r1.u[0]).epsilon(1e-10));
}

TEST_CASE("lambda: separable potential against a dense 1-D eigensolve") {
  const int n = 16;
  const Grid grid = support::cube(n);
  FlowState s = flat_state(grid);
  // potential -F^2/2 = -c^2 cos^2(2 pi x), varying in x only
  const double c = 0.8;
  const Scalar a2 = sample(grid, [&](double x, double, double) { return c * std::sin(two_pi * x) / two_pi; });
  std::copy(a2.begin(), a2.end(), s.A.comp(1).begin());
  const SpectralResult r = lambda_eigen(s, 1e-11);

  const Eigen::MatrixXd D = derivative_matrix(n);
  Eigen::MatrixXd M = -4.0 * D * D;
  for (int i = 0; i < n; ++i) M(i, i) += -c * c * std::pow(std::cos(two_pi * i / n), 2);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  CHECK(std::abs(r.lambda - es.eigenvalues()(0)) <= 1e-8);
}

TEST_CASE("lambda: curved metric against a dense generalized eigensolve") {
  const int n = 6;
  const Grid grid = support::cube(n);
  std::mt19937_64 rng(21);
  FlowState s = flat_state(grid);
  s.g = support::perturbed_metric(grid, rng, 0.1);
  s.A = support::random_field(grid, rng, Symmetry::covector, 0.1);
  const Snapshot snap(s);
  const Scalar V = schrodinger_potential(snap);
  const std::size_t N = grid.points();
  const Eigen::MatrixXd D1 = derivative_matrix(n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  auto kron3 = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
    Eigen::MatrixXd out(N, N);
    for (int i = 0; i < n * n * n; ++i)
      for (int j = 0; j < n * n * n; ++j)
        out(i, j) = a(i / (n * n), j / (n * n)) * b((i / n) % n, (j / n) % n) * c(i % n, j % n);
    return out;
  };
  const std::array<Eigen::MatrixXd, 3> D = {kron3(D1, I, I), kron3(I, D1, I), kron3(I, I, D1)};
  const Scalar& w = snap.curv.sqrt_det();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd coef(N);
      for (std::size_t p = 0; p < N; ++p) coef(p) = 4.0 * w[p] * snap.curv.g_inv().comp(sym_slot(i, j))[p];
      A += D[i].transpose() * coef.asDiagonal() * D[j];
    }
  Eigen::VectorXd wv(N);
  for (std::size_t p = 0; p < N; ++p) {
    A(p, p) += w[p] * V[p];
    wv(p) = w[p];
  }
  // restrict to the span of the modes off the Nyquist planes
  const Eigen::MatrixXd P1 = nyquist_free_projector(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(kron3(P1, P1, P1));
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(N); ++i)
    if (pe.eigenvalues()(i) > 0.5) keep.push_back(i);
  Eigen::MatrixXd Q(N, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) Q.col(c) = pe.eigenvectors().col(keep[c]);
  const Eigen::MatrixXd W = wv.asDiagonal();
  const Eigen::MatrixXd Ar = Q.transpose() * (0.5 * (A + A.transpose())) * Q;
  const Eigen::MatrixXd Wr = Q.transpose() * W * Q;
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ar + Ar.transpose()),
                                                                     0.5 * (Wr + Wr.transpose()));
  const SpectralResult r = lambda_eigen(s, 1e-11);
  CHECK(std::abs(r.lambda - es.eigenvalues()(0)) <= 1e-8);
}

TEST_CASE("lambda: ground state properties") {
  const Grid grid = support::cube(16);
  const FlowState s = perturbed_state(grid, 5, 0.05);
  const SpectralResult r = lambda_eigen(s, 1e-10);
  CHECK(r.residual <= 1e-10);
  for (double v : r.u) CHECK(v > 0.0);
  Scalar u2(r.u.size());
  for (std::size_t p = 0; p < u2.size(); ++p) u2[p] = r.u[p] * r.u[p];
  CHECK(integrate_scalar(grid, u2, s.g) == doctest::Approx(1.0).epsilon(1e-12));

  const Snapshot snap(s);
  const Scalar V = schrodinger_potential(snap);
  CHECK(rayleigh_quotient(grid, snap, V, r.u) == doctest::Approx(r.lambda).epsilon(1e-10));
  Scalar u3 = r.u;
  for (double& v : u3) v *= 3.7;
  CHECK(std::abs(rayleigh_quotient(grid, snap, V, u3) - rayleigh_quotient(grid, snap, V, r.u)) <= 1e-13);

  const Scalar Lu = apply_schrodinger(grid, snap, V, r.u);
  double rr = 0.0, uu = 0.0;
  for (std::size_t p = 0; p < Lu.size(); ++p) {
    rr += std::pow(Lu[p] - r.lambda * r.u[p], 2);
    uu += r.u[p] * r.u[p];
  }
  CHECK(std::sqrt(rr / uu) <= 1e-10);

  CHECK_THROWS_AS(lambda_eigen(s, 0.0), std::invalid_argument);
}

TEST_CASE("lambda is gauge invariant") {
  const Grid grid = support::cube(16);
  std::mt19937_64 rng(23);
  FlowState s = perturbed_state(grid, 7, 0.05);
  const double l0 = lambda_eigen(s, 1e-11).lambda;
  const auto da = gradient(grid, support::random_scalar(grid, rng, 0.1));
  const Field dbeta = field_strength_F(grid, support::random_field(grid, rng, Symmetry::covector, 0.1));
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < grid.points(); ++p) {
      s.A.comp(c)[p] += da[c][p];
      s.B.comp(c)[p] += dbeta.comp(c)[p];
    }
  CHECK(std::abs(lambda_eigen(s, 1e-11).lambda - l0) <= 1e-10);
}

TEST_CASE("dlambda/dt") {
  const Grid grid = support::cube(16);
  CHECK(dlambda_dt_formula(flat_state(grid)) == 0.0);

  const FlowState s = perturbed_state(grid, 3, 0.05);
  const SpectralResult ground = lambda_eigen(s, 1e-11);
  const double printed = dlambda_dt_formula(s, ground);
  const double first = dlambda_dt_formula(s, ground, LambdaRateCoefficients::first_variation());
  CHECK(printed >= -1e-12);

  FlowParams p;
  p.mode = FlowMode::coupled;
  const double dt = 1e-5;
  LambdaOptions o;
  o.tol = 1e-11;
  const double fd =
      (lambda_eigen(probe_step(s, p, dt), o).lambda - lambda_eigen(probe_step(s, p, -dt), o).lambda) / (2.0 * dt);
  MESSAGE("dlambda/dt: centered difference " << fd << ", printed weights " << printed << ", first variation " << first);
  CHECK(std::abs(first - fd) <= 0.1 * std::abs(fd));
  // The printed weights give exactly half the measured rate.
  CHECK(printed / fd == doctest::Approx(0.5).epsilon(0.05));
}

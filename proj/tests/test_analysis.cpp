#include <cmath>
#include <random>

#include "doctest.h"
#include "grfl/analysis.hpp"
#include "grfl/error.hpp"
#include "support.hpp"

using namespace grfl;
using support::two_pi;

namespace {

// smallest eigenvalue of g^-1 over the set = 1 / largest eigenvalue of g
double eigen_oracle(const std::vector<Mat3>& gs) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : gs) m = std::min(m, 1.0 / sym3_eigenvalues(g)[2]);
  return m;
}

FlowState metric_state(const Grid& grid, std::uint64_t seed, double amp) {
  std::mt19937_64 rng(seed);
  FlowState s = flat_state(grid);
  s.g = support::perturbed_metric(grid, rng, amp);
  return s;
}

}  // namespace

TEST_CASE("symbol positivity examples") {
  const Mat3 id = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(symbol_positivity({id}, 1000, 1).min_quadratic_form == doctest::Approx(1.0).epsilon(1e-12));
  const Mat3 d = {4, 0, 0, 0, 1, 0, 0, 0, 1};
  const EllipticityReport r = symbol_positivity({d}, 10000, 2);
  CHECK(r.min_quadratic_form >= 0.25 - 1e-12);
  CHECK(r.min_quadratic_form == doctest::Approx(0.25).epsilon(0.01));
  CHECK(r.metric_condition_max == doctest::Approx(4.0));
  CHECK(r.samples == 10000);
  CHECK(r.seed == 2);

  const Mat3 bad = {1, 0, 0, 0, -1, 0, 0, 0, 1};
  CHECK_THROWS_AS(symbol_positivity({id, bad}, 10, 1), NonSPDMetric);
}

TEST_CASE("symbol positivity on random metrics") {
  const auto gs = random_spd_metrics(1000, 100.0, 9);
  double cond = 0.0;
  for (const auto& g : gs) {
    const auto e = sym3_eigenvalues(g);
    CHECK(e[0] > 0.0);
    cond = std::max(cond, e[2] / e[0]);
  }
  CHECK(cond <= 100.0 * (1 + 1e-12));
  const EllipticityReport a = symbol_positivity(gs, 2000, 5), b = symbol_positivity(gs, 2000, 5);
  CHECK(a.min_quadratic_form == b.min_quadratic_form);
  CHECK(a.min_quadratic_form > 0.0);
  const double oracle = eigen_oracle(gs);
  CHECK(a.min_quadratic_form >= oracle * (1 - 1e-12));
  CHECK(a.min_quadratic_form <= oracle * 1.01);
}

TEST_CASE("critical residuals") {
  const Grid grid = support::cube(12);
  const FlowState s = flat_state(grid);
  for (const auto& r : critical_residuals(s, 0.0)) {
    CHECK(r.linf <= 1e-12);
    CHECK(r.resolution == std::array<int, 3>{12, 12, 12});
  }
  const auto r1 = critical_residuals(s, 1.0);
  for (int k = 0; k < 3; ++k) CHECK(r1[k].linf <= 1e-12);
  CHECK(r1[3].linf == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r1[3].l2 == doctest::Approx(1.0).epsilon(1e-12));

  // gauge invariance of the metric, Maxwell and B-field equations
  std::mt19937_64 rng(31);
  FlowState q = metric_state(grid, 30, 0.05);
  q.A = support::random_field(grid, rng, Symmetry::covector, 0.05);
  q.B = support::random_field(grid, rng, Symmetry::antisym2, 0.05);
  q.f = support::random_scalar(grid, rng, 0.05);
  const auto before = critical_residuals(q, 0.2);
  const auto da = gradient(grid, support::random_scalar(grid, rng, 0.1));
  const Field db = field_strength_F(grid, support::random_field(grid, rng, Symmetry::covector, 0.1));
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < grid.points(); ++p) {
      q.A.comp(c)[p] += da[c][p];
      q.B.comp(c)[p] += db.comp(c)[p];
    }
  const auto after = critical_residuals(q, 0.2);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(before[k].linf - after[k].linf) <= 1e-10);
    CHECK(std::abs(before[k].l2 - after[k].l2) <= 1e-10);
  }
}

TEST_CASE("structural identities") {
  const Grid grid = support::cube(16);
  std::mt19937_64 rng(33);
  FlowState s = metric_state(grid, 32, 0.05);
  s.A = support::random_field(grid, rng, Symmetry::covector, 0.1);
  s.B = support::random_field(grid, rng, Symmetry::antisym2, 0.1);
  for (const auto& r : structural_identities(s)) {
    INFO(r.identity_name);
    CHECK(r.linf <= 1e-9);
  }

  // flat metric, constant potentials
  FlowState flat = flat_state(grid);
  std::fill(flat.A.comp(0).begin(), flat.A.comp(0).end(), 0.4);
  std::fill(flat.B.comp(2).begin(), flat.B.comp(2).end(), -0.3);
  for (const auto& r : structural_identities(flat)) CHECK(r.linf <= 1e-13);
}

TEST_CASE("integration by parts") {
  const Grid grid = support::cube(16);
  FlowState s = flat_state(grid);
  s.f.assign(s.f.size(), 0.3);
  const IbpReport r0 = integration_by_parts_check(s);
  CHECK(std::abs(r0.lhs) <= 1e-14);
  CHECK(std::abs(r0.rhs) <= 1e-14);

  // flat, f = 0.1 sin(2 pi x): both sides are one-dimensional integrals
  s.f = sample(grid, [](double x, double, double) { return 0.1 * std::sin(two_pi * x); });
  const IbpReport r1 = integration_by_parts_check(s);
  CHECK(r1.abs_diff <= 1e-8 * std::abs(r1.rhs));
  // direct quadrature of 2 int f''^2 e^-f dx with the same samples
  double direct = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double x = i / 64.0, f = 0.1 * std::sin(two_pi * x), f2 = -0.1 * two_pi * two_pi * std::sin(two_pi * x);
    direct += 2.0 * f2 * f2 * std::exp(-f) / 64.0;
  }
  CHECK(r1.rhs == doctest::Approx(direct).epsilon(1e-10));

  for (std::uint64_t seed : {40u, 41u}) {
    std::mt19937_64 rng(seed);
    FlowState q = metric_state(grid, seed, 0.05);
    q.f = support::random_scalar(grid, rng, 0.2);
    const IbpReport r = integration_by_parts_check(q);
    CHECK(r.rel_diff <= 1e-6);
  }
}

TEST_CASE("curvature evolution: flat state") {
  const Grid grid = support::cube(8);
  for (CurvatureKind k : {CurvatureKind::riemann, CurvatureKind::ricci, CurvatureKind::scalar}) {
    const EvolutionReport r = verify_curvature_evolution(flat_state(grid), 1e-5, k);
    CHECK(r.residual.linf <= 1e-11);
    CHECK(r.residual.dt_used == 1e-5);
    CHECK(r.fits.empty());
  }
  CHECK_THROWS_AS(verify_curvature_evolution(flat_state(grid), 0.0, CurvatureKind::scalar), std::invalid_argument);
}

TEST_CASE("curvature evolution: Ricci-flow limit and matter terms") {
  const Grid grid = support::cube(12);
  const FlowState s = metric_state(grid, 50, 0.01);
  const EvolutionStudy st = curvature_evolution_study(s, 1e-5, CurvatureKind::scalar);
  CHECK(st.coarse.residual.relative_l2() <= 1e-3);
  CHECK(st.convergence_factor >= 3.5);

  std::mt19937_64 rng(51);
  FlowState h = s;
  h.B = support::random_field(grid, rng, Symmetry::antisym2, 0.01);
  const EvolutionStudy sh = curvature_evolution_study(h, 1e-5, CurvatureKind::ricci);
  CHECK(sh.coarse.residual.relative_l2() <= 1e-3);
  CHECK(sh.convergence_factor >= 3.5);
  // the coupling of a pure-trace stress drops out of the Ricci rate
  REQUIRE(sh.coarse.fits.size() == 1);
  CHECK(sh.coarse.fits[0].fitted == doctest::Approx(sh.coarse.fits[0].printed).epsilon(0.01));
}

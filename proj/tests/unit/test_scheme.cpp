#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "apwb/reference.hpp"
#include "apwb/scheme.hpp"
#include "doctest.h"

using namespace apwb;

namespace {

ModelParams params(double eps, double beta, double gamma) {
  ModelParams p;
  p.epsilon = eps;
  p.beta = beta;
  p.gamma = gamma;
  return p;
}

SchemeOptions options(BoundaryKind bc, Reconstruction r = Reconstruction::P) {
  SchemeOptions o;
  o.bc = bc;
  o.reconstruction = r;
  return o;
}

State smooth_state(const Grid& grid, double amp_q = 0.0) {
  State s(grid.n_cells());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = grid.center(static_cast<std::ptrdiff_t>(i));
    s.rho[i] = 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * x);
    s.q[i] = amp_q * std::cos(2.0 * std::numbers::pi * x);
  }
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_SUITE("scheme") {
  TEST_CASE("rusanov flux examples") {
    const ModelParams p = params(1.0, 1.0, 1.4);
    FluxPair f = rusanov_flux({1.0, 0.0}, {1.0, 0.0}, p);
    CHECK(f.f_rho == 0.0);
    CHECK(f.f_conv == 0.0);
    CHECK(f.f_prs == 1.0);

    // Sod pair: a = sqrt(1.4), mass dissipation -(a/2)(0.125 - 1).
    f = rusanov_flux({1.0, 0.0}, {0.125, 0.0}, p);
    CHECK(f.f_rho == doctest::Approx(0.5 * std::sqrt(1.4) * 0.875).epsilon(1e-14));
    CHECK(f.f_rho == doctest::Approx(0.51766).epsilon(1e-5));
    CHECK(f.f_prs == doctest::Approx(0.5 * (1.0 + std::pow(0.125, 1.4))).epsilon(1e-14));
    CHECK(f.f_prs == doctest::Approx(0.52720).epsilon(1e-5));
    CHECK(f.f_conv == 0.0);

    f = rusanov_flux({1.0, 0.5}, {1.0, 0.5}, p);
    CHECK(f.f_rho == 0.5);
    CHECK(f.f_conv == 0.25);
    CHECK(f.f_prs == 1.0);

    CHECK_THROWS_AS(rusanov_flux({std::nan(""), 0.0}, {1.0, 0.0}, p), DomainError);
  }

  TEST_CASE("rusanov flux is consistent on equal states") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rho_d(0.01, 10.0), u_d(-5.0, 5.0), g_d(1.0, 3.0),
        e_d(1e-6, 1.0), b_d(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const ModelParams p = params(e_d(rng), b_d(rng), g_d(rng));
      const double rho = rho_d(rng), u = u_d(rng);
      const FluxPair f = rusanov_flux({rho, u}, {rho, u}, p);
      const double q = rho * u;
      CHECK(std::abs(f.f_rho - q) <= 1e-13 * std::max(1.0, std::abs(q)));
      CHECK(std::abs(f.f_conv - q * u) <= 1e-13 * std::max(1.0, std::abs(q * u)));
      const double prs = std::pow(rho, p.gamma);
      CHECK(std::abs(f.f_prs - prs) <= 1e-13 * std::max(1.0, prs));
    }
  }

  TEST_CASE("cfl_dt examples") {
    const Grid grid(0.0, 1.0, 100);
    const Potential lin = Potential::sample(PotentialKind::Linear, grid);
    CHECK(cfl_dt(grid, lin, params(1e-3, 1.0, 1.4)) == doctest::Approx(4.5e-5).epsilon(1e-12));
    CHECK(cfl_dt(grid, lin, params(1e-2, 0.0, 1.4)) == doctest::Approx(4.5e-3).epsilon(1e-12));

    const Grid coarse(0.0, 1.0, 10);
    CHECK(cfl_dt(coarse, Potential::constant(10), params(1.0, 1.0, 1.4)) ==
          doctest::Approx(4.5e-3).epsilon(1e-12));
  }

  TEST_CASE("cfl_dt is non-increasing in the potential slope and in 1/eps^(1-beta)") {
    const Grid grid(0.0, 1.0, 100);
    double prev = INFINITY;
    for (double slope : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      std::vector<double> s(grid.n_cells() + 2);
      for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = slope * grid.center(static_cast<std::ptrdiff_t>(j) - 1);
      const double dt = cfl_dt(grid, Potential::from_samples(s), params(0.01, 0.0, 1.4));
      CHECK(dt <= prev);
      prev = dt;
    }
    const Potential lin = Potential::sample(PotentialKind::Linear, grid);
    prev = INFINITY;
    for (double eps : {1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0}) {
      const double dt = cfl_dt(grid, lin, params(eps, 0.2, 1.4));
      CHECK(dt <= prev);
      prev = dt;
    }
  }

  TEST_CASE("apply_bc examples") {
    const Grid grid(0.0, 1.0, 3);
    const Potential phi = Potential::constant(3);
    const State s({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    const ModelParams p = params(1.0, 1.0, 1.4);

    GhostExtended e = apply_bc(s, phi, options(BoundaryKind::Periodic), p);
    CHECK(e.rho.front() == 3.0);
    CHECK(e.rho.back() == 1.0);
    e = apply_bc(s, phi, options(BoundaryKind::Extrapolation), p);
    CHECK(e.rho.front() == 1.0);
    CHECK(e.rho.back() == 3.0);

    const Grid g100(0.0, 1.0, 100);
    const Potential lin = Potential::sample(PotentialKind::Linear, g100);
    State eq(100);
    std::fill(eq.rho.begin(), eq.rho.end(), 1.0);
    e = apply_bc(eq, lin, options(BoundaryKind::EquilibriumGhost), p);
    CHECK(e.rho.front() ==
          doctest::Approx(std::pow(1.0 + (0.4 / 1.4) * (-0.005), 2.5)).epsilon(1e-14));
    CHECK(e.q.front() == 0.0);
    CHECK(e.q.back() == 0.0);
  }

  TEST_CASE("constant state with constant potential is bitwise stationary") {
    const Grid grid(0.0, 1.0, 50);
    const Potential phi = Potential::constant(50, 0.7);
    State s(50);
    std::fill(s.rho.begin(), s.rho.end(), 1.3);
    for (double eps : {1.0, 1e-3}) {
      for (auto bc : {BoundaryKind::Extrapolation, BoundaryKind::Periodic}) {
        const ModelParams p = params(eps, 1.0, 1.4);
        const State out = step(s, phi, cfl_dt(grid, phi, p), p, options(bc), grid.dx());
        CHECK(out.rho == s.rho);
        CHECK(out.q == s.q);
      }
    }
  }

  TEST_CASE("discrete equilibria are preserved for 1000 steps") {
    const Grid grid(0.0, 1.0, 100);
    for (auto kind : {PotentialKind::Linear, PotentialKind::Quadratic, PotentialKind::Sinusoidal}) {
      for (double gamma : {1.0, 1.4}) {
        for (double eps : {1.0, 1e-3}) {
          CAPTURE(to_string(kind));
          CAPTURE(gamma);
          CAPTURE(eps);
          const ModelParams p = params(eps, 1.0, gamma);
          const Potential phi = Potential::sample(kind, grid);
          const State s0(build_discrete_equilibrium(phi.interior(), 1.0, p),
                         std::vector<double>(grid.n_cells(), 0.0));
          const double dt = stable_dt(grid, phi, p, s0);
          Stepper stepper(p, options(BoundaryKind::HydrostaticGhost), grid.dx());
          State s = s0;
          for (int k = 0; k < 1000; ++k) stepper.advance(s, phi, dt);
          CHECK(max_abs_diff(s.rho, s0.rho) <= 1e-12);
          CHECK(max_abs(s.q) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("one step is per-step exact at a discrete equilibrium") {
    const Grid grid(0.0, 1.0, 100);
    const ModelParams p = params(1.0, 1.0, 1.4);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    const State s0(build_discrete_equilibrium(phi.interior(), 1.0, p),
                   std::vector<double>(grid.n_cells(), 0.0));
    const State s1 =
        step(s0, phi, cfl_dt(grid, phi, p), p, options(BoundaryKind::HydrostaticGhost), grid.dx());
    CHECK(max_abs_diff(s1.rho, s0.rho) <= 1e-13);
    CHECK(max_abs(s1.q) <= 1e-13);
    CHECK(equilibrium_residual(s1, phi.interior(), p) <= 1e-13);
  }

  TEST_CASE("stiff parabolic limit matches porous_medium_step") {
    const Grid grid(0.0, 1.0, 100);
    const ModelParams p = params(1e-10, 1.0, 1.4);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    const State s = smooth_state(grid);
    const SchemeOptions o = options(BoundaryKind::Periodic);
    const double dt = 1e-4;
    const State out = step(s, phi, dt, p, o, grid.dx());
    const GhostExtended ext = apply_bc(s, phi, o, p);
    const std::vector<double> ref =
        porous_medium_step(ext.rho, phi.samples(), dt, grid.dx(), p.gamma);
    CHECK(max_abs_diff(out.rho, ref) <= 1e-8);
  }

  TEST_CASE("stiff hyperbolic limit matches transport_limit_step") {
    const Grid grid(0.0, 1.0, 100);
    const ModelParams p = params(1e-10, 0.1, 1.4);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    const State s = smooth_state(grid);
    const SchemeOptions o = options(BoundaryKind::Periodic);
    const double dt = 1e-4;
    const State out = step(s, phi, dt, p, o, grid.dx());
    const GhostExtended ext = apply_bc(s, phi, o, p);
    const std::vector<double> ref = transport_limit_step(ext.rho, phi.samples(), dt, grid.dx());
    CHECK(max_abs_diff(out.rho, ref) <= 1e-8);
  }

  TEST_CASE("periodic runs conserve mass over 1e4 steps") {
    const Grid grid(0.0, 1.0, 100);
    const Potential phi = Potential::sample(PotentialKind::Sinusoidal, grid);
    for (double eps : {1.0, 1e-3}) {
      CAPTURE(eps);
      const ModelParams p = params(eps, 1.0, 1.4);
      State s = smooth_state(grid, 0.1);
      const double m0 = std::accumulate(s.rho.begin(), s.rho.end(), 0.0);
      Stepper stepper(p, options(BoundaryKind::Periodic), grid.dx());
      for (int k = 0; k < 10000; ++k) stepper.advance(s, phi, stable_dt(grid, phi, p, s));
      const double m1 = std::accumulate(s.rho.begin(), s.rho.end(), 0.0);
      CHECK(std::abs(m1 - m0) / m0 <= 1e-12);
    }
  }

  TEST_CASE("run with t_final = 0 returns the initial state") {
    const Grid grid(0.0, 1.0, 20);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    const State s = smooth_state(grid, 0.1);
    const RunResult r =
        run(s, grid, phi, 0.0, params(1.0, 1.0, 1.4), options(BoundaryKind::Extrapolation));
    CHECK(r.diagnostics.steps == 0);
    CHECK(r.state.rho == s.rho);
    CHECK(r.state.q == s.q);
  }

  TEST_CASE("run lands on t_final and records the mass trace") {
    const Grid grid(0.0, 1.0, 50);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    const ModelParams p = params(1.0, 1.0, 1.4);
    RunControl control;
    control.diag_stride = 10;
    const RunResult r =
        run(smooth_state(grid), grid, phi, 0.01, p, options(BoundaryKind::Periodic), control);
    REQUIRE(!r.diagnostics.mass_trace.empty());
    CHECK(r.diagnostics.mass_trace.back().t == 0.01);
    CHECK(r.diagnostics.steps ==
          static_cast<std::size_t>(std::ceil(0.01 / cfl_dt(grid, phi, p) - 1e-9)));
    CHECK(r.diagnostics.min_rho > 0.0);
  }

  TEST_CASE("Sod data develops a right-moving shock and an expansion") {
    const Grid grid(0.0, 1.0, 100);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    State s(100);
    for (std::size_t i = 0; i < 100; ++i)
      s.rho[i] = grid.center(static_cast<std::ptrdiff_t>(i)) < 0.5 ? 1.0 : 0.125;
    const RunResult r =
        run(s, grid, phi, 0.2, params(1.0, 1.0, 1.4), options(BoundaryKind::Extrapolation));
    const auto& rho = r.state.rho;
    std::size_t steepest = 0;
    for (std::size_t i = 0; i + 1 < rho.size(); ++i)
      if (rho[i] - rho[i + 1] > rho[steepest] - rho[steepest + 1]) steepest = i;
    // Shock: the sharpest drop sits right of the initial discontinuity.
    CHECK(grid.center(static_cast<std::ptrdiff_t>(steepest)) > 0.6);
    // Expansion: density decreases monotonically from the left state through the fan.
    for (std::size_t i = 20; i < 45; ++i) CHECK(rho[i + 1] <= rho[i] + 1e-12);
    CHECK(rho[20] > rho[50]);
    CHECK(rho[50] > 0.125);
    // Moving shock: momentum is positive behind it.
    CHECK(r.state.q[static_cast<std::size_t>(steepest) - 5] > 0.0);
  }

  TEST_CASE("isothermal equilibrium error at T=2 is of order 1e-6") {
    const Grid grid(0.0, 1.0, 100);
    const ModelParams p = params(1.0, 1.0, 1.0);
    const Potential phi = Potential::sample(PotentialKind::Linear, grid);
    State s(100);
    for (std::size_t i = 0; i < 100; ++i)
      s.rho[i] = analytic_equilibrium(phi.interior()[i], 1.0, p);
    const std::vector<double> exact = s.rho;
    const RunResult r = run(s, grid, phi, 2.0, p, options(BoundaryKind::EquilibriumGhost));
    double l1 = 0;
    for (std::size_t i = 0; i < 100; ++i) l1 += std::abs(r.state.rho[i] - exact[i]) * grid.dx();
    CHECK(l1 >= 5e-7);
    CHECK(l1 <= 2e-5);
  }

  TEST_CASE("non-finite steps raise BlowUpError with step index and time") {
    const Grid grid(-0.5, 0.5, 100);
    const Potential phi = Potential::constant(100);
    State s(100);
    for (std::size_t i = 0; i < 100; ++i) {
      const double x = grid.center(static_cast<std::ptrdiff_t>(i));
      s.rho[i] = (x > -0.2 && x < 0.2) ? 1.0 : 2.0;
    }
    SchemeOptions o = options(BoundaryKind::Periodic);
    o.variant = Variant::ExplicitNonAP;
    try {
      (void)run(s, grid, phi, 0.05, params(1e-3, 1.0, 1.4), o);
      FAIL("expected a blow-up");
    } catch (const BlowUpError& e) {
      CHECK(e.step_index() >= 1);
      CHECK(e.time() > 0.0);
      CHECK(e.time() < 0.05);
    }

    Stepper stepper(params(1.0, 1.0, 1.4), options(BoundaryKind::Periodic), grid.dx());
    State bad = s;
    bad.q[3] = INFINITY;
    CHECK_THROWS_AS(stepper.advance(bad, phi, 1e-5), BlowUpError);
  }

  TEST_CASE("explicit non-AP step agrees with the unified step to O(dt^2) at eps = 1") {
    const Grid grid(0.0, 1.0, 100);
    const ModelParams p = params(1.0, 1.0, 1.4);
    const Potential phi = Potential::sample(PotentialKind::Sinusoidal, grid);
    const State s = smooth_state(grid, 0.1);
    const SchemeOptions o = options(BoundaryKind::Periodic, Reconstruction::None);
    auto gap = [&](double dt) {
      const State a = step(s, phi, dt, p, o, grid.dx());
      const State b = explicit_nonap_step(apply_bc(s, phi, o, p), phi.samples(), dt, grid.dx(), p);
      return std::max(max_abs_diff(a.rho, b.rho), max_abs_diff(a.q, b.q));
    };
    const double g1 = gap(1e-6);
    const double g2 = gap(5e-7);
    CHECK(g1 <= 1e-7);
    CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.05));
  }

}  // TEST_SUITE

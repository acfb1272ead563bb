#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rabi/d1.hpp"
#include "rabi/exact.hpp"
#include "rabi/observables.hpp"

using namespace rabi;

namespace {

ModelParams bench_params() {
  ModelParams p;
  p.epsilon = 0.0;
  p.v = -0.05;
  p.lambda = 0.2;
  return p;
}

}  // namespace

TEST_CASE("derivatives at the standard initial state") {
  const ModelParams p = bench_params();
  const D1State init;  // up spin, undisplaced
  for (const auto mode : {EomMode::full, EomMode::simplified}) {
    const D1State d = d1::rhs(init, p, mode);
    CHECK(std::abs(d.amp_up) < 1e-15);
    CHECK(std::abs(d.amp_down - Complex{0.0, -p.v / p.hbar}) < 1e-14);
    CHECK(std::abs(d.disp_up - Complex{0.0, -0.5 * p.lambda / p.hbar}) < 1e-14);
  }
}

TEST_CASE("no tunneling freezes the populations and drives the displacement") {
  ModelParams p = bench_params();
  p.v = 0.0;
  const auto grid = make_time_grid(30.0, 0.25);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::full;
  cfg.rel_tol = cfg.abs_tol = 1e-10;
  const auto traj = d1::propagate(D1State{}, p, cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& st = traj.states[i];
    CHECK(std::abs(std::abs(st.amp_up) - 1.0) < 1e-9);
    // f(t) = -(lambda / 2 hbar omega) (1 - e^{-i omega t})
    const Complex ref = -(0.5 * p.lambda / (p.hbar * p.omega)) *
                        (1.0 - std::exp(Complex(0.0, -p.omega * grid[i])));
    CHECK(std::abs(st.disp_up - ref) < 1e-8);
  }
}

TEST_CASE("decoupled oscillator leaves pure tunneling oscillations") {
  ModelParams p = bench_params();
  p.lambda = 0.0;
  const auto grid = make_time_grid(200.0, 0.5);
  for (const auto mode : {EomMode::full, EomMode::simplified}) {
    ode::IntegratorConfig cfg;
    cfg.mode = mode;
    const auto series = d1::run(p, cfg, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(series.pz[i] - std::cos(2.0 * p.v * grid[i] / p.hbar)) < 1e-6);
  }
}

TEST_CASE("norm derivative vanishes identically in both modes") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const D1State st = rng.unit_state(1.5);
    for (const auto mode : {EomMode::full, EomMode::simplified}) {
      const D1State d = d1::rhs(st, p, mode);
      const double ddt_norm = 2.0 * ((std::conj(st.amp_up) * d.amp_up).real() +
                                     (std::conj(st.amp_down) * d.amp_down).real());
      CHECK(std::abs(ddt_norm) < 1e-12);
    }
  }
}

TEST_CASE("simplified displacements follow their linear solutions for 200 time units") {
  const ModelParams p = bench_params();
  const auto grid = make_time_grid(200.0, 1.0);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::simplified;
  // The check is against 1e-8 over 200 time units; secular accumulation at
  // the default tolerance sits right at that level, so integrate tighter.
  cfg.rel_tol = cfg.abs_tol = 1e-12;
  D1State init;
  init.disp_down = p.lambda / (p.hbar * p.omega);
  const auto traj = d1::propagate(init, p, cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(traj.states[i].disp_up -
                   oracles::simplified_disp_up(grid[i], p, init.disp_up)) < 1e-8);
    CHECK(std::abs(traj.states[i].disp_down -
                   oracles::simplified_disp_down(grid[i], p, init.disp_down)) < 1e-8);
  }
}

TEST_CASE("full-mode variational energy is constant away from the singular set") {
  const ModelParams p = bench_params();
  // Start on a balanced state so neither amplitude approaches zero early.
  D1State init;
  init.amp_up = std::sqrt(0.5);
  init.amp_down = Complex{0.0, std::sqrt(0.5)};
  init.disp_up = Complex{0.3, 0.1};
  init.disp_down = Complex{-0.2, 0.25};
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::full;
  const auto grid = make_time_grid(20.0, 0.2);
  const auto traj = d1::propagate(init, p, cfg, grid);
  const double e0 = d1::energies(init, p).total();
  double worst = 0.0;
  for (const auto& st : traj.states)
    worst = std::max(worst, std::abs(d1::energies(st, p).total() - e0));
  CHECK(worst < 1e-6 * std::max(1.0, std::abs(e0)));
  CHECK(std::abs(e0) > 0.01);  // a meaningful energy scale for the relative check
}

TEST_CASE("norm stays put over a long benchmark run") {
  const ModelParams p = bench_params();
  const auto grid = make_time_grid(200.0, 0.5);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::simplified;
  const auto series = d1::run(p, cfg, grid);
  CHECK(series.max_norm_drift < 1e-6);
  CHECK(series.warnings.empty());
}

TEST_CASE("matches the exact ground-level propagation at weak coupling") {
  const ModelParams p = bench_params();
  const auto grid = make_time_grid(100.0, 0.25);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::simplified;
  const auto series = d1::run(p, cfg, grid);

  ThermalConfig thermal;
  thermal.jmax = 14;
  const auto fock = exact::propagate_fock_initial(0, p, thermal, grid);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double pz = 0.0;
    for (int j = 0; j < thermal.jmax; ++j)
      pz += std::norm(fock.coeffs[i](j)) - std::norm(fock.coeffs[i](thermal.jmax + j));
    sup = std::max(sup, std::abs(series.pz[i] - pz));
  }
  CHECK(sup < 0.02);
}

TEST_CASE("initial perturbation seeds the empty branch") {
  D1State init;
  const auto moved = d1::apply_initial_perturbation(init, 1e-4);
  CHECK(std::abs(moved.amp_down) == doctest::Approx(1e-4));
  CHECK(moved.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unnormalized initial amplitudes are rejected") {
  const ModelParams p = bench_params();
  D1State init;
  init.amp_up = 0.7;
  const auto grid = make_time_grid(1.0, 0.5);
  CHECK_THROWS_AS(d1::propagate(init, p, {}, grid), std::invalid_argument);
}

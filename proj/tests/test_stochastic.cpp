#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rabi/d1.hpp"
#include "rabi/observables.hpp"
#include "rabi/stochastic.hpp"
#include "rabi/thermal.hpp"

using namespace rabi;
namespace st = rabi::stochastic;

namespace {

ModelParams bench_params() {
  ModelParams p;
  p.epsilon = 0.0;
  p.v = -0.05;
  p.lambda = 0.2;
  return p;
}

}  // namespace

TEST_CASE("sign sampling is deterministic and unbiased") {
  const auto a = st::sample_signs(7, 99, 3);
  const auto b = st::sample_signs(7, 99, 3);
  CHECK(a == b);
  CHECK(a != st::sample_signs(7, 99, 4));
  CHECK(a != st::sample_signs(7, 100, 3));

  const int n_real = 100000;
  std::vector<double> mean(7, 0.0);
  for (int i = 0; i < n_real; ++i) {
    const auto s = st::sample_signs(7, 1234, static_cast<std::uint64_t>(i));
    for (int k = 0; k < 7; ++k) mean[static_cast<std::size_t>(k)] += s[static_cast<std::size_t>(k)];
  }
  for (double& m : mean) m /= n_real;
  for (const double m : mean) CHECK(std::abs(m) < 3.0 / std::sqrt(static_cast<double>(n_real)));
}

TEST_CASE("truncated thermal state: norm and tail at the default truncation") {
  const ModelParams p = bench_params();
  const auto tw = st::make_thermal_wavefunction(st::sample_signs(7, 5, 0), 1.0, p);
  // Raw norm 1 - e^{-7}; the kept part is renormalized to exactly one.
  CHECK(tw.raw_norm == doctest::Approx(1.0 - std::exp(-7.0)).epsilon(1e-12));
  CHECK(tw.raw_norm >= 1.0 - 1e-3);
  CHECK(tw.tail_weight == doctest::Approx(std::exp(-7.0)).epsilon(1e-12));
  CHECK(tw.phi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("diagonal thermal moments against their closed forms") {
  const ModelParams p = bench_params();
  const double x = std::exp(-1.0);
  const double nbar = x / (1.0 - x);  // 1/(e-1)

  // M = 60: truncation tail below rounding.
  const auto tw60 = st::make_thermal_wavefunction(st::sample_signs(60, 5, 1), 1.0, p);
  CHECK(tw60.t11 == doctest::Approx(nbar).epsilon(1e-13));
  CHECK(st::thermal_quantities(tw60).u11 == doctest::Approx(1.0 / (1.0 - x)).epsilon(1e-13));
  CHECK(st::thermal_t(tw60, 1, 1) == doctest::Approx(tw60.t11).epsilon(1e-13));
  CHECK(st::thermal_u(tw60, 1, 1) == doctest::Approx(1.0 / (1.0 - x)).epsilon(1e-13));

  // M = 7: the deviation equals the analytic truncation tail of the
  // renormalized state, M x^M / (1 - x^M).
  const auto tw7 = st::make_thermal_wavefunction(st::sample_signs(7, 5, 1), 1.0, p);
  const double tail7 = 7.0 * std::pow(x, 7) / (1.0 - std::pow(x, 7));
  CHECK(std::abs(tw7.t11 - nbar) == doctest::Approx(tail7).epsilon(1e-9));
  CHECK(std::abs(st::thermal_u(tw7, 1, 1) - 1.0 / (1.0 - x)) ==
        doctest::Approx(tail7).epsilon(1e-9));
}

TEST_CASE("higher diagonal moments and symmetries") {
  const ModelParams p = bench_params();
  const double x = std::exp(-0.8);
  const auto tw = st::make_thermal_wavefunction(st::sample_signs(80, 17, 2), 0.8, p);
  for (int s = 0; s <= 3; ++s) {
    double fact = 1.0;
    for (int i = 2; i <= s; ++i) fact *= i;
    // T_s^s = s!/(e^{beta}-1)^s, U_s^s = s!/(1-e^{-beta})^s.
    CHECK(st::thermal_t(tw, s, s) ==
          doctest::Approx(fact * std::pow(x / (1.0 - x), s)).epsilon(1e-10));
    CHECK(st::thermal_u(tw, s, s) ==
          doctest::Approx(fact / std::pow(1.0 - x, s)).epsilon(1e-10));
  }
  for (int s = 0; s <= 3; ++s)
    for (int r = 0; r <= 3; ++r) {
      CHECK(st::thermal_t(tw, s, r) == doctest::Approx(st::thermal_t(tw, r, s)));
      CHECK(st::thermal_u(tw, s, r) == doctest::Approx(st::thermal_u(tw, r, s)));
    }
  for (int s = 0; s <= 3; ++s)
    CHECK(st::thermal_u(tw, 0, s) == doctest::Approx(st::thermal_t(tw, s, 0)));
}

TEST_CASE("t01 is the contraction of the two v vectors and averages to zero") {
  const ModelParams p = bench_params();
  double mean = 0.0, sq = 0.0;
  const int n_real = 10000;
  for (int i = 0; i < n_real; ++i) {
    const auto tw =
        st::make_thermal_wavefunction(st::sample_signs(7, 31, static_cast<std::uint64_t>(i)), 1.0, p);
    double dot = 0.0;
    for (int n = 0; n < 7; ++n) dot += tw.v0(n).real() * tw.v1(n).real();
    CHECK(tw.t01 == doctest::Approx(dot).epsilon(1e-13));
    mean += tw.t01;
    sq += tw.t01 * tw.t01;
  }
  mean /= n_real;
  const double stderr_est = std::sqrt(sq / n_real) / std::sqrt(static_cast<double>(n_real));
  CHECK(std::abs(mean) < 4.0 * stderr_est);
}

TEST_CASE("overlaps match the brute-force displacement operators") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(2024);
  const int dim = 48;
  for (int trial = 0; trial < 25; ++trial) {
    const auto tw = st::make_thermal_wavefunction(
        st::sample_signs(7, 77, static_cast<std::uint64_t>(trial)), 1.0, p);
    const Complex f = rng.complex_in_disk(2.0);
    const Complex g = rng.complex_in_disk(2.0);
    CHECK(std::abs(st::overlap(f, g, tw) - oracles::overlap_bruteforce(f, g, tw, dim)) < 1e-6);
    CHECK(std::abs(st::overlap_annihilate(f, g, tw) -
                   oracles::overlap_annihilate_bruteforce(f, g, tw, dim)) < 1e-6);
  }
}

TEST_CASE("overlap limits") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(7);
  const auto t0 = st::zero_temperature_wavefunction();
  for (int trial = 0; trial < 10; ++trial) {
    const Complex f = rng.complex_in_disk(1.5);
    const Complex g = rng.complex_in_disk(1.5);
    // Ground state: K e^{f* g}; annihilation gives zero.
    const Complex expected =
        std::exp(Complex(-0.5 * (std::norm(f) + std::norm(g)), 0.0) + std::conj(f) * g);
    CHECK(std::abs(st::overlap(f, g, t0) - expected) < 1e-14);
    CHECK(std::abs(st::overlap_annihilate(f, g, t0)) < 1e-14);

    // Unitarity at f = g for any realization.
    const auto tw = st::make_thermal_wavefunction(
        st::sample_signs(7, 3, static_cast<std::uint64_t>(trial)), 1.0, p);
    CHECK(std::abs(st::overlap(f, f, tw) - Complex{1.0, 0.0}) < 1e-13);
    // Undisplaced annihilation expectation is <a> = t01.
    CHECK(std::abs(st::overlap_annihilate({0, 0}, {0, 0}, tw) - Complex{tw.t01, 0.0}) < 1e-13);
  }
}

TEST_CASE("overlap set is internally consistent") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(5);
  const auto tw = st::make_thermal_wavefunction(st::sample_signs(7, 13, 0), 1.0, p);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex f = rng.complex_in_disk(1.5);
    const Complex g = rng.complex_in_disk(1.5);
    const auto os = st::overlap_set(f, g, tw);
    CHECK(os.o_fg == std::conj(os.o_gf));
    CHECK(std::abs(os.o_fg - st::overlap(f, g, tw)) < 1e-14);
    CHECK(std::abs(os.o_fg_a - st::overlap_annihilate(f, g, tw)) < 1e-14);
    CHECK(std::abs(os.o_gf - st::overlap(g, f, tw)) < 1e-13);
    CHECK(std::abs(os.o_gf_a - st::overlap_annihilate(g, f, tw)) < 1e-13);
  }
}

TEST_CASE("zero-temperature equations reduce to the bare kernel") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(31);
  const auto t0 = st::zero_temperature_wavefunction();
  for (int trial = 0; trial < 30; ++trial) {
    const D1State state = rng.unit_state(1.5);
    for (const auto mode : {EomMode::full, EomMode::simplified}) {
      const D1State a = st::rhs(state, t0, p, mode);
      const D1State b = d1::rhs(state, p, mode);
      CHECK(std::abs(a.amp_up - b.amp_up) < 1e-12);
      CHECK(std::abs(a.amp_down - b.amp_down) < 1e-12);
      CHECK(std::abs(a.disp_up - b.disp_up) < 1e-12);
      CHECK(std::abs(a.disp_down - b.disp_down) < 1e-12);
    }
  }
}

TEST_CASE("norm derivative vanishes for any realization and mode") {
  const ModelParams p = bench_params();
  oracles::TestRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tw = st::make_thermal_wavefunction(
        st::sample_signs(7, 21, static_cast<std::uint64_t>(trial)), 1.0, p);
    const D1State state = rng.unit_state(1.5);
    for (const auto mode : {EomMode::full, EomMode::simplified}) {
      const D1State d = st::rhs(state, tw, p, mode);
      const double ddt_norm = 2.0 * ((std::conj(state.amp_up) * d.amp_up).real() +
                                     (std::conj(state.amp_down) * d.amp_down).real());
      CHECK(std::abs(ddt_norm) < 1e-12);
    }
  }
}

TEST_CASE("no tunneling: displacement follows the thermally shifted rotation") {
  ModelParams p = bench_params();
  p.v = 0.0;
  const auto tw = st::make_thermal_wavefunction(st::sample_signs(7, 41, 2), 1.0, p);
  const auto grid = make_time_grid(40.0, 0.5);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::full;
  cfg.rel_tol = cfg.abs_tol = 1e-11;
  auto rhs_fn = [&](const D1State& s) { return st::rhs(s, tw, p, cfg.mode, cfg.reg_floor); };
  const auto traj = d1::propagate_state(rhs_fn, D1State{}, cfg, grid);
  // f' = -i omega (f + t01) - i lambda/(2 hbar): rotation about -t01 - lambda/(2 omega).
  const Complex fss = -Complex{tw.t01 + 0.5 * p.lambda / (p.hbar * p.omega), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex ref = fss * (1.0 - std::exp(Complex(0.0, -p.omega * grid[i])));
    CHECK(std::abs(traj.states[i].disp_up - ref) < 1e-8);
    CHECK(std::abs(std::abs(traj.states[i].amp_up) - 1.0) < 1e-9);
  }
}

TEST_CASE("averaged equation coefficients reproduce the thermally averaged equations") {
  // Averaging the overlap expectations over realizations and feeding the
  // averaged coefficients back into the equations must converge to the
  // single-trajectory thermally-averaged form (statistical check).
  const ModelParams p = bench_params();
  const double beta = 1.0;
  const int fock_m = 12;
  const int n_real = 4000;
  oracles::TestRng rng(3);
  const D1State state = rng.unit_state(0.8);
  const Complex f = state.disp_up, g = state.disp_down;

  Complex o_fg_mean = 0.0, o_fg_a_mean = 0.0, o_gf_a_mean = 0.0;
  double t01_mean = 0.0, t11_mean = 0.0;
  for (int i = 0; i < n_real; ++i) {
    const auto tw = st::make_thermal_wavefunction(
        st::sample_signs(fock_m, 555, static_cast<std::uint64_t>(i)), beta, p);
    const auto os = st::overlap_set(f, g, tw);
    o_fg_mean += os.o_fg;
    o_fg_a_mean += os.o_fg_a;
    o_gf_a_mean += os.o_gf_a;
    t01_mean += tw.t01;
    t11_mean += tw.t11;
  }
  o_fg_mean /= n_real;
  o_fg_a_mean /= n_real;
  o_gf_a_mean /= n_real;
  t01_mean /= n_real;
  t11_mean /= n_real;

  const double nbar = thermal_occupation(beta, p);
  const double y = std::norm(g - f);
  const Complex pref =
      std::exp(Complex(-0.5 * (std::norm(f) + std::norm(g)), 0.0) + std::conj(f) * g);
  // Closed-form sign averages: E<D_f^dag D_g> = pref exp(-nbar y),
  // E<D_f^dag D_g a> = pref (g - f) nbar exp(-nbar y), E[t01] = 0, E[t11] = nbar.
  const Complex o_fg_ta = pref * std::exp(-nbar * y);
  const Complex o_fg_a_ta = pref * (g - f) * nbar * std::exp(-nbar * y);
  const Complex o_gf_a_ta = std::conj(pref) * (f - g) * nbar * std::exp(-nbar * y);

  CHECK(std::abs(o_fg_mean - o_fg_ta) < 0.05 * std::abs(o_fg_ta) + 5e-3);
  CHECK(std::abs(o_fg_a_mean - o_fg_a_ta) < 0.05 * std::abs(o_fg_a_ta) + 5e-3);
  CHECK(std::abs(o_gf_a_mean - o_gf_a_ta) < 0.05 * std::abs(o_gf_a_ta) + 5e-3);
  CHECK(std::abs(t01_mean) < 5e-3 * std::sqrt(4000.0 / n_real) + 5e-3);
  CHECK(t11_mean == doctest::Approx(nbar).epsilon(1e-2));
}

TEST_CASE("cold ensemble collapses to the single zero-temperature trajectory") {
  const ModelParams p = bench_params();
  ThermalConfig thermal;
  thermal.beta = 60.0;
  const auto grid = make_time_grid(50.0, 0.5);
  ode::IntegratorConfig cfg;
  const auto ens = st::run_ensemble(5, 9, thermal.beta, p, thermal, cfg, grid);
  const auto single = d1::run(p, cfg, grid);
  // Realizations differ only at the integration-noise level once the thermal
  // coefficients are frozen out.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(ens.pz[i] - single.pz[i]) < 1e-7);
    CHECK(ens.pz_stderr[i] < 1e-7);
  }
}

TEST_CASE("ensemble is deterministic for a fixed seed and thread count independent") {
  const ModelParams p = bench_params();
  ThermalConfig thermal;
  const auto grid = make_time_grid(10.0, 1.0);
  ode::IntegratorConfig cfg;
  const auto a = st::run_ensemble(12, 4242, 1.0, p, thermal, cfg, grid, 1);
  const auto b = st::run_ensemble(12, 4242, 1.0, p, thermal, cfg, grid, 2);
  const auto c = st::run_ensemble(12, 4242, 1.0, p, thermal, cfg, grid, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.pz[i] == b.pz[i]);
    CHECK(a.pz[i] == c.pz[i]);
    CHECK(a.e_rest[i] == b.e_rest[i]);
  }
}

TEST_CASE("per-realization norm conservation over the benchmark window") {
  const ModelParams p = bench_params();
  ThermalConfig thermal;
  const auto grid = make_time_grid(200.0, 2.0);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::simplified;
  const auto ens = st::run_ensemble(10, 31337, 1.0, p, thermal, cfg, grid);
  CHECK(ens.max_norm_drift < 1e-6);
}

TEST_CASE("bias precondition is enforced") {
  ModelParams p = bench_params();
  p.epsilon = 0.1;
  ThermalConfig thermal;
  const auto grid = make_time_grid(1.0, 0.5);
  CHECK_THROWS_AS(st::run_ensemble(2, 1, 1.0, p, thermal, {}, grid), std::invalid_argument);
}

TEST_CASE("failed realizations refuse the whole ensemble") {
  // Unregularized full-mode equations are singular at the start (the down
  // amplitude is exactly zero), so every trajectory fails immediately; the
  // ensemble must report the failures instead of averaging a subset.
  const ModelParams p = bench_params();
  ThermalConfig thermal;
  const auto grid = make_time_grid(5.0, 1.0);
  ode::IntegratorConfig cfg;
  cfg.mode = EomMode::full;
  cfg.reg_floor = 0.0;
  CHECK_THROWS_WITH_AS(st::run_ensemble(3, 1, 1.0, p, thermal, cfg, grid),
                       doctest::Contains("refused"), std::runtime_error);
}

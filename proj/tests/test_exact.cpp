#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

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

double level_pz(const exact::FockExpansionSeries& lev, std::size_t ti, int jmax) {
  double pz = 0.0;
  for (int j = 0; j < jmax; ++j)
    pz += std::norm(lev.coeffs[ti](j)) - std::norm(lev.coeffs[ti](jmax + j));
  return pz;
}

}  // namespace

TEST_CASE("hamiltonian entries") {
  ModelParams p = bench_params();
  const int jmax = 6;
  const auto h = exact::build_hamiltonian(p, jmax);
  CHECK(h(1, 0).real() == doctest::Approx(0.1));          // coupling sqrt(1) * lambda/2
  CHECK(h(2, 1).real() == doctest::Approx(0.1 * std::sqrt(2.0)));
  for (int n = 0; n < jmax; ++n) CHECK(h(jmax + n, n).real() == doctest::Approx(p.v));
  CHECK(h(0, 0) == Complex{0.5 * p.epsilon, 0.0});
  CHECK(h(jmax, jmax).real() == doctest::Approx(-0.5 * p.epsilon));
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);

  ModelParams biased = p;
  biased.epsilon = 0.3;
  const auto hb = exact::build_hamiltonian(biased, jmax);
  CHECK(hb(0, 0).real() == doctest::Approx(0.15));
  CHECK(hb(1, 1).real() == doctest::Approx(0.15 + 1.0));
}

TEST_CASE("eigendecomposition residual is tiny") {
  exact::SpectralPropagator prop(bench_params(), 14);
  CHECK(prop.residual() < 1e-10);
}

TEST_CASE("diagonal hamiltonian keeps the initial state") {
  ModelParams p = bench_params();
  p.v = 0.0;
  p.lambda = 0.0;
  ThermalConfig cfg;
  const auto grid = make_time_grid(50.0, 5.0);
  const auto lev = exact::propagate_fock_initial(3, p, cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(std::abs(lev.coeffs[i](3)) - 1.0) < 1e-12);
}

TEST_CASE("pure tunneling gives textbook flopping") {
  ModelParams p = bench_params();
  p.lambda = 0.0;
  ThermalConfig cfg;
  const auto grid = make_time_grid(100.0, 0.5);
  const auto lev = exact::propagate_fock_initial(2, p, cfg, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double expected = std::pow(std::cos(p.v * grid[i] / p.hbar), 2);
    CHECK(std::norm(lev.coeffs[i](2)) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("propagation is unitary over the benchmark window") {
  ThermalConfig cfg;
  const auto grid = make_time_grid(200.0, 1.0);
  const auto lev = exact::propagate_fock_initial(0, bench_params(), cfg, grid);
  CHECK(lev.max_norm_error < 1e-10);
  CHECK_FALSE(lev.truncation_warning);
}

TEST_CASE("weighted population difference: exactness properties") {
  ThermalConfig cfg;
  const auto grid = make_time_grid(200.0, 0.5);
  const auto res = exact::population_difference_qm(1.0, bench_params(), cfg, grid);
  const auto& s = res.series;
  CHECK(s.pz[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.pz[i] <= 1.0 + 1e-12);
    CHECK(s.pz[i] >= -1.0 - 1e-12);
    CHECK(std::abs(s.norm[i] - 1.0) < 1e-10);  // trace preserved
    CHECK(std::abs(s.e_total[i] - s.e_total[0]) < 1e-10);
    CHECK(s.e_total[i] == doctest::Approx(s.e_spin[i] + s.e_rest[i]).epsilon(1e-12));
  }
}

TEST_CASE("decoupled limit is temperature independent") {
  ModelParams p = bench_params();
  p.lambda = 0.0;
  ThermalConfig cfg;
  const auto grid = make_time_grid(150.0, 0.5);
  for (const double beta : {0.5, 2.0}) {
    const auto res = exact::population_difference_qm(beta, p, cfg, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(res.series.pz[i] - std::cos(2.0 * p.v * grid[i] / p.hbar)) < 1e-10);
  }
}

TEST_CASE("doubling the basis does not move the benchmark result") {
  ThermalConfig small;
  small.jmax = 14;
  ThermalConfig big;
  big.jmax = 28;
  const auto grid = make_time_grid(200.0, 0.5);
  const auto a = exact::population_difference_qm(1.0, bench_params(), small, grid);
  const auto b = exact::population_difference_qm(1.0, bench_params(), big, grid);
  const auto d = compare_series(a.series, b.series);
  CHECK(d.sup_norm < 1e-6);
}

TEST_CASE("undersized basis raises the truncation warning") {
  ModelParams p = bench_params();
  p.lambda = 0.5;
  ThermalConfig cfg;
  cfg.jmax = 9;
  const auto grid = make_time_grid(100.0, 1.0);
  const auto res = exact::population_difference_qm(1.0, p, cfg, grid);
  CHECK_FALSE(res.series.warnings.empty());
}

TEST_CASE("per-level expansions match the weighted series") {
  ThermalConfig cfg;
  const auto grid = make_time_grid(20.0, 2.0);
  const auto res = exact::population_difference_qm(1.0, bench_params(), cfg, grid);
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    double weighted = 0.0;
    double wsum = 0.0;
    const double x = std::exp(-1.0);
    for (int n = 0; n <= cfg.boltzmann_nt; ++n) {
      const double w = std::pow(x, n);
      weighted += w * level_pz(res.levels[static_cast<std::size_t>(n)], ti, cfg.jmax);
      wsum += w;
    }
    CHECK(res.series.pz[ti] == doctest::Approx(weighted / wsum).epsilon(1e-12));
  }
}

TEST_CASE("configuration errors") {
  ThermalConfig cfg;
  cfg.boltzmann_nt = 20;
  cfg.jmax = 14;
  const auto grid = make_time_grid(1.0, 0.5);
  CHECK_THROWS_AS(exact::population_difference_qm(1.0, bench_params(), cfg, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact::build_hamiltonian(bench_params(), 1), std::invalid_argument);
}

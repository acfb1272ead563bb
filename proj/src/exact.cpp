#include "rabi/exact.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/thermal.hpp"

namespace rabi::exact {

namespace {
// Basis index of |spin, j>: spin 0 = up, 1 = down.
inline int idx(int spin, int j, int jmax) { return spin * jmax + j; }
}  // namespace

Eigen::MatrixXcd build_hamiltonian(const ModelParams& p, int jmax) {
  p.validate();
  if (jmax < 2) throw std::invalid_argument("build_hamiltonian: jmax must be >= 2");
  const int dim = 2 * jmax;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int spin = 0; spin < 2; ++spin) {
    const double sz = spin == 0 ? 1.0 : -1.0;
    for (int j = 0; j < jmax; ++j) {
      h(idx(spin, j, jmax), idx(spin, j, jmax)) = 0.5 * p.epsilon * sz + j * p.hbar * p.omega;
      if (j + 1 < jmax) {
        const double coup = 0.5 * p.lambda * sz * std::sqrt(j + 1.0);
        h(idx(spin, j + 1, jmax), idx(spin, j, jmax)) = coup;
        h(idx(spin, j, jmax), idx(spin, j + 1, jmax)) = coup;
      }
    }
  }
  for (int j = 0; j < jmax; ++j) {
    h(idx(0, j, jmax), idx(1, j, jmax)) = p.v;
    h(idx(1, j, jmax), idx(0, j, jmax)) = p.v;
  }
  return h;
}

SpectralPropagator::SpectralPropagator(const ModelParams& params, int jmax)
    : params_(params), jmax_(jmax), hamiltonian_(build_hamiltonian(params, jmax)) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian_);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("SpectralPropagator: eigendecomposition failed");
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
  const Eigen::MatrixXcd resid =
      hamiltonian_ * vectors_ - vectors_ * values_.asDiagonal().toDenseMatrix().cast<Complex>();
  residual_ = resid.cwiseAbs().maxCoeff() / hamiltonian_.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd SpectralPropagator::evolve_from_level(int n, double t) const {
  if (n < 0 || n >= jmax_)
    throw std::invalid_argument("evolve_from_level: initial level outside truncated space");
  // U exp(-i L t / hbar) U^dag e_(up, n); the adjoint row is just the
  // conjugated eigenvector row for the starting basis state.
  const int start = idx(0, n, jmax_);
  Eigen::VectorXcd phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -values_(k) * t / params_.hbar)) *
                std::conj(vectors_(start, k));
  return vectors_ * phases;
}

FockExpansionSeries propagate_fock_initial(int n, const ModelParams& params,
                                           const ThermalConfig& config,
                                           std::span<const double> t_grid) {
  config.validate();
  if (n >= config.jmax)
    throw std::invalid_argument("propagate_fock_initial: initial level not below jmax");
  SpectralPropagator prop(params, config.jmax);
  return propagate_fock_initial(n, prop, t_grid);
}

FockExpansionSeries propagate_fock_initial(int n, const SpectralPropagator& prop,
                                           std::span<const double> t_grid) {
  FockExpansionSeries out;
  out.level = n;
  out.coeffs.reserve(t_grid.size());
  const int jmax = prop.jmax();
  for (const double t : t_grid) {
    Eigen::VectorXcd c = prop.evolve_from_level(n, t);
    out.max_norm_error = std::max(out.max_norm_error, std::abs(c.squaredNorm() - 1.0));
    const double top = std::norm(c(idx(0, jmax - 1, jmax))) + std::norm(c(idx(0, jmax - 2, jmax))) +
                       std::norm(c(idx(1, jmax - 1, jmax))) + std::norm(c(idx(1, jmax - 2, jmax)));
    out.max_top_population = std::max(out.max_top_population, top);
    out.coeffs.push_back(std::move(c));
  }
  out.truncation_warning = out.max_top_population > 1e-6;
  return out;
}

Result population_difference_qm(double beta, const ModelParams& params,
                                const ThermalConfig& config, std::span<const double> t_grid) {
  params.validate();
  config.validate();
  if (config.boltzmann_nt + 1 > config.jmax)
    throw std::invalid_argument(
        "population_difference_qm: boltzmann_nt must stay below jmax");

  SpectralPropagator prop(params, config.jmax);
  const int n_levels = config.boltzmann_nt + 1;
  const auto weights = truncated_boltzmann_weights(beta, params, n_levels);
  const int jmax = config.jmax;

  Result res;
  res.levels.reserve(static_cast<std::size_t>(n_levels));
  for (int n = 0; n < n_levels; ++n)
    res.levels.push_back(propagate_fock_initial(n, prop, t_grid));

  ObservableSeries& s = res.series;
  s.method = "exact";
  s.time.assign(t_grid.begin(), t_grid.end());
  const std::size_t nt = t_grid.size();
  s.pz.assign(nt, 0.0);
  s.pz_stderr.assign(nt, 0.0);
  s.norm.assign(nt, 0.0);
  s.e_spin.assign(nt, 0.0);
  s.e_rest.assign(nt, 0.0);
  s.e_total.assign(nt, 0.0);

  for (int n = 0; n < n_levels; ++n) {
    const double w = weights[static_cast<std::size_t>(n)];
    const auto& lev = res.levels[static_cast<std::size_t>(n)];
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const auto& c = lev.coeffs[ti];
      double pz = 0.0, occ = 0.0, sx = 0.0, szx = 0.0;
      for (int j = 0; j < jmax; ++j) {
        const Complex cu = c(idx(0, j, jmax));
        const Complex cd = c(idx(1, j, jmax));
        pz += std::norm(cu) - std::norm(cd);
        occ += j * (std::norm(cu) + std::norm(cd));
        sx += 2.0 * (std::conj(cu) * cd).real();
        if (j + 1 < jmax) {
          const Complex cu1 = c(idx(0, j + 1, jmax));
          const Complex cd1 = c(idx(1, j + 1, jmax));
          szx += std::sqrt(j + 1.0) * 2.0 *
                 ((std::conj(cu) * cu1).real() - (std::conj(cd) * cd1).real());
        }
      }
      s.pz[ti] += w * pz;
      s.norm[ti] += w * c.squaredNorm();
      const double espin = 0.5 * params.epsilon * pz + params.v * sx;
      const double erest = params.hbar * params.omega * occ + 0.5 * params.lambda * szx;
      s.e_spin[ti] += w * espin;
      s.e_rest[ti] += w * erest;
      s.e_total[ti] += w * (espin + erest);
    }
    if (lev.truncation_warning)
      s.warnings.push_back("level " + std::to_string(n) +
                           ": population of top Fock levels exceeded 1e-6; increase jmax");
  }
  return res;
}

}  // namespace rabi::exact

#include "apwb/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apwb {

namespace {

void check_extended(std::span<const double> rho_ext, std::span<const double> phi_ext) {
  if (rho_ext.size() < 3 || rho_ext.size() != phi_ext.size())
    throw std::invalid_argument("reference step: rho/phi must be ghost-extended and equal length");
}

// (rhobar dphi)_{k+1/2} between extended cells k and k+1.
inline double gravity_flux(std::span<const double> rho, std::span<const double> phi,
                           std::size_t k) {
  return 0.5 * (rho[k] + rho[k + 1]) * (phi[k + 1] - phi[k]);
}

}  // namespace

std::vector<double> porous_medium_step(std::span<const double> rho_ext,
                                       std::span<const double> phi_ext, double dt, double dx,
                                       double gamma) {
  check_extended(rho_ext, phi_ext);
  const std::size_t n = rho_ext.size() - 2;
  std::vector<double> p(n + 2);
  for (std::size_t j = 0; j < n + 2; ++j) p[j] = pressure(rho_ext[j], gamma);
  const double mu = dt / (dx * dx);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;
    out[i] = rho_ext[j] + mu * (p[j + 1] - 2.0 * p[j] + p[j - 1]) -
             mu * (gravity_flux(rho_ext, phi_ext, j) - gravity_flux(rho_ext, phi_ext, j - 1));
  }
  return out;
}

std::vector<double> transport_limit_step(std::span<const double> rho_ext,
                                         std::span<const double> phi_ext, double dt, double dx) {
  check_extended(rho_ext, phi_ext);
  const std::size_t n = rho_ext.size() - 2;
  const double mu = dt / (dx * dx);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;
    out[i] = rho_ext[j] -
             mu * (gravity_flux(rho_ext, phi_ext, j) - gravity_flux(rho_ext, phi_ext, j - 1));
  }
  return out;
}

std::vector<double> transport_upwind_step(std::span<const double> rho_ext,
                                          std::span<const double> phi_ext, double dt, double dx) {
  check_extended(rho_ext, phi_ext);
  const std::size_t n = rho_ext.size() - 2;
  auto flux = [&](std::size_t k) {
    const double v = (phi_ext[k + 1] - phi_ext[k]) / dx;
    return v * (v > 0.0 ? rho_ext[k] : rho_ext[k + 1]);
  };
  const double mu = dt / dx;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;
    out[i] = rho_ext[j] - mu * (flux(j) - flux(j - 1));
  }
  return out;
}

State explicit_nonap_step(const GhostExtended& ext, std::span<const double> phi_ext, double dt,
                          double dx, const ModelParams& params, double rho_floor) {
  check_extended(ext.rho, phi_ext);
  if (ext.q.size() != ext.rho.size())
    throw std::invalid_argument("explicit_nonap_step: rho/q length mismatch");
  const std::size_t n = ext.rho.size() - 2;
  const double inv_eps_2b = 1.0 / params.eps_pow(2.0 * params.beta);
  const double inv_eps_1b = 1.0 / params.eps_pow(1.0 + params.beta);

  std::vector<double> f_rho(n + 1);
  std::vector<double> f_q(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double rl = ext.rho[k];
    const double rr = ext.rho[k + 1];
    if (!std::isfinite(rl) || !std::isfinite(rr) || !std::isfinite(ext.q[k]) ||
        !std::isfinite(ext.q[k + 1]))
      throw BlowUpError(0, 0.0, "non-finite state in explicit step");
    // Negative densities only arise once the explicit scheme has gone unstable.
    if (rl < 0.0 || rr < 0.0) throw BlowUpError(0, 0.0, "negative density in explicit step");
    const FluxSide left{rl, rl > rho_floor ? ext.q[k] / rl : 0.0};
    const FluxSide right{rr, rr > rho_floor ? ext.q[k + 1] / rr : 0.0};
    const FluxPair f = rusanov_flux(left, right, params, rho_floor);
    f_rho[k] = f.f_rho;
    f_q[k] = f.f_conv + f.f_prs * inv_eps_2b;
  }

  State out(n);
  const double mu = dt / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;
    const double grad_phi = (phi_ext[j + 1] - phi_ext[j - 1]) / (2.0 * dx);
    const double source = -(ext.q[j] - ext.rho[j] * grad_phi) * inv_eps_1b;
    out.rho[i] = ext.rho[j] - mu * (f_rho[i + 1] - f_rho[i]);
    out.q[i] = ext.q[j] - mu * (f_q[i + 1] - f_q[i]) + dt * source;
  }
  return out;
}

std::vector<double> extend_density(std::span<const double> rho, BoundaryKind bc) {
  const std::size_t n = rho.size();
  if (n == 0) throw std::invalid_argument("extend_density: empty array");
  std::vector<double> ext(n + 2);
  std::copy(rho.begin(), rho.end(), ext.begin() + 1);
  switch (bc) {
    case BoundaryKind::Extrapolation:
      ext[0] = rho[0];
      ext[n + 1] = rho[n - 1];
      break;
    case BoundaryKind::Periodic:
      ext[0] = rho[n - 1];
      ext[n + 1] = rho[0];
      break;
    default: throw std::invalid_argument("extend_density supports extrapolation and periodic only");
  }
  return ext;
}

std::vector<double> run_limit_solver(LimitSolver solver, std::vector<double> rho0, const Grid& grid,
                                     const Potential& phi, double t_final,
                                     const ModelParams& params, BoundaryKind bc) {
  const double dx = grid.dx();
  const double base_dt = cfl_dt(grid, phi, params);
  std::vector<double> rho = std::move(rho0);
  double t = 0.0;
  while (t < t_final) {
    double dt = base_dt;
    if (solver == LimitSolver::PorousMedium && params.gamma != 1.0) {
      // Explicit diffusion of P: dt max P'(rho) / dx^2 <= 1/2.
      const double rho_max = *std::max_element(rho.begin(), rho.end());
      const double slope = params.gamma * std::pow(std::max(rho_max, 0.0), params.gamma - 1.0);
      dt = std::min(dt, 0.5 * dx * dx / slope);
    }
    bool last = false;
    if (t + dt >= t_final) {
      dt = t_final - t;
      last = true;
    }
    const std::vector<double> ext = extend_density(rho, bc);
    switch (solver) {
      case LimitSolver::PorousMedium:
        rho = porous_medium_step(ext, phi.samples(), dt, dx, params.gamma);
        break;
      case LimitSolver::TransportCentral:
        rho = transport_limit_step(ext, phi.samples(), dt, dx);
        break;
      case LimitSolver::TransportUpwind:
        rho = transport_upwind_step(ext, phi.samples(), dt, dx);
        break;
    }
    t = last ? t_final : t + dt;
  }
  return rho;
}

}  // namespace apwb

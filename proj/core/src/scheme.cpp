#include "apwb/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "apwb/reference.hpp"

namespace apwb {

std::string_view to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Extrapolation: return "extrap";
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::EquilibriumGhost: return "equilibrium";
    case BoundaryKind::HydrostaticGhost: return "hydrostatic";
  }
  return "extrap";
}

std::string_view to_string(Reconstruction r) {
  switch (r) {
    case Reconstruction::P: return "p";
    case Reconstruction::E: return "e";
    case Reconstruction::None: return "none";
  }
  return "p";
}

std::string_view to_string(Variant v) { return v == Variant::UnifiedAP ? "ap" : "nonap"; }

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "extrap" || name == "extrapolation") return BoundaryKind::Extrapolation;
  if (name == "periodic") return BoundaryKind::Periodic;
  if (name == "equilibrium") return BoundaryKind::EquilibriumGhost;
  if (name == "hydrostatic") return BoundaryKind::HydrostaticGhost;
  throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

Reconstruction parse_reconstruction(std::string_view name) {
  if (name == "p" || name == "P") return Reconstruction::P;
  if (name == "e" || name == "E") return Reconstruction::E;
  if (name == "none") return Reconstruction::None;
  throw std::invalid_argument("unknown reconstruction '" + std::string(name) + "'");
}

Variant parse_variant(std::string_view name) {
  if (name == "ap") return Variant::UnifiedAP;
  if (name == "nonap") return Variant::ExplicitNonAP;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

namespace {

// c^2 = gamma rho^(gamma-1) = gamma P / rho, without the 1/eps^(2 beta).
inline double sound_speed_sq(double rho, double p, double gamma, double rho_floor) {
  if (gamma == 1.0) return 1.0;
  return rho > rho_floor ? gamma * p / rho : 0.0;
}

struct SideValues {
  double rho;
  double u;
  double p;
};

inline FluxPair rusanov(const SideValues& l, const SideValues& r, const ModelParams& params,
                        double inv_eps_beta, double rho_floor) {
  const double g = params.gamma;
  const double ul = l.rho > rho_floor ? l.u : 0.0;
  const double ur = r.rho > rho_floor ? r.u : 0.0;
  const double cl = std::sqrt(sound_speed_sq(l.rho, l.p, g, rho_floor)) * inv_eps_beta;
  const double cr = std::sqrt(sound_speed_sq(r.rho, r.p, g, rho_floor)) * inv_eps_beta;
  const double a = std::max(std::abs(ul) + cl, std::abs(ur) + cr);
  const double ql = l.rho * ul;
  const double qr = r.rho * ur;

  FluxPair f;
  f.f_rho = 0.5 * (ql + qr) - 0.5 * a * (r.rho - l.rho);
  f.f_conv = 0.5 * (ql * ul + qr * ur) - 0.5 * a * (qr - ql);
  f.f_prs = 0.5 * (l.p + r.p);
  return f;
}

}  // namespace

FluxPair rusanov_flux(FluxSide left, FluxSide right, const ModelParams& params, double rho_floor) {
  if (!std::isfinite(left.rho) || !std::isfinite(left.u) || !std::isfinite(right.rho) ||
      !std::isfinite(right.u))
    throw DomainError("rusanov_flux: non-finite input state");
  const double g = params.gamma;
  const SideValues l{left.rho, left.u, pressure(std::max(left.rho, 0.0), g)};
  const SideValues r{right.rho, right.u, pressure(std::max(right.rho, 0.0), g)};
  return rusanov(l, r, params, 1.0 / params.eps_pow(params.beta), rho_floor);
}

double cfl_dt(const Grid& grid, const Potential& phi, const ModelParams& params) {
  const double dx = grid.dx();
  const double parabolic = dx * dx / params.pressure_scale();
  const auto interior = phi.interior();
  double max_grad = 0.0;
  for (std::size_t i = 0; i + 1 < interior.size(); ++i)
    max_grad = std::max(max_grad, std::abs(interior[i + 1] - interior[i]) / dx);
  const double hyperbolic =
      max_grad > 0.0 ? dx / max_grad : std::numeric_limits<double>::infinity();
  return params.lambda_cfl * std::min(parabolic, hyperbolic);
}

double stable_dt(const Grid& grid, const Potential& phi, const ModelParams& params,
                 const State& state) {
  const double dt = cfl_dt(grid, phi, params);
  const double g = params.gamma;
  const double inv_eps_beta = 1.0 / params.eps_pow(params.beta);
  // c is monotone in rho, so max|u| + c(max rho) bounds max(|u| + c).
  double rho_max = 0.0;
  double u_max = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double r = state.rho[i];
    rho_max = std::max(rho_max, r);
    if (r > 0.0) u_max = std::max(u_max, std::abs(state.q[i]) / r);
  }
  const double c2 = g == 1.0 ? 1.0 : g * std::pow(rho_max, g - 1.0);
  const double slope = std::max(1.0, c2);  // max P'(rho)
  const double speed = u_max + std::sqrt(c2) * inv_eps_beta;
  if (!std::isfinite(slope) || !std::isfinite(speed)) return dt;

  // D(dt) = (A dt^2 + B dt) / (s + dt) with s = eps^(1+b).
  const double dx = grid.dx();
  const double s = params.eps_pow(1.0 + params.beta);
  const double a = params.pressure_scale() * slope / (dx * dx);
  const double b = s * speed / (2.0 * dx);
  constexpr double limit = 0.5;
  if ((a * dt * dt + b * dt) <= limit * (s + dt)) return dt;
  const double lin = limit - b;
  const double cap = (lin + std::sqrt(lin * lin + 4.0 * a * limit * s)) / (2.0 * a);
  return std::min(dt, cap);
}

void apply_bc(const State& state, const Potential& phi, const SchemeOptions& options,
              const ModelParams& params, GhostExtended& out) {
  const std::size_t n = state.size();
  if (phi.n_cells() != n) throw std::invalid_argument("apply_bc: potential/state size mismatch");
  out.rho.resize(n + 2);
  out.q.resize(n + 2);
  std::copy(state.rho.begin(), state.rho.end(), out.rho.begin() + 1);
  std::copy(state.q.begin(), state.q.end(), out.q.begin() + 1);

  switch (options.bc) {
    case BoundaryKind::Extrapolation:
      out.rho[0] = state.rho[0];
      out.q[0] = state.q[0];
      out.rho[n + 1] = state.rho[n - 1];
      out.q[n + 1] = state.q[n - 1];
      break;
    case BoundaryKind::Periodic:
      out.rho[0] = state.rho[n - 1];
      out.q[0] = state.q[n - 1];
      out.rho[n + 1] = state.rho[0];
      out.q[n + 1] = state.q[0];
      break;
    case BoundaryKind::EquilibriumGhost:
      out.rho[0] = analytic_equilibrium(phi.at(-1), options.equilibrium_constant, params);
      out.rho[n + 1] = analytic_equilibrium(phi.at(static_cast<std::ptrdiff_t>(n)),
                                            options.equilibrium_constant, params);
      out.q[0] = 0.0;
      out.q[n + 1] = 0.0;
      break;
    case BoundaryKind::HydrostaticGhost:
      out.rho[0] = hydrostatic_neighbor(state.rho[0], phi.at(-1) - phi.at(0), params);
      out.rho[n + 1] = hydrostatic_neighbor(
          state.rho[n - 1],
          phi.at(static_cast<std::ptrdiff_t>(n)) - phi.at(static_cast<std::ptrdiff_t>(n) - 1),
          params);
      out.q[0] = 0.0;
      out.q[n + 1] = 0.0;
      break;
  }
}

GhostExtended apply_bc(const State& state, const Potential& phi, const SchemeOptions& options,
                       const ModelParams& params) {
  GhostExtended out;
  apply_bc(state, phi, options, params, out);
  return out;
}

Stepper::Stepper(const ModelParams& params, const SchemeOptions& options, double dx)
    : params_(params), options_(options), dx_(dx) {
  params_.validate();
  if (options_.reconstruction == Reconstruction::E && params_.gamma == 1.0)
    throw UnsupportedError("E-reconstruction requires gamma > 1");
}

void Stepper::advance(State& state, const Potential& phi, double dt) {
  if (options_.variant == Variant::ExplicitNonAP) {
    apply_bc(state, phi, options_, params_, ext_);
    state = explicit_nonap_step(ext_, phi.samples(), dt, dx_, params_, options_.rho_floor);
  } else {
    advance_unified(state, phi, dt);
  }
  if (!state.is_finite()) throw BlowUpError(0, 0.0, "non-finite state after step");
}

void Stepper::advance_unified(State& state, const Potential& phi, double dt) {
  const std::size_t n = state.size();
  const double g = params_.gamma;
  const double floor = options_.rho_floor;
  const double scale = params_.pressure_scale();
  const double inv_eps_beta = 1.0 / params_.eps_pow(params_.beta);
  const StepCoefficients w = step_coefficients(params_, dt);
  const auto phis = phi.samples();

  apply_bc(state, phi, options_, params_, ext_);
  const auto& rho = ext_.rho;
  const auto& q = ext_.q;

  p_.resize(n + 2);
  kin_.resize(n + 2);
  for (std::size_t j = 0; j < n + 2; ++j) {
    const double r = rho[j];
    if (!(r >= 0.0)) throw BlowUpError(0, 0.0, "negative or non-finite density");
    p_[j] = detail::pressure_unchecked(r, g);
    kin_[j] = r > floor ? q[j] * q[j] / r : 0.0;
  }

  f_rho_.resize(n + 1);
  f_conv_.resize(n + 1);
  f_prs_.resize(n + 1);
  p_minus_.resize(n + 1);
  p_plus_.resize(n + 1);
  balance_.resize(n + 1);

  // Interface k sits between extended cells k and k+1.
  for (std::size_t k = 0; k <= n; ++k) {
    const double rl = rho[k];
    const double rr = rho[k + 1];
    const double ul = rl > floor ? q[k] / rl : 0.0;
    const double ur = rr > floor ? q[k + 1] / rr : 0.0;

    SideValues left{rl, ul, p_[k]};
    SideValues right{rr, ur, p_[k + 1]};
    switch (options_.reconstruction) {
      case Reconstruction::P: {
        // Only the side with the larger potential is lifted.
        const double rho_bar = 0.5 * (rl + rr);
        const double dphi = phis[k + 1] - phis[k];
        if (dphi > 0.0) {
          const LiftedSide side = lift_pressure(p_[k + 1], rho_bar, -dphi, scale, g);
          right = {side.rho, side.rho > 0.0 ? ur : 0.0, side.p};
        } else if (dphi < 0.0) {
          const LiftedSide side = lift_pressure(p_[k], rho_bar, dphi, scale, g);
          left = {side.rho, side.rho > 0.0 ? ul : 0.0, side.p};
        }
        break;
      }
      case Reconstruction::E: {
        const InterfaceStates s =
            reconstruct_e(rl, rr, phis[k], phis[k + 1], params_, q[k], q[k + 1]);
        if (s.rho_minus != rl)
          left = {s.rho_minus, s.u_minus, detail::pressure_unchecked(s.rho_minus, g)};
        if (s.rho_plus != rr)
          right = {s.rho_plus, s.u_plus, detail::pressure_unchecked(s.rho_plus, g)};
        break;
      }
      case Reconstruction::None: break;
    }

    const FluxPair f = rusanov(left, right, params_, inv_eps_beta, floor);
    f_rho_[k] = f.f_rho;
    f_conv_[k] = f.f_conv;
    f_prs_[k] = f.f_prs;
    p_minus_[k] = left.p;
    p_plus_[k] = right.p;
    balance_[k] = scale * (p_[k + 1] - p_[k]) - 0.5 * (rl + rr) * (phis[k + 1] - phis[k]);
  }

  const double hyp = w.a_hyp / dx_;
  const double kin = w.a_kin / (dx_ * dx_);
  const double grav = w.a_grav / (dx_ * dx_);
  const double src = w.a_src / dx_;
  const bool well_balanced = options_.reconstruction != Reconstruction::None;
  const double half_inv_dx = 0.5 / dx_;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;  // extended index
    state.rho[i] = rho[j] - hyp * (f_rho_[i + 1] - f_rho_[i]) +
                   kin * (kin_[j + 1] - 2.0 * kin_[j] + kin_[j - 1]) +
                   grav * (balance_[i + 1] - balance_[i]);

    double source;
    if (well_balanced) {
      source = src * (p_minus_[i + 1] - p_plus_[i]);
    } else {
      source = w.a_fric * rho[j] * (phis[j + 1] - phis[j - 1]) * half_inv_dx;
    }
    state.q[i] = q[j] - hyp * (f_conv_[i + 1] - f_conv_[i]) - src * (f_prs_[i + 1] - f_prs_[i]) -
                 w.a_fric * q[j] + source;
  }
}

State step(const State& state, const Potential& phi, double dt, const ModelParams& params,
           const SchemeOptions& options, double dx) {
  State next = state;
  Stepper stepper(params, options, dx);
  stepper.advance(next, phi, dt);
  return next;
}

RunResult run(const State& initial, const Grid& grid, const Potential& phi, double t_final,
              const ModelParams& params, const SchemeOptions& options, const RunControl& control) {
  if (!(t_final >= 0.0)) throw std::invalid_argument("run: t_final must be non-negative");
  if (initial.size() != grid.n_cells())
    throw std::invalid_argument("run: state/grid size mismatch");

  const auto started = std::chrono::steady_clock::now();
  RunResult result{initial, {}};
  State& state = result.state;
  RunDiagnostics& diag = result.diagnostics;

  auto record = [&](double t) {
    const auto [lo, hi] = std::minmax_element(state.rho.begin(), state.rho.end());
    diag.min_rho = std::min(diag.min_rho, *lo);
    diag.max_rho = std::max(diag.max_rho, *hi);
    diag.mass_trace.push_back(
        {t, grid.dx() * std::accumulate(state.rho.begin(), state.rho.end(), 0.0)});
  };
  diag.min_rho = std::numeric_limits<double>::infinity();
  diag.max_rho = -std::numeric_limits<double>::infinity();
  record(0.0);

  Stepper stepper(params, options, grid.dx());
  const bool fixed_dt = control.plain_cfl || !options.limit_diffusion_number ||
                        options.variant == Variant::ExplicitNonAP;
  const double base_dt = cfl_dt(grid, phi, params);
  double t = 0.0;
  while (t < t_final) {
    double dt = fixed_dt ? base_dt : stable_dt(grid, phi, params, state);
    bool last = false;
    if (t + dt >= t_final) {
      dt = t_final - t;
      last = true;
    }
    if (!(dt > 0.0)) break;
    try {
      stepper.advance(state, phi, dt);
    } catch (const BlowUpError& e) {
      throw BlowUpError(diag.steps + 1, t + dt,
                        std::string(e.what()) + " at step " + std::to_string(diag.steps + 1));
    }
    ++diag.steps;
    t = last ? t_final : t + dt;
    if (control.diag_stride > 0 && diag.steps % control.diag_stride == 0 && !last) record(t);
  }
  if (diag.mass_trace.size() == 1 || diag.mass_trace.back().t != t) record(t);

  diag.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace apwb

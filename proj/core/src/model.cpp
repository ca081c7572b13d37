#include "apwb/model.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace apwb {

void ModelParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  if (!(lambda_cfl > 0.0 && lambda_cfl < 1.0))
    throw std::invalid_argument("lambda_cfl must lie in (0, 1)");
}

Grid::Grid(double a, double b, std::size_t n_cells)
    : a_(a), b_(b), n_cells_(n_cells), dx_((b - a) / static_cast<double>(n_cells)) {
  if (n_cells == 0) throw std::invalid_argument("grid needs at least one cell");
  if (!(b > a)) throw std::invalid_argument("grid needs b > a");
}

std::vector<double> Grid::centers() const {
  std::vector<double> x(n_cells_);
  for (std::size_t i = 0; i < n_cells_; ++i) x[i] = center(static_cast<std::ptrdiff_t>(i));
  return x;
}

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Linear: return "linear";
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::Sinusoidal: return "sine";
    case PotentialKind::Custom: return "custom";
  }
  return "custom";
}

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "linear" || name == "x") return PotentialKind::Linear;
  if (name == "quadratic" || name == "x2") return PotentialKind::Quadratic;
  if (name == "sine" || name == "sin" || name == "sinusoidal") return PotentialKind::Sinusoidal;
  throw std::invalid_argument("unknown potential '" + std::string(name) + "'");
}

double Potential::evaluate(PotentialKind kind, double x) {
  switch (kind) {
    case PotentialKind::Linear: return x;
    case PotentialKind::Quadratic: return 0.5 * x * x;
    case PotentialKind::Sinusoidal: return std::sin(2.0 * std::numbers::pi * x);
    case PotentialKind::Custom: break;
  }
  throw std::invalid_argument("custom potential has no analytic form");
}

Potential Potential::sample(PotentialKind kind, const Grid& grid) {
  const auto n = static_cast<std::ptrdiff_t>(grid.n_cells());
  std::vector<double> s(grid.n_cells() + 2);
  for (std::ptrdiff_t i = -1; i <= n; ++i)
    s[static_cast<std::size_t>(i + 1)] = evaluate(kind, grid.center(i));
  return Potential(kind, std::move(s));
}

Potential Potential::from_samples(std::vector<double> with_ghosts) {
  if (with_ghosts.size() < 3)
    throw std::invalid_argument("potential needs at least one interior sample plus two ghosts");
  return Potential(PotentialKind::Custom, std::move(with_ghosts));
}

Potential Potential::constant(std::size_t n_cells, double value) {
  return from_samples(std::vector<double>(n_cells + 2, value));
}

State::State(std::vector<double> rho_, std::vector<double> q_)
    : rho(std::move(rho_)), q(std::move(q_)) {
  if (rho.size() != q.size()) throw std::invalid_argument("rho and q must have equal length");
}

bool State::is_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(rho.begin(), rho.end(), finite) && std::all_of(q.begin(), q.end(), finite);
}

StepCoefficients step_coefficients(const ModelParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_coefficients: dt must be positive");
  const double stiff = params.eps_pow(1.0 + params.beta);  // eps^(1+b)
  const double prs = params.pressure_scale();              // eps^(1-b)
  const double denom = stiff + dt;

  StepCoefficients c;
  c.c1 = stiff / denom;
  c.a_hyp = stiff * dt / denom;
  c.a_kin = stiff * dt * dt / denom;
  c.a_prs = prs * dt * dt / denom;
  c.a_grav = dt * dt / denom;
  c.a_fric = dt / denom;
  c.a_src = prs * dt / denom;
  return c;
}

double psi(double rho, double gamma) {
  if (gamma == 1.0) throw UnsupportedError("psi is undefined for gamma = 1");
  if (!(rho >= 0.0)) throw DomainError("psi: negative density");
  return gamma / (gamma - 1.0) * std::pow(rho, gamma - 1.0);
}

double psi_inverse(double y, double gamma) {
  if (gamma == 1.0) throw UnsupportedError("psi_inverse is undefined for gamma = 1");
  if (!(y >= 0.0)) throw DomainError("psi_inverse: negative argument");
  return std::pow((gamma - 1.0) * y / gamma, 1.0 / (gamma - 1.0));
}

double sound_speed(double rho, const ModelParams& params) {
  if (!(rho > 0.0)) throw DomainError("sound_speed: density must be positive");
  const double g = params.gamma;
  const double c2 = g == 1.0 ? 1.0 : g * std::pow(rho, g - 1.0);
  return std::sqrt(c2) / params.eps_pow(params.beta);
}

double isothermal_equilibrium(double phi_value, double c, const ModelParams& params) {
  return c * std::exp(params.eps_pow(params.beta - 1.0) * phi_value);
}

double isentropic_equilibrium(double phi_value, double c, const ModelParams& params) {
  const double g = params.gamma;
  if (!(g > 1.0)) throw UnsupportedError("isentropic equilibrium requires gamma > 1");
  const double term = (g - 1.0) / g * params.eps_pow(params.beta - 1.0) * phi_value;
  double base = term + c;
  if (base < 0.0) {
    // Round-off around the vacuum point phi = -gamma/(gamma-1) C.
    const double slack =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(term), std::abs(c));
    if (base < -slack) throw DomainError("isentropic equilibrium does not exist here");
    base = 0.0;
  }
  return std::pow(base, 1.0 / (g - 1.0));
}

double analytic_equilibrium(double phi_value, double c, const ModelParams& params) {
  return params.gamma == 1.0 ? isothermal_equilibrium(phi_value, c, params)
                             : isentropic_equilibrium(phi_value, c, params);
}

}  // namespace apwb

#include "apwb/wellbalance.hpp"

#include <limits>
#include <stdexcept>

namespace apwb {

InterfaceStates reconstruct_e(double rho_i, double rho_ip1, double phi_i, double phi_ip1,
                              const ModelParams& params, double q_i, double q_ip1) {
  if (params.gamma == 1.0) throw UnsupportedError("E-reconstruction requires gamma > 1");
  if (!(rho_i >= 0.0 && rho_ip1 >= 0.0)) throw DomainError("reconstruct_e: negative density");
  const double g = params.gamma;
  const double scale = params.pressure_scale();

  InterfaceStates s;
  s.phi_star = std::min(phi_i, phi_ip1);
  auto side = [&](double rho, double phi) {
    if (phi == s.phi_star) return rho;
    const double lifted = std::max(0.0, scale * psi(rho, g) + (s.phi_star - phi));
    return psi_inverse(lifted / scale, g);
  };
  s.rho_minus = side(rho_i, phi_i);
  s.rho_plus = side(rho_ip1, phi_ip1);
  s.u_minus = s.rho_minus > 0.0 ? detail::velocity(rho_i, q_i) : 0.0;
  s.u_plus = s.rho_plus > 0.0 ? detail::velocity(rho_ip1, q_ip1) : 0.0;
  return s;
}

double momentum_source(double rho_minus_right, double rho_plus_left, double gamma, double dx) {
  return (pressure(rho_minus_right, gamma) - pressure(rho_plus_left, gamma)) / dx;
}

double hydrostatic_neighbor(double rho, double dphi, const ModelParams& params) {
  if (!(rho > 0.0)) throw DomainError("hydrostatic_neighbor: density must be positive");
  if (dphi == 0.0) return rho;
  const double scale = params.pressure_scale();
  const double g = params.gamma;

  if (g == 1.0) {
    const double num = scale + 0.5 * dphi;
    const double den = scale - 0.5 * dphi;
    if (!(num > 0.0 && den > 0.0))
      throw EquilibriumError("no positive discrete equilibrium: |dphi| >= 2 eps^(1-beta)");
    return rho * num / den;
  }

  // f is convex in x; f(rho) = -rho dphi fixes the side of the root.
  const double p_rho = std::pow(rho, g);
  auto f = [&](double x) { return scale * (std::pow(x, g) - p_rho) - 0.5 * (rho + x) * dphi; };
  double lo;
  double hi;
  if (dphi > 0.0) {
    lo = rho;
    hi = rho * 1e3;
    if (!(f(hi) > 0.0)) throw EquilibriumError("no discrete equilibrium root in [rho, 1e3 rho]");
  } else {
    hi = rho;
    lo = rho * 1e-3;
    if (!(f(lo) < 0.0)) throw EquilibriumError("no discrete equilibrium root in [1e-3 rho, rho]");
  }
  // Bisect down to adjacent doubles.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

std::vector<double> build_discrete_equilibrium(std::span<const double> phi, double rho_anchor,
                                               const ModelParams& params) {
  if (!(rho_anchor > 0.0))
    throw DomainError("build_discrete_equilibrium: anchor density must be positive");
  std::vector<double> rho(phi.size());
  if (rho.empty()) return rho;
  rho[0] = rho_anchor;
  for (std::size_t i = 0; i + 1 < phi.size(); ++i)
    rho[i + 1] = hydrostatic_neighbor(rho[i], phi[i + 1] - phi[i], params);
  return rho;
}

double equilibrium_residual(const State& state, std::span<const double> phi,
                            const ModelParams& params) {
  if (phi.size() != state.size())
    throw std::invalid_argument("equilibrium_residual: potential/state length mismatch");
  double balance = 0.0;
  for (std::size_t i = 0; i + 1 < state.size(); ++i)
    balance = std::max(balance, std::abs(interface_balance(state.rho[i], state.rho[i + 1], phi[i],
                                                           phi[i + 1], params)));
  double qmax = 0.0;
  for (double v : state.q) qmax = std::max(qmax, std::abs(v));
  return balance + qmax;
}

}  // namespace apwb

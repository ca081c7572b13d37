#pragma once

// Hydrostatic interface reconstruction and discrete hydrostatic states.
//
// A discrete hydrostatic state satisfies q_i = 0 and, at every interface,
//   eps^(1-beta) (P(rho_{i+1}) - P(rho_i)) = rhobar_{i+1/2} (phi_{i+1} - phi_i)
// with rhobar the arithmetic mean. The P-reconstruction is built on the same
// relation, so at such a state both interface values coincide.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "apwb/model.hpp"

namespace apwb {

struct InterfaceStates {
  double rho_minus = 0;  ///< left side of the interface, from cell i
  double rho_plus = 0;   ///< right side, from cell i+1
  double u_minus = 0;
  double u_plus = 0;
  double phi_star = 0;  ///< min(phi_i, phi_{i+1})
};

namespace detail {

inline double velocity(double rho, double q) { return rho > 0.0 ? q / rho : 0.0; }

inline double invert_pressure_unchecked(double y, double gamma) {
  return gamma == 1.0 ? y : std::pow(y, 1.0 / gamma);
}

inline double pressure_unchecked(double rho, double gamma) {
  return gamma == 1.0 ? rho : std::pow(rho, gamma);
}

}  // namespace detail

/// Hydrostatically lifted density and pressure for one side of an interface:
/// eps^(1-b) P(rho*) = [eps^(1-b) p_cell + rho_bar (phi_star - phi_cell)]_+.
struct LiftedSide {
  double rho;
  double p;
};

inline LiftedSide lift_pressure(double p_cell, double rho_bar, double dphi_star, double scale,
                                double gamma) {
  const double lifted = std::max(0.0, scale * p_cell + rho_bar * dphi_star);
  const double p = lifted / scale;
  return {detail::invert_pressure_unchecked(p, gamma), p};
}

/// P-reconstruction. Momenta are optional and only feed the carried velocities.
inline InterfaceStates reconstruct_p(double rho_i, double rho_ip1, double phi_i, double phi_ip1,
                                     const ModelParams& params, double q_i = 0.0,
                                     double q_ip1 = 0.0) {
  if (!(rho_i >= 0.0 && rho_ip1 >= 0.0)) throw DomainError("reconstruct_p: negative density");
  const double g = params.gamma;
  const double scale = params.pressure_scale();
  const double rho_bar = 0.5 * (rho_i + rho_ip1);

  InterfaceStates s;
  s.phi_star = std::min(phi_i, phi_ip1);
  auto side = [&](double rho, double phi) {
    if (phi == s.phi_star) return rho;
    return lift_pressure(detail::pressure_unchecked(rho, g), rho_bar, s.phi_star - phi, scale, g)
        .rho;
  };
  s.rho_minus = side(rho_i, phi_i);
  s.rho_plus = side(rho_ip1, phi_ip1);
  s.u_minus = s.rho_minus > 0.0 ? detail::velocity(rho_i, q_i) : 0.0;
  s.u_plus = s.rho_plus > 0.0 ? detail::velocity(rho_ip1, q_ip1) : 0.0;
  return s;
}

/// E-reconstruction on psi(rho); requires gamma > 1.
InterfaceStates reconstruct_e(double rho_i, double rho_ip1, double phi_i, double phi_ip1,
                              const ModelParams& params, double q_i = 0.0, double q_ip1 = 0.0);

/// [P(rho^-_{i+1/2}) - P(rho^+_{i-1/2})] / dx. The 1/eps^(2 beta) stiffness is
/// left to the caller's grouped weight.
double momentum_source(double rho_minus_right, double rho_plus_left, double gamma, double dx);

/// Density x in the neighbouring cell with eps^(1-beta)(P(x) - P(rho)) = (rho + x)/2 * dphi,
/// where dphi = phi_neighbor - phi_here. Throws EquilibriumError when no positive
/// root exists.
double hydrostatic_neighbor(double rho, double dphi, const ModelParams& params);

/// Discrete hydrostatic densities over `phi` starting from rho_anchor in the
/// first cell.
std::vector<double> build_discrete_equilibrium(std::span<const double> phi, double rho_anchor,
                                               const ModelParams& params);

/// Signed balance defect at one interface.
inline double interface_balance(double rho_i, double rho_ip1, double phi_i, double phi_ip1,
                                const ModelParams& params) {
  const double g = params.gamma;
  return params.pressure_scale() *
             (detail::pressure_unchecked(rho_ip1, g) - detail::pressure_unchecked(rho_i, g)) -
         0.5 * (rho_i + rho_ip1) * (phi_ip1 - phi_i);
}

/// max_i |interface balance defect| + max_i |q_i|; `phi` are the interior samples.
double equilibrium_residual(const State& state, std::span<const double> phi,
                            const ModelParams& params);

}  // namespace apwb

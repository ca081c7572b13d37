#pragma once

// Reference and ablation solvers: the explicit limit discretisations reached
// by the unified scheme as eps -> 0, a donor-cell transport solver, and a
// fully explicit (non asymptotic-preserving) Euler update.
//
// The density-only steps take ghost-extended arrays (size n+2, one ghost per
// side) for both rho and phi and return the n interior values.

#include <cstddef>
#include <span>
#include <vector>

#include "apwb/model.hpp"
#include "apwb/scheme.hpp"

namespace apwb {

/// rho + dt/dx^2 Dx2 P(rho) - dt/dx^2 (rhobar dphi)_{i+1/2} + dt/dx^2 (rhobar dphi)_{i-1/2}
std::vector<double> porous_medium_step(std::span<const double> rho_ext,
                                       std::span<const double> phi_ext, double dt, double dx,
                                       double gamma);

/// rho - dt/dx^2 [(rhobar dphi)_{i+1/2} - (rhobar dphi)_{i-1/2}]
std::vector<double> transport_limit_step(std::span<const double> rho_ext,
                                         std::span<const double> phi_ext, double dt, double dx);

/// Donor-cell upwind for d_t rho + d_x(rho d_x phi) = 0 with interface
/// velocity (phi_{i+1} - phi_i)/dx.
std::vector<double> transport_upwind_step(std::span<const double> rho_ext,
                                          std::span<const double> phi_ext, double dt, double dx);

/// Forward-Euler finite-volume update of the stiff system: Rusanov flux at raw
/// cell values (pressure scaled by 1/eps^(2 beta)) plus the pointwise source
/// -(q - rho d_x phi)/eps^(1+beta) with a centred potential gradient.
State explicit_nonap_step(const GhostExtended& ext, std::span<const double> phi_ext, double dt,
                          double dx, const ModelParams& params, double rho_floor = 1e-12);

/// Ghost-extends a density array; Extrapolation and Periodic only.
std::vector<double> extend_density(std::span<const double> rho, BoundaryKind bc);

enum class LimitSolver { PorousMedium, TransportCentral, TransportUpwind };

/// Marches a density-only reference solver to t_final with the same CFL rule
/// as the unified scheme.
std::vector<double> run_limit_solver(LimitSolver solver, std::vector<double> rho0, const Grid& grid,
                                     const Potential& phi, double t_final,
                                     const ModelParams& params, BoundaryKind bc);

}  // namespace apwb

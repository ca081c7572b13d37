#pragma once

// Explicit asymptotic-preserving, well-balanced finite-volume update.
//
// One step, with Dx2 the centred second difference and the weights of
// StepCoefficients:
//
//   rho_i <- rho_i - a_hyp/dx (F^rho_{i+1/2} - F^rho_{i-1/2})
//                  + a_kin/dx^2 Dx2(q^2/rho)_i
//                  + a_grav/dx^2 (B_{i+1/2} - B_{i-1/2})
//   q_i   <- q_i - a_hyp/dx (F^conv_{i+1/2} - F^conv_{i-1/2})
//                - a_src/dx (F^prs_{i+1/2} - F^prs_{i-1/2})
//                - a_fric q_i + a_src/dx (P(rho^-_{i+1/2}) - P(rho^+_{i-1/2}))
//
// where B_{i+1/2} = eps^(1-b)(P_{i+1} - P_i) - rhobar_{i+1/2}(phi_{i+1} - phi_i)
// is the discrete hydrostatic balance (a_prs = eps^(1-b) a_grav), and F is the
// Rusanov flux evaluated at hydrostatically reconstructed interface states.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "apwb/model.hpp"
#include "apwb/wellbalance.hpp"

namespace apwb {

enum class BoundaryKind {
  Extrapolation,     ///< copy the adjacent interior cell
  Periodic,          ///< wrap around
  EquilibriumGhost,  ///< analytic hydrostatic profile at the ghost centres, q = 0
  HydrostaticGhost,  ///< discrete hydrostatic extension of the boundary cell, q = 0
};

enum class Reconstruction { P, E, None };

enum class Variant { UnifiedAP, ExplicitNonAP };

std::string_view to_string(BoundaryKind bc);
std::string_view to_string(Reconstruction r);
std::string_view to_string(Variant v);
BoundaryKind parse_boundary_kind(std::string_view name);
Reconstruction parse_reconstruction(std::string_view name);
Variant parse_variant(std::string_view name);

struct SchemeOptions {
  BoundaryKind bc = BoundaryKind::Extrapolation;
  Reconstruction reconstruction = Reconstruction::P;
  Variant variant = Variant::UnifiedAP;
  double rho_floor = 1e-12;
  /// Integration constant C of the analytic profile used by EquilibriumGhost.
  double equilibrium_constant = 1.0;
  /// Shrink dt so that the explicit diffusion number of the mass update stays
  /// below 1/2. Only binds in the stiff parabolic regime with P'(rho) > 1.
  bool limit_diffusion_number = true;
};

/// One side of an interface: density and carried velocity.
struct FluxSide {
  double rho = 0;
  double u = 0;
};

/// Rusanov flux with the pressure average kept apart so that 1/eps^(2 beta)
/// is applied through a grouped weight by the caller.
struct FluxPair {
  double f_rho = 0;   ///< mass flux, dissipation included
  double f_conv = 0;  ///< q u average, momentum dissipation included
  double f_prs = 0;   ///< average of P (unscaled)
};

/// Throws DomainError on non-finite input.
FluxPair rusanov_flux(FluxSide left, FluxSide right, const ModelParams& params,
                      double rho_floor = 1e-12);

/// dt = lambda min(dx^2 / eps^(1-b), dx / max|d_x phi|) with the gradient taken
/// over the interior interfaces.
double cfl_dt(const Grid& grid, const Potential& phi, const ModelParams& params);

/// cfl_dt, reduced (never increased) until the mass-update diffusion number
///   (a_prs max P'(rho) / dx^2 + a_hyp max(|u| + c) / (2 dx)) <= 1/2.
double stable_dt(const Grid& grid, const Potential& phi, const ModelParams& params,
                 const State& state);

/// State extended by one ghost cell per side; index 0 and n+1 are ghosts.
struct GhostExtended {
  std::vector<double> rho;
  std::vector<double> q;
};

GhostExtended apply_bc(const State& state, const Potential& phi, const SchemeOptions& options,
                       const ModelParams& params);
void apply_bc(const State& state, const Potential& phi, const SchemeOptions& options,
              const ModelParams& params, GhostExtended& out);

/// Reusable work buffers for repeated steps on one grid.
class Stepper {
 public:
  Stepper(const ModelParams& params, const SchemeOptions& options, double dx);

  /// Advances `state` by dt in place. Throws BlowUpError (step index 0) if the
  /// result is not finite.
  void advance(State& state, const Potential& phi, double dt);

  const ModelParams& params() const { return params_; }
  const SchemeOptions& options() const { return options_; }

 private:
  void advance_unified(State& state, const Potential& phi, double dt);

  ModelParams params_;
  SchemeOptions options_;
  double dx_;
  GhostExtended ext_;
  std::vector<double> p_;      // P at ghost-extended cells
  std::vector<double> kin_;    // q^2/rho at ghost-extended cells
  std::vector<double> f_rho_;  // per interface
  std::vector<double> f_conv_;
  std::vector<double> f_prs_;
  std::vector<double> p_minus_;
  std::vector<double> p_plus_;
  std::vector<double> balance_;
};

State step(const State& state, const Potential& phi, double dt, const ModelParams& params,
           const SchemeOptions& options, double dx);

struct RunControl {
  /// Record min/max rho and total mass every `diag_stride` steps (0: only ends).
  std::size_t diag_stride = 0;
  /// Use cfl_dt verbatim, ignoring SchemeOptions::limit_diffusion_number.
  bool plain_cfl = false;
};

struct MassSample {
  double t = 0;
  double mass = 0;
};

struct RunDiagnostics {
  std::size_t steps = 0;
  double wall_seconds = 0;
  double min_rho = 0;
  double max_rho = 0;
  std::vector<MassSample> mass_trace;
};

struct RunResult {
  State state;
  RunDiagnostics diagnostics;
};

/// Marches to t_final with dt from the CFL rule, clipping the last step.
/// Throws BlowUpError carrying the failing step index and time.
RunResult run(const State& initial, const Grid& grid, const Potential& phi, double t_final,
              const ModelParams& params, const SchemeOptions& options,
              const RunControl& control = {});

}  // namespace apwb

#pragma once

// Domain types and pressure-law mathematics for the scaled isentropic Euler
// system with gravity and friction:
//
//   d_t rho + d_x q = 0
//   d_t q + d_x (q^2/rho) + d_x P(rho) / eps^(2 beta) = -(q - rho d_x phi) / eps^(1+beta)
//
// with P(rho) = rho^gamma. beta = 1 relaxes to the porous medium equation,
// beta in [0,1) to the transport equation d_t rho + d_x(rho d_x phi) = 0.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apwb/errors.hpp"

namespace apwb {

struct ModelParams {
  double epsilon = 1.0;      ///< relaxation parameter, (0, 1]
  double beta = 1.0;         ///< scaling exponent, [0, 1]
  double gamma = 1.4;        ///< adiabatic exponent, >= 1
  double lambda_cfl = 0.45;  ///< CFL safety factor, (0, 1)

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;

  /// epsilon^exponent, exactly 1 for a zero exponent (beta = 1 paths).
  double eps_pow(double exponent) const {
    return exponent == 0.0 ? 1.0 : std::pow(epsilon, exponent);
  }

  /// epsilon^(1-beta): the weight in front of P in the discrete balance.
  double pressure_scale() const { return eps_pow(1.0 - beta); }
};

class Grid {
 public:
  Grid(double a, double b, std::size_t n_cells);

  double a() const { return a_; }
  double b() const { return b_; }
  std::size_t n_cells() const { return n_cells_; }
  double dx() const { return dx_; }

  /// Cell center x_i for i in [-1, n_cells]; -1 and n_cells are the ghosts.
  double center(std::ptrdiff_t i) const { return a_ + (static_cast<double>(i) + 0.5) * dx_; }
  std::vector<double> centers() const;

 private:
  double a_;
  double b_;
  std::size_t n_cells_;
  double dx_;
};

enum class PotentialKind { Linear, Quadratic, Sinusoidal, Custom };

std::string_view to_string(PotentialKind kind);
/// Accepts "linear", "quadratic", "sine" (and the enum spellings).
PotentialKind parse_potential_kind(std::string_view name);

/// Gravitational potential sampled at cell centers, one ghost cell per side.
/// samples()[0] and samples()[n+1] are the ghost values.
class Potential {
 public:
  static double evaluate(PotentialKind kind, double x);

  static Potential sample(PotentialKind kind, const Grid& grid);
  /// User-supplied samples, ghosts included (size n_cells + 2).
  static Potential from_samples(std::vector<double> with_ghosts);
  static Potential constant(std::size_t n_cells, double value = 0.0);

  PotentialKind kind() const { return kind_; }
  std::size_t n_cells() const { return samples_.size() - 2; }
  std::span<const double> samples() const { return samples_; }
  std::span<const double> interior() const {
    return std::span<const double>(samples_).subspan(1, n_cells());
  }
  /// phi at cell i in [-1, n_cells].
  double at(std::ptrdiff_t i) const { return samples_[static_cast<std::size_t>(i + 1)]; }

 private:
  Potential(PotentialKind kind, std::vector<double> samples)
      : kind_(kind), samples_(std::move(samples)) {}

  PotentialKind kind_;
  std::vector<double> samples_;
};

struct State {
  std::vector<double> rho;
  std::vector<double> q;

  State() = default;
  explicit State(std::size_t n) : rho(n, 0.0), q(n, 0.0) {}
  State(std::vector<double> rho_, std::vector<double> q_);

  std::size_t size() const { return rho.size(); }
  bool is_finite() const;
};

/// Weights of the explicit reformulated update for one time step. Each one
/// is a single grouped expression over (eps^(1+beta) + dt).
struct StepCoefficients {
  double c1 = 0;      ///< eps^(1+b) / (eps^(1+b) + dt)
  double a_hyp = 0;   ///< c1 dt
  double a_kin = 0;   ///< c1 dt^2
  double a_prs = 0;   ///< eps^(1-b) dt^2 / (eps^(1+b) + dt)
  double a_grav = 0;  ///< dt^2 / (eps^(1+b) + dt)
  double a_fric = 0;  ///< dt / (eps^(1+b) + dt)
  double a_src = 0;   ///< eps^(1-b) dt / (eps^(1+b) + dt) = c1 dt / eps^(2b)
};

StepCoefficients step_coefficients(const ModelParams& params, double dt);

inline double pressure(double rho, double gamma) {
  if (!(rho >= 0.0)) throw DomainError("pressure: negative density");
  return gamma == 1.0 ? rho : std::pow(rho, gamma);
}

inline double pressure_inverse(double y, double gamma) {
  if (!(y >= 0.0)) throw DomainError("pressure_inverse: negative pressure");
  return gamma == 1.0 ? y : std::pow(y, 1.0 / gamma);
}

/// Enthalpy psi(rho) = gamma/(gamma-1) rho^(gamma-1); gamma > 1 only.
double psi(double rho, double gamma);
double psi_inverse(double y, double gamma);

/// sqrt(gamma rho^(gamma-1)) / eps^beta.
double sound_speed(double rho, const ModelParams& params);

/// C exp(eps^(beta-1) phi).
double isothermal_equilibrium(double phi_value, double c, const ModelParams& params);
/// ((gamma-1)/gamma eps^(beta-1) phi + C)^(1/(gamma-1)).
double isentropic_equilibrium(double phi_value, double c, const ModelParams& params);
/// Isothermal profile for gamma = 1, isentropic otherwise.
double analytic_equilibrium(double phi_value, double c, const ModelParams& params);

}  // namespace apwb

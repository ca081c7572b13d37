#pragma once

// Batch experiments: Sod relaxation, hydrostatic error tables, perturbation
// and long-time runs, and the mesh-sensitivity sweep. Each driver returns
// plain result data; `run_experiment` turns it into CSV tables.

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "apwb/harness/config.hpp"
#include "apwb/harness/csv.hpp"
#include "apwb/model.hpp"
#include "apwb/scheme.hpp"

namespace apwb::harness {

/// dx * sum |numeric - exact|. Throws std::invalid_argument on length mismatch.
double l1_error(std::span<const double> numeric, std::span<const double> exact, double dx);
/// max |a - b|. Throws std::invalid_argument on length mismatch.
double max_error(std::span<const double> a, std::span<const double> b);
/// sum |a_{i+1} - a_i|, wrapping around when periodic.
double total_variation(std::span<const double> a, bool periodic);
/// Averages groups of `factor` consecutive cells.
std::vector<double> coarsen(std::span<const double> fine, std::size_t factor);

struct ErrorRecord {
  double epsilon = 0;
  PotentialKind potential = PotentialKind::Linear;
  std::size_t n_cells = 0;
  double l1_rho = 0;
  double l1_q = 0;
  std::size_t steps = 0;
};

/// Density/momentum snapshot on a grid.
struct Profile {
  std::string label;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> q;
  std::size_t steps = 0;
  double wall_seconds = 0;
};

struct BlowUp {
  std::size_t step = 0;
  double time = 0;
  std::string message;
};

/// Steps ceil(t_final / cfl_dt); the stability limit can only add to this.
std::size_t projected_steps(const Grid& grid, const Potential& phi, const ModelParams& params,
                            double t_final);

struct SodResult {
  ModelParams params;
  double t_final = 0;
  std::optional<Profile> coarse;
  std::optional<Profile> fine;       ///< 10x refined run, eps = 1 only
  std::optional<Profile> reference;  ///< limit solver, eps < 1 only
  std::string reference_kind;        ///< "porous-medium" or "transport-upwind"
  double l1_to_reference = -1;       ///< -1 when no reference was run
  std::optional<BlowUp> blowup;
};
SodResult sod_experiment(const ExperimentConfig& config);

struct HydroTableResult {
  ModelParams params;  ///< epsilon varies per record
  double t_final = 0;
  std::vector<ErrorRecord> records;  ///< eps-major, then potential, then cells
};
/// `progress` receives one line per finished job (may be empty).
HydroTableResult hydro_table_experiment(
    const ExperimentConfig& config, const std::function<void(const std::string&)>& progress = {});

struct PerturbResult {
  ModelParams params;
  double zeta = 0;
  double t_final = 0;
  std::vector<double> x;
  /// Analytic equilibrium at the centres; the discrete one for hydrostatic ghosts.
  std::vector<double> rho_eq;
  Profile wb;
  Profile non_wb;
  Profile reference;  ///< well-balanced run on a 5x finer mesh, sampled at the coarse centres
  double err_wb = 0;  ///< max |rho - rho_reference|
  double err_non_wb = 0;
  double amp_wb = 0;  ///< max |rho - rho_eq|
  double amp_non_wb = 0;
};
PerturbResult perturb_experiment(const ExperimentConfig& config);

struct TimeSeries {
  double epsilon = 0;
  Reconstruction reconstruction = Reconstruction::P;
  std::vector<double> t;
  std::vector<double> max_q;
  std::vector<double> l1_rho_err;
  std::size_t steps = 0;
  double wall_seconds = 0;
  std::optional<BlowUp> blowup;
};
struct LongtimeResult {
  ModelParams params;
  double zeta = 0;
  double t_final = 0;
  std::vector<TimeSeries> series;  ///< per eps: well-balanced then non-well-balanced
};
LongtimeResult longtime_experiment(const ExperimentConfig& config);

enum class MeshOutcome { Stable, Oscillatory, BlowUp };
std::string_view to_string(MeshOutcome outcome);

struct MeshRecord {
  double beta = 0;
  Variant variant = Variant::UnifiedAP;
  std::size_t n_cells = 0;
  double dx = 0;
  MeshOutcome outcome = MeshOutcome::Stable;
  std::optional<Profile> profile;
  std::optional<BlowUp> blowup;
  double tv = 0;
  double tv_ratio = 0;  ///< TV over the AP run's TV on the same mesh
};
struct MeshPair {
  double beta = 0;
  std::size_t coarse_cells = 0;
  std::size_t fine_cells = 0;
  double l1 = 0;  ///< AP profiles, fine one averaged onto the coarse cells
};
struct MeshSweepResult {
  ModelParams params;
  double t_final = 0;
  std::vector<MeshRecord> records;
  std::vector<MeshPair> ap_pairs;
};
/// Non-AP runs whose TV reaches this multiple of the AP TV count as oscillatory.
inline constexpr double kOscillationTvRatio = 1.5;
MeshSweepResult mesh_sweep_experiment(const ExperimentConfig& config);

struct SingleRunResult {
  ModelParams params;
  SchemeOptions options;
  double t_final = 0;
  std::optional<Profile> profile;
  std::optional<BlowUp> blowup;
};
SingleRunResult single_run_experiment(const ExperimentConfig& config);

struct OutputFile {
  std::string name;
  CsvTable table;
};

struct ExperimentReport {
  std::vector<OutputFile> files;
  std::vector<std::string> summary;
  /// A run expected to be stable blew up: any AP run, or a single `run`.
  bool stability_violated = false;
};

/// Runs the configured experiment and assembles its CSV tables. Progress and
/// projected step counts go to `log` when given.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);
/// Writes every file of the report below config.out_dir.
void write_report(const ExperimentReport& report, const ExperimentConfig& config);

CsvTable profile_table(const Profile& profile);

}  // namespace apwb::harness

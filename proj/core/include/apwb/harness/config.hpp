#pragma once

// Experiment configuration: a flat set of optional overrides. Each experiment
// resolves unset fields to its own defaults.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apwb/model.hpp"
#include "apwb/scheme.hpp"

namespace apwb::harness {

enum class ExperimentKind { Run, Sod, HydroTable, Perturb, Longtime, MeshSweep };

/// Initial data for the generic `run` experiment.
enum class InitialData {
  Equilibrium,  ///< analytic hydrostatic profile plus zeta bump
  Discrete,     ///< build_discrete_equilibrium from rho = 1 in the first cell
  Sod,          ///< (1 | 0.125) at the domain midpoint
  Arch,         ///< 1 on (-0.2, 0.2), 2 elsewhere, on [-0.5, 0.5]
};

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(InitialData init);
ExperimentKind parse_experiment_kind(std::string_view name);
InitialData parse_initial_data(std::string_view name);

/// Invalid key, malformed value or out-of-range setting.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Run;

  std::optional<double> epsilon;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> lambda_cfl;
  std::optional<double> t_final;
  std::optional<double> zeta;
  std::optional<std::size_t> cells;
  std::optional<PotentialKind> potential;
  std::optional<BoundaryKind> bc;
  std::optional<Reconstruction> reconstruction;
  std::optional<Variant> variant;
  std::optional<InitialData> init;

  std::filesystem::path out_dir = ".";
  bool fast = false;
  /// Write wall time into CSV metadata. Off gives byte-reproducible files.
  bool record_timing = true;
  /// Worker threads for table jobs; 0 picks the hardware concurrency.
  std::size_t jobs = 0;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Sets one key (flag name without dashes, '_' and '-' interchangeable).
/// Throws ConfigError.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
void apply_settings(ExperimentConfig& config, const KeyValues& settings);

/// Parses `key = value` lines; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);

/// Settings that are present, in canonical key order, as key=value strings.
KeyValues echo(const ExperimentConfig& config);

/// Throws ConfigError if an explicitly set value is out of range.
void validate(const ExperimentConfig& config);

/// Version string in `git describe` form.
std::string version_string();

}  // namespace apwb::harness

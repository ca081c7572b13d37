#include "apwb/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#ifndef APWB_VERSION_STRING
#define APWB_VERSION_STRING "unknown"
#endif

namespace apwb::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string canonical_key(std::string_view key) {
  std::string k = trim(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

double to_double(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("'" + std::string(key) + "': expected a number, got '" + v + "'");
  return out;
}

std::size_t to_count(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" + v +
                      "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (v.empty() || v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("'" + std::string(key) + "': expected a boolean, got '" + v + "'");
}

template <typename Parse>
auto parse_enum(std::string_view key, std::string_view value, Parse parse) {
  try {
    return parse(trim(value));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + std::string(key) + "': " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Run: return "run";
    case ExperimentKind::Sod: return "sod";
    case ExperimentKind::HydroTable: return "hydro-table";
    case ExperimentKind::Perturb: return "perturb";
    case ExperimentKind::Longtime: return "longtime";
    case ExperimentKind::MeshSweep: return "mesh-sweep";
  }
  return "run";
}

std::string_view to_string(InitialData init) {
  switch (init) {
    case InitialData::Equilibrium: return "equilibrium";
    case InitialData::Discrete: return "discrete";
    case InitialData::Sod: return "sod";
    case InitialData::Arch: return "arch";
  }
  return "equilibrium";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::Run, ExperimentKind::Sod, ExperimentKind::HydroTable,
                 ExperimentKind::Perturb, ExperimentKind::Longtime, ExperimentKind::MeshSweep})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

InitialData parse_initial_data(std::string_view name) {
  for (auto k :
       {InitialData::Equilibrium, InitialData::Discrete, InitialData::Sod, InitialData::Arch})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown initial data '" + std::string(name) + "'");
}

void apply_setting(ExperimentConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = canonical_key(raw_key);
  if (key == "experiment")
    c.experiment = parse_enum(key, value, parse_experiment_kind);
  else if (key == "eps" || key == "epsilon")
    c.epsilon = to_double(key, value);
  else if (key == "beta")
    c.beta = to_double(key, value);
  else if (key == "gamma")
    c.gamma = to_double(key, value);
  else if (key == "cfl")
    c.lambda_cfl = to_double(key, value);
  else if (key == "t-final")
    c.t_final = to_double(key, value);
  else if (key == "zeta")
    c.zeta = to_double(key, value);
  else if (key == "cells")
    c.cells = to_count(key, value);
  else if (key == "potential")
    c.potential = parse_enum(key, value, parse_potential_kind);
  else if (key == "bc")
    c.bc = parse_enum(key, value, parse_boundary_kind);
  else if (key == "recon")
    c.reconstruction = parse_enum(key, value, parse_reconstruction);
  else if (key == "variant")
    c.variant = parse_enum(key, value, parse_variant);
  else if (key == "init")
    c.init = parse_enum(key, value, parse_initial_data);
  else if (key == "out")
    c.out_dir = trim(value);
  else if (key == "fast")
    c.fast = to_bool(key, value);
  else if (key == "timing")
    c.record_timing = to_bool(key, value);
  else if (key == "jobs")
    c.jobs = to_count(key, value);
  else
    throw ConfigError("unknown setting '" + std::string(raw_key) + "'");
}

void apply_settings(ExperimentConfig& config, const KeyValues& settings) {
  for (const auto& [k, v] : settings) apply_setting(config, k, v);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_key_values(in);
}

KeyValues echo(const ExperimentConfig& c) {
  KeyValues out;
  out.emplace_back("experiment", std::string(to_string(c.experiment)));
  auto num = [&](const char* k, const std::optional<double>& v) {
    if (v) out.emplace_back(k, format_double(*v));
  };
  num("eps", c.epsilon);
  num("beta", c.beta);
  num("gamma", c.gamma);
  num("cfl", c.lambda_cfl);
  num("t-final", c.t_final);
  num("zeta", c.zeta);
  if (c.cells) out.emplace_back("cells", std::to_string(*c.cells));
  if (c.potential) out.emplace_back("potential", std::string(to_string(*c.potential)));
  if (c.bc) out.emplace_back("bc", std::string(to_string(*c.bc)));
  if (c.reconstruction) out.emplace_back("recon", std::string(to_string(*c.reconstruction)));
  if (c.variant) out.emplace_back("variant", std::string(to_string(*c.variant)));
  if (c.init) out.emplace_back("init", std::string(to_string(*c.init)));
  out.emplace_back("fast", c.fast ? "true" : "false");
  return out;
}

void validate(const ExperimentConfig& c) {
  ModelParams p;
  if (c.epsilon) p.epsilon = *c.epsilon;
  if (c.beta) p.beta = *c.beta;
  if (c.gamma) p.gamma = *c.gamma;
  if (c.lambda_cfl) p.lambda_cfl = *c.lambda_cfl;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.t_final && !(*c.t_final > 0.0)) throw ConfigError("t-final must be positive");
  if (c.zeta && !std::isfinite(*c.zeta)) throw ConfigError("zeta must be finite");
  if (c.cells && *c.cells < 2) throw ConfigError("cells must be at least 2");
  if (c.reconstruction == Reconstruction::E && p.gamma == 1.0)
    throw ConfigError("E-reconstruction needs gamma > 1");
}

std::string version_string() { return APWB_VERSION_STRING; }

}  // namespace apwb::harness

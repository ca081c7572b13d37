#include "apwb/harness/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "apwb/reference.hpp"
#include "apwb/wellbalance.hpp"

namespace apwb::harness {

namespace {

constexpr std::size_t kLongtimeSamples = 200;
constexpr std::size_t kPerturbRefinement = 5;  // odd, so coarse centres are fine centres
constexpr std::size_t kSodRefinement = 10;

ModelParams resolve_params(const ExperimentConfig& c, ModelParams defaults) {
  if (c.epsilon) defaults.epsilon = *c.epsilon;
  if (c.beta) defaults.beta = *c.beta;
  if (c.gamma) defaults.gamma = *c.gamma;
  if (c.lambda_cfl) defaults.lambda_cfl = *c.lambda_cfl;
  try {
    defaults.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return defaults;
}

ModelParams params_with(double eps, double beta, double gamma) {
  ModelParams p;
  p.epsilon = eps;
  p.beta = beta;
  p.gamma = gamma;
  return p;
}

SchemeOptions resolve_options(const ExperimentConfig& c, BoundaryKind bc) {
  SchemeOptions o;
  o.bc = c.bc.value_or(bc);
  o.reconstruction = c.reconstruction.value_or(Reconstruction::P);
  o.variant = c.variant.value_or(Variant::UnifiedAP);
  return o;
}

std::vector<double> analytic_profile(const Potential& phi, const ModelParams& p) {
  std::vector<double> rho(phi.n_cells());
  for (std::size_t i = 0; i < rho.size(); ++i)
    rho[i] = analytic_equilibrium(phi.at(static_cast<std::ptrdiff_t>(i)), 1.0, p);
  return rho;
}

/// Analytic profile, or its discrete counterpart anchored at the first cell
/// when the ghosts are hydrostatic extensions.
std::vector<double> equilibrium_profile(const Potential& phi, const ModelParams& p,
                                        BoundaryKind bc) {
  std::vector<double> rho = analytic_profile(phi, p);
  if (bc == BoundaryKind::HydrostaticGhost)
    rho = build_discrete_equilibrium(phi.interior(), rho.front(), p);
  return rho;
}

double bump(double x) { return std::exp(-100.0 * (x - 0.5) * (x - 0.5)); }

State perturbed_equilibrium(const Grid& grid, const Potential& phi, const ModelParams& p,
                            double zeta, BoundaryKind bc = BoundaryKind::EquilibriumGhost) {
  State s(equilibrium_profile(phi, p, bc), std::vector<double>(grid.n_cells(), 0.0));
  for (std::size_t i = 0; i < s.size(); ++i)
    s.rho[i] += zeta * bump(grid.center(static_cast<std::ptrdiff_t>(i)));
  return s;
}

State sod_state(const Grid& grid) {
  State s(grid.n_cells());
  const double mid = 0.5 * (grid.a() + grid.b());
  for (std::size_t i = 0; i < s.size(); ++i)
    s.rho[i] = grid.center(static_cast<std::ptrdiff_t>(i)) < mid ? 1.0 : 0.125;
  return s;
}

State arch_state(const Grid& grid) {
  State s(grid.n_cells());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = grid.center(static_cast<std::ptrdiff_t>(i));
    s.rho[i] = (x > -0.2 && x < 0.2) ? 1.0 : 2.0;
  }
  return s;
}

Profile make_profile(std::string label, const Grid& grid, State state, const RunDiagnostics& diag) {
  Profile p;
  p.label = std::move(label);
  p.x = grid.centers();
  p.rho = std::move(state.rho);
  p.q = std::move(state.q);
  p.steps = diag.steps;
  p.wall_seconds = diag.wall_seconds;
  return p;
}

struct Guarded {
  std::optional<Profile> profile;
  std::optional<BlowUp> blowup;
};

Guarded guarded_run(std::string label, const State& init, const Grid& grid, const Potential& phi,
                    double t_final, const ModelParams& p, const SchemeOptions& o) {
  Guarded g;
  try {
    RunResult r = run(init, grid, phi, t_final, p, o);
    g.profile = make_profile(std::move(label), grid, std::move(r.state), r.diagnostics);
  } catch (const BlowUpError& e) {
    g.blowup = BlowUp{e.step_index(), e.time(), e.what()};
  }
  return g;
}

/// Runs jobs(0..n-1) on up to `workers` threads; exceptions are rethrown in
/// job order after all threads join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> central_gradient(std::span<const double> ext, double dx) {
  const std::size_t n = ext.size() - 2;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (ext[i + 2] - ext[i]) / (2.0 * dx);
  return g;
}

/// Leading-order momentum of the relaxed state: rho d_x phi - eps^(1-b) d_x P.
std::vector<double> limit_momentum(std::span<const double> rho, const Potential& phi,
                                   const ModelParams& p, BoundaryKind bc, double dx) {
  const std::vector<double> ext = extend_density(rho, bc);
  std::vector<double> pext(ext.size());
  for (std::size_t j = 0; j < ext.size(); ++j) pext[j] = pressure(std::max(ext[j], 0.0), p.gamma);
  const std::vector<double> dphi = central_gradient(phi.samples(), dx);
  const std::vector<double> dp = central_gradient(pext, dx);
  std::vector<double> q(rho.size());
  const double scale = p.beta == 1.0 ? 1.0 : 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = rho[i] * dphi[i] - scale * dp[i];
  return q;
}

std::string tag(double v) { return format_number(v); }

}  // namespace

double l1_error(std::span<const double> numeric, std::span<const double> exact, double dx) {
  if (numeric.size() != exact.size())
    throw std::invalid_argument("l1_error: length mismatch (" + std::to_string(numeric.size()) +
                                " vs " + std::to_string(exact.size()) + ")");
  double s = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) s += std::abs(numeric[i] - exact[i]);
  return dx * s;
}

double max_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_error: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double total_variation(std::span<const double> a, bool periodic) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) tv += std::abs(a[i + 1] - a[i]);
  if (periodic && a.size() > 1) tv += std::abs(a.front() - a.back());
  return tv;
}

std::vector<double> coarsen(std::span<const double> fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0)
    throw std::invalid_argument("coarsen: size is not a multiple of the factor");
  std::vector<double> out(fine.size() / factor);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < factor; ++k) s += fine[i * factor + k];
    out[i] = s / static_cast<double>(factor);
  }
  return out;
}

std::size_t projected_steps(const Grid& grid, const Potential& phi, const ModelParams& params,
                            double t_final) {
  return static_cast<std::size_t>(std::ceil(t_final / cfl_dt(grid, phi, params) - 1e-9));
}

// ---------------------------------------------------------------- Sod

SodResult sod_experiment(const ExperimentConfig& c) {
  SodResult r;
  r.params = resolve_params(c, params_with(1.0, 1.0, 1.4));
  r.t_final = c.t_final.value_or(0.2);
  const std::size_t n = c.cells.value_or(100);
  const PotentialKind kind = c.potential.value_or(PotentialKind::Linear);
  const SchemeOptions o = resolve_options(c, BoundaryKind::Extrapolation);

  const Grid grid(0.0, 1.0, n);
  const Potential phi = Potential::sample(kind, grid);
  const State init = sod_state(grid);
  Guarded coarse =
      guarded_run("coarse_N" + std::to_string(n), init, grid, phi, r.t_final, r.params, o);
  r.coarse = std::move(coarse.profile);
  r.blowup = coarse.blowup;

  if (r.params.epsilon == 1.0 && !c.fast) {
    const Grid fine_grid(0.0, 1.0, kSodRefinement * n);
    const Potential fine_phi = Potential::sample(kind, fine_grid);
    Guarded fine = guarded_run("fine_N" + std::to_string(fine_grid.n_cells()), sod_state(fine_grid),
                               fine_grid, fine_phi, r.t_final, r.params, o);
    r.fine = std::move(fine.profile);
    if (!r.blowup) r.blowup = fine.blowup;
  }

  if (r.params.epsilon < 1.0) {
    const bool parabolic = r.params.beta == 1.0;
    const LimitSolver solver = parabolic ? LimitSolver::PorousMedium : LimitSolver::TransportUpwind;
    r.reference_kind = parabolic ? "porous-medium" : "transport-upwind";
    const BoundaryKind ref_bc =
        o.bc == BoundaryKind::Periodic ? BoundaryKind::Periodic : BoundaryKind::Extrapolation;
    std::vector<double> rho =
        run_limit_solver(solver, init.rho, grid, phi, r.t_final, r.params, ref_bc);
    Profile ref;
    ref.label = "reference_" + r.reference_kind + "_N" + std::to_string(n);
    ref.x = grid.centers();
    ref.q = limit_momentum(rho, phi, r.params, ref_bc, grid.dx());
    ref.rho = std::move(rho);
    if (r.coarse) r.l1_to_reference = l1_error(r.coarse->rho, ref.rho, grid.dx());
    r.reference = std::move(ref);
  }
  return r;
}

// ---------------------------------------------------------------- tables

namespace {

struct TableJob {
  double eps;
  PotentialKind kind;
  std::size_t n;
};

std::vector<TableJob> table_jobs(const ExperimentConfig& c) {
  const std::vector<double> eps =
      c.epsilon ? std::vector<double>{*c.epsilon} : std::vector<double>{1.0, 0.1, 0.01, 0.001};
  const std::vector<PotentialKind> kinds =
      c.potential ? std::vector<PotentialKind>{*c.potential}
                  : std::vector<PotentialKind>{PotentialKind::Linear, PotentialKind::Quadratic,
                                               PotentialKind::Sinusoidal};
  const std::vector<std::size_t> cells = c.cells  ? std::vector<std::size_t>{*c.cells}
                                         : c.fast ? std::vector<std::size_t>{100}
                                                  : std::vector<std::size_t>{100, 1000};
  std::vector<TableJob> jobs;
  for (double e : eps)
    for (PotentialKind k : kinds)
      for (std::size_t n : cells) jobs.push_back({e, k, n});
  return jobs;
}

}  // namespace

HydroTableResult hydro_table_experiment(const ExperimentConfig& c,
                                        const std::function<void(const std::string&)>& progress) {
  HydroTableResult r;
  r.params = resolve_params(c, params_with(1.0, 1.0, 1.0));
  r.t_final = c.t_final.value_or(2.0);
  const SchemeOptions o = resolve_options(c, BoundaryKind::EquilibriumGhost);
  const std::vector<TableJob> jobs = table_jobs(c);
  r.records.resize(jobs.size());
  std::mutex log_mutex;

  parallel_for(jobs.size(), c.jobs, [&](std::size_t j) {
    const TableJob& job = jobs[j];
    ModelParams p = r.params;
    p.epsilon = job.eps;
    const Grid grid(0.0, 1.0, job.n);
    const Potential phi = Potential::sample(job.kind, grid);
    const std::vector<double> rho_eq = analytic_profile(phi, p);
    const State init(rho_eq, std::vector<double>(job.n, 0.0));
    ErrorRecord& rec = r.records[j];
    rec.epsilon = job.eps;
    rec.potential = job.kind;
    rec.n_cells = job.n;
    try {
      const RunResult run_result = run(init, grid, phi, r.t_final, p, o);
      rec.l1_rho = l1_error(run_result.state.rho, rho_eq, grid.dx());
      rec.l1_q = l1_error(run_result.state.q, std::vector<double>(job.n, 0.0), grid.dx());
      rec.steps = run_result.diagnostics.steps;
    } catch (const BlowUpError&) {
      rec.l1_rho = rec.l1_q = INFINITY;
    }
    if (progress) {
      std::ostringstream line;
      line << "eps=" << format_number(job.eps) << " potential=" << to_string(job.kind)
           << " cells=" << job.n << " err_rho=" << format_number(rec.l1_rho)
           << " err_q=" << format_number(rec.l1_q);
      const std::lock_guard lock(log_mutex);
      progress(line.str());
    }
  });
  return r;
}

// ---------------------------------------------------------------- perturbation

PerturbResult perturb_experiment(const ExperimentConfig& c) {
  if (c.beta && *c.beta != 1.0) throw ConfigError("perturb requires beta = 1");
  PerturbResult r;
  r.params = resolve_params(c, params_with(1.0, 1.0, 1.0));
  r.zeta = c.zeta.value_or(1e-3);
  r.t_final = c.t_final.value_or(0.25);
  const std::size_t n = c.cells.value_or(100);
  const PotentialKind kind = c.potential.value_or(PotentialKind::Linear);
  SchemeOptions wb_opts = resolve_options(c, BoundaryKind::EquilibriumGhost);
  if (wb_opts.reconstruction == Reconstruction::None) wb_opts.reconstruction = Reconstruction::P;
  SchemeOptions non_wb_opts = wb_opts;
  non_wb_opts.reconstruction = Reconstruction::None;

  auto solve = [&](std::string label, std::size_t cells, const SchemeOptions& o) {
    const Grid grid(0.0, 1.0, cells);
    const Potential phi = Potential::sample(kind, grid);
    const RunResult res = run(perturbed_equilibrium(grid, phi, r.params, r.zeta, o.bc), grid, phi,
                              r.t_final, r.params, o);
    return make_profile(std::move(label), grid, res.state, res.diagnostics);
  };

  const Grid grid(0.0, 1.0, n);
  const Potential phi = Potential::sample(kind, grid);
  r.x = grid.centers();
  r.rho_eq = equilibrium_profile(phi, r.params, wb_opts.bc);
  r.wb = solve("wb", n, wb_opts);
  r.non_wb = solve("nonwb", n, non_wb_opts);

  const Profile fine = solve("reference", kPerturbRefinement * n, wb_opts);
  r.reference.label = "reference";
  r.reference.x = r.x;
  r.reference.steps = fine.steps;
  r.reference.wall_seconds = fine.wall_seconds;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = kPerturbRefinement * i + kPerturbRefinement / 2;
    r.reference.rho.push_back(fine.rho[j]);
    r.reference.q.push_back(fine.q[j]);
  }

  r.err_wb = max_error(r.wb.rho, r.reference.rho);
  r.err_non_wb = max_error(r.non_wb.rho, r.reference.rho);
  r.amp_wb = max_error(r.wb.rho, r.rho_eq);
  r.amp_non_wb = max_error(r.non_wb.rho, r.rho_eq);
  return r;
}

// ---------------------------------------------------------------- long time

LongtimeResult longtime_experiment(const ExperimentConfig& c) {
  if (c.beta && *c.beta != 1.0) throw ConfigError("longtime requires beta = 1");
  LongtimeResult r;
  r.params = resolve_params(c, params_with(1.0, 1.0, 1.0));
  r.zeta = c.zeta.value_or(1e-3);
  r.t_final = c.t_final.value_or(c.fast ? 10.0 : 100.0);
  const std::size_t n = c.cells.value_or(100);
  const PotentialKind kind = c.potential.value_or(PotentialKind::Linear);
  const std::vector<double> eps =
      c.epsilon ? std::vector<double>{*c.epsilon} : std::vector<double>{1.0, 0.1, 0.01, 0.001};

  SchemeOptions base = resolve_options(c, BoundaryKind::EquilibriumGhost);
  if (base.reconstruction == Reconstruction::None) base.reconstruction = Reconstruction::P;
  for (double e : eps)
    for (Reconstruction rec : {base.reconstruction, Reconstruction::None}) {
      TimeSeries s;
      s.epsilon = e;
      s.reconstruction = rec;
      r.series.push_back(s);
    }

  const Grid grid(0.0, 1.0, n);
  const Potential phi = Potential::sample(kind, grid);
  parallel_for(r.series.size(), c.jobs, [&](std::size_t j) {
    TimeSeries& s = r.series[j];
    ModelParams p = r.params;
    p.epsilon = s.epsilon;
    SchemeOptions o = base;
    o.reconstruction = s.reconstruction;
    const std::vector<double> rho_eq = equilibrium_profile(phi, p, o.bc);
    State state = perturbed_equilibrium(grid, phi, p, r.zeta, o.bc);
    auto sample = [&](double t) {
      double mq = 0.0;
      for (double q : state.q) mq = std::max(mq, std::abs(q));
      s.t.push_back(t);
      s.max_q.push_back(mq);
      s.l1_rho_err.push_back(l1_error(state.rho, rho_eq, grid.dx()));
    };
    sample(0.0);
    double t_prev = 0.0;
    for (std::size_t k = 1; k <= kLongtimeSamples; ++k) {
      const double t_next = r.t_final * static_cast<double>(k) / kLongtimeSamples;
      try {
        RunResult seg = run(state, grid, phi, t_next - t_prev, p, o);
        state = std::move(seg.state);
        s.steps += seg.diagnostics.steps;
        s.wall_seconds += seg.diagnostics.wall_seconds;
      } catch (const BlowUpError& e) {
        s.blowup = BlowUp{s.steps + e.step_index(), t_prev + e.time(), e.what()};
        return;
      }
      sample(t_next);
      t_prev = t_next;
    }
  });
  return r;
}

// ---------------------------------------------------------------- mesh sweep

std::string_view to_string(MeshOutcome outcome) {
  switch (outcome) {
    case MeshOutcome::Stable: return "stable";
    case MeshOutcome::Oscillatory: return "oscillatory";
    case MeshOutcome::BlowUp: return "blow-up";
  }
  return "stable";
}

MeshSweepResult mesh_sweep_experiment(const ExperimentConfig& c) {
  MeshSweepResult r;
  r.params = resolve_params(c, params_with(1e-3, 1.0, 1.4));
  r.t_final = c.t_final.value_or(0.02);
  const std::vector<double> betas =
      c.beta ? std::vector<double>{*c.beta} : std::vector<double>{1.0, 0.1};
  const std::vector<std::size_t> meshes = c.cells  ? std::vector<std::size_t>{*c.cells}
                                          : c.fast ? std::vector<std::size_t>{100, 1000}
                                                   : std::vector<std::size_t>{100, 1000, 10000};
  const SchemeOptions base = resolve_options(c, BoundaryKind::Periodic);

  for (double b : betas)
    for (std::size_t n : meshes)
      for (Variant v : {Variant::UnifiedAP, Variant::ExplicitNonAP}) {
        MeshRecord rec;
        rec.beta = b;
        rec.variant = v;
        rec.n_cells = n;
        r.records.push_back(rec);
      }

  parallel_for(r.records.size(), c.jobs, [&](std::size_t j) {
    MeshRecord& rec = r.records[j];
    ModelParams p = r.params;
    p.beta = rec.beta;
    const Grid grid(-0.5, 0.5, rec.n_cells);
    rec.dx = grid.dx();
    const Potential phi =
        c.potential ? Potential::sample(*c.potential, grid) : Potential::constant(rec.n_cells);
    SchemeOptions o = base;
    o.variant = rec.variant;
    Guarded g =
        guarded_run(std::string("beta") + tag(rec.beta) + "_" +
                        std::string(to_string(rec.variant)) + "_N" + std::to_string(rec.n_cells),
                    arch_state(grid), grid, phi, r.t_final, p, o);
    rec.profile = std::move(g.profile);
    rec.blowup = g.blowup;
    if (rec.profile) rec.tv = total_variation(rec.profile->rho, o.bc == BoundaryKind::Periodic);
  });

  // Records come in (AP, non-AP) pairs per (beta, mesh).
  for (std::size_t j = 0; j + 1 < r.records.size(); j += 2) {
    MeshRecord& ap = r.records[j];
    MeshRecord& nap = r.records[j + 1];
    ap.outcome = ap.blowup ? MeshOutcome::BlowUp : MeshOutcome::Stable;
    ap.tv_ratio = ap.blowup ? 0.0 : 1.0;
    if (nap.blowup) {
      nap.outcome = MeshOutcome::BlowUp;
    } else {
      nap.tv_ratio = (!ap.blowup && ap.tv > 0.0) ? nap.tv / ap.tv : 0.0;
      nap.outcome =
          nap.tv_ratio >= kOscillationTvRatio ? MeshOutcome::Oscillatory : MeshOutcome::Stable;
    }
  }

  for (std::size_t a = 0; a < r.records.size(); ++a)
    for (std::size_t b = a + 1; b < r.records.size(); ++b) {
      const MeshRecord& coarse = r.records[a];
      const MeshRecord& fine = r.records[b];
      if (coarse.variant != Variant::UnifiedAP || fine.variant != Variant::UnifiedAP) continue;
      if (coarse.beta != fine.beta || !coarse.profile || !fine.profile) continue;
      if (fine.n_cells <= coarse.n_cells || fine.n_cells % coarse.n_cells != 0) continue;
      const std::vector<double> avg = coarsen(fine.profile->rho, fine.n_cells / coarse.n_cells);
      r.ap_pairs.push_back({coarse.beta, coarse.n_cells, fine.n_cells,
                            l1_error(coarse.profile->rho, avg, coarse.dx)});
    }
  return r;
}

// ---------------------------------------------------------------- single run

SingleRunResult single_run_experiment(const ExperimentConfig& c) {
  SingleRunResult r;
  r.params = resolve_params(c, params_with(1.0, 1.0, 1.4));
  r.t_final = c.t_final.value_or(0.2);
  const std::size_t n = c.cells.value_or(100);
  const InitialData init = c.init.value_or(InitialData::Equilibrium);

  BoundaryKind default_bc = BoundaryKind::EquilibriumGhost;
  if (init == InitialData::Discrete) default_bc = BoundaryKind::HydrostaticGhost;
  if (init == InitialData::Sod) default_bc = BoundaryKind::Extrapolation;
  if (init == InitialData::Arch) default_bc = BoundaryKind::Periodic;
  r.options = resolve_options(c, default_bc);

  const Grid grid = init == InitialData::Arch ? Grid(-0.5, 0.5, n) : Grid(0.0, 1.0, n);
  const Potential phi = (init == InitialData::Arch && !c.potential)
                            ? Potential::constant(n)
                            : Potential::sample(c.potential.value_or(PotentialKind::Linear), grid);
  State state;
  switch (init) {
    case InitialData::Equilibrium:
      state = perturbed_equilibrium(grid, phi, r.params, c.zeta.value_or(0.0));
      break;
    case InitialData::Discrete:
      try {
        state = State(build_discrete_equilibrium(phi.interior(), 1.0, r.params),
                      std::vector<double>(n, 0.0));
      } catch (const EquilibriumError& e) {
        throw ConfigError(e.what());
      }
      break;
    case InitialData::Sod: state = sod_state(grid); break;
    case InitialData::Arch: state = arch_state(grid); break;
  }
  Guarded g =
      guarded_run("run_N" + std::to_string(n), state, grid, phi, r.t_final, r.params, r.options);
  r.profile = std::move(g.profile);
  r.blowup = g.blowup;
  return r;
}

// ---------------------------------------------------------------- reports

CsvTable profile_table(const Profile& profile) {
  CsvTable t;
  t.columns = {"x", "rho", "q", "u"};
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    const double rho = profile.rho[i];
    const double q = profile.q[i];
    t.rows.push_back({format_number(profile.x[i]), format_number(rho), format_number(q),
                      format_number(rho > 0.0 ? q / rho : 0.0)});
  }
  return t;
}

namespace {

class ReportBuilder {
 public:
  ReportBuilder(const ExperimentConfig& config, ExperimentReport& report)
      : config_(config), report_(report) {}

  CsvTable& add(std::string name, CsvTable table, const ModelParams& p, double t_final,
                std::size_t steps, double wall) {
    CsvTable& t = report_.files.emplace_back(OutputFile{std::move(name), std::move(table)}).table;
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("version", version_string());
    for (auto& [k, v] : echo(config_)) meta.emplace_back("config." + k, v);
    meta.emplace_back("eps", format_number(p.epsilon));
    meta.emplace_back("beta", format_number(p.beta));
    meta.emplace_back("gamma", format_number(p.gamma));
    meta.emplace_back("cfl", format_number(p.lambda_cfl));
    meta.emplace_back("t_final", format_number(t_final));
    meta.emplace_back("steps", std::to_string(steps));
    if (config_.record_timing) meta.emplace_back("wall_seconds", format_number(wall));
    meta.insert(meta.end(), t.metadata.begin(), t.metadata.end());
    t.metadata = std::move(meta);
    return t;
  }

  void profile(const std::string& prefix, const Profile& p, const ModelParams& params,
               double t_final) {
    CsvTable t = profile_table(p);
    t.add_metadata("label", p.label);
    add(prefix + p.label + ".csv", std::move(t), params, t_final, p.steps, p.wall_seconds);
  }

  void blowup(const std::string& name, const BlowUp& b, const ModelParams& params, double t_final) {
    CsvTable t;
    t.columns = {"x", "rho", "q", "u"};
    t.add_metadata("status", "blow-up");
    t.add_metadata("blowup_step", std::to_string(b.step));
    t.add_metadata("blowup_time", format_number(b.time));
    add(name, std::move(t), params, t_final, b.step, 0.0);
  }

  void say(std::string line) { report_.summary.push_back(std::move(line)); }

 private:
  const ExperimentConfig& config_;
  ExperimentReport& report_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << std::scientific << v;
  return s.str();
}

void log_projection(std::ostream* log, const std::string& what, std::size_t steps) {
  if (log) *log << "projected steps for " << what << ": " << steps << '\n';
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& c, std::ostream* log) {
  validate(c);
  ExperimentReport report;
  ReportBuilder out(c, report);

  switch (c.experiment) {
    case ExperimentKind::Sod: {
      if (log) {
        const ModelParams p = resolve_params(c, params_with(1.0, 1.0, 1.4));
        const Grid g(0.0, 1.0, c.cells.value_or(100));
        log_projection(
            log, "sod",
            projected_steps(g, Potential::sample(c.potential.value_or(PotentialKind::Linear), g), p,
                            c.t_final.value_or(0.2)));
      }
      const SodResult r = sod_experiment(c);
      const std::size_t n = c.cells.value_or(100);
      if (r.coarse) out.profile("sod_", *r.coarse, r.params, r.t_final);
      if (r.fine) out.profile("sod_", *r.fine, r.params, r.t_final);
      if (r.reference) {
        out.profile("sod_", *r.reference, r.params, r.t_final);
        out.say("L1(rho, " + r.reference_kind + " reference) = " + fmt(r.l1_to_reference));
      }
      if (r.blowup) {
        out.blowup("sod_blowup_N" + std::to_string(n) + ".csv", *r.blowup, r.params, r.t_final);
        out.say("blow-up at step " + std::to_string(r.blowup->step));
        report.stability_violated = c.variant != Variant::ExplicitNonAP;
      }
      break;
    }
    case ExperimentKind::HydroTable: {
      const std::vector<TableJob> jobs = table_jobs(c);
      if (log) {
        const ModelParams base = resolve_params(c, params_with(1.0, 1.0, 1.0));
        std::size_t total = 0;
        for (const TableJob& j : jobs) {
          ModelParams p = base;
          p.epsilon = j.eps;
          const Grid g(0.0, 1.0, j.n);
          total += projected_steps(g, Potential::sample(j.kind, g), p, c.t_final.value_or(2.0));
        }
        log_projection(log, std::to_string(jobs.size()) + " table cells", total);
      }
      std::function<void(const std::string&)> progress;
      if (log) progress = [log](const std::string& line) { *log << line << '\n'; };
      const HydroTableResult r = hydro_table_experiment(c, progress);
      CsvTable t;
      t.columns = {"eps", "potential", "cells", "err_rho", "err_q"};
      std::size_t steps = 0;
      for (const ErrorRecord& e : r.records) {
        t.rows.push_back({format_number(e.epsilon), std::string(to_string(e.potential)),
                          std::to_string(e.n_cells), format_number(e.l1_rho),
                          format_number(e.l1_q)});
        steps += e.steps;
        if (!std::isfinite(e.l1_rho)) report.stability_violated = true;
        out.say("eps=" + format_number(e.epsilon) + " " + std::string(to_string(e.potential)) +
                " N=" + std::to_string(e.n_cells) + ": err_rho=" + fmt(e.l1_rho) +
                " err_q=" + fmt(e.l1_q));
      }
      const bool isothermal = r.params.gamma == 1.0;
      t.add_metadata("pressure_law",
                     isothermal ? "isothermal P=rho (gamma=1)" : "isentropic P=rho^gamma");
      out.add(std::string("hydro_table_") + (isothermal ? "isothermal" : "isentropic") + ".csv",
              std::move(t), r.params, r.t_final, steps, 0.0);
      break;
    }
    case ExperimentKind::Perturb: {
      const PerturbResult r = perturb_experiment(c);
      Profile eq;
      eq.label = "equilibrium";
      eq.x = r.x;
      eq.rho = r.rho_eq;
      eq.q.assign(r.x.size(), 0.0);
      const std::array<const Profile*, 4> profiles{&r.wb, &r.non_wb, &r.reference, &eq};
      for (const Profile* p : profiles) {
        CsvTable t = profile_table(*p);
        t.add_metadata("label", p->label);
        t.add_metadata("zeta", format_number(r.zeta));
        out.add("perturb_" + p->label + ".csv", std::move(t), r.params, r.t_final, p->steps,
                p->wall_seconds);
      }
      out.say("max|rho - rho_ref|: wb=" + fmt(r.err_wb) + " nonwb=" + fmt(r.err_non_wb));
      out.say("max|rho - rho_eq|:  wb=" + fmt(r.amp_wb) + " nonwb=" + fmt(r.amp_non_wb));
      break;
    }
    case ExperimentKind::Longtime: {
      const LongtimeResult r = longtime_experiment(c);
      for (const TimeSeries& s : r.series) {
        CsvTable t;
        t.columns = {"t", "max_q", "l1_rho_err"};
        for (std::size_t k = 0; k < s.t.size(); ++k)
          t.rows.push_back(
              {format_number(s.t[k]), format_number(s.max_q[k]), format_number(s.l1_rho_err[k])});
        const std::string variant = s.reconstruction == Reconstruction::None ? "nonwb" : "wb";
        t.add_metadata("label", variant);
        t.add_metadata("zeta", format_number(r.zeta));
        if (s.blowup) {
          t.add_metadata("status", "blow-up");
          t.add_metadata("blowup_step", std::to_string(s.blowup->step));
          report.stability_violated = true;
        }
        ModelParams p = r.params;
        p.epsilon = s.epsilon;
        out.add("longtime_eps" + tag(s.epsilon) + "_" + variant + ".csv", std::move(t), p,
                r.t_final, s.steps, s.wall_seconds);
        if (!s.t.empty())
          out.say("eps=" + format_number(s.epsilon) + " " + variant + ": final max|q|=" +
                  fmt(s.max_q.back()) + " L1(rho-rho_eq)=" + fmt(s.l1_rho_err.back()));
      }
      break;
    }
    case ExperimentKind::MeshSweep: {
      if (log) {
        const ModelParams p = resolve_params(c, params_with(1e-3, 1.0, 1.4));
        for (std::size_t n : {std::size_t{100}, std::size_t{1000}, std::size_t{10000}}) {
          if (c.cells && *c.cells != n) continue;
          if (c.fast && n == 10000) continue;
          const Grid g(-0.5, 0.5, n);
          log_projection(log, "mesh N=" + std::to_string(n) + " (beta=1)",
                         projected_steps(g, Potential::constant(n), p, c.t_final.value_or(0.02)));
        }
      }
      const MeshSweepResult r = mesh_sweep_experiment(c);
      CsvTable outcomes;
      outcomes.columns = {"beta", "variant", "cells", "dx", "outcome", "steps", "tv", "tv_ratio"};
      for (const MeshRecord& rec : r.records) {
        ModelParams p = r.params;
        p.beta = rec.beta;
        const std::string name = "mesh_beta" + tag(rec.beta) + "_" +
                                 std::string(to_string(rec.variant)) + "_N" +
                                 std::to_string(rec.n_cells) + ".csv";
        std::size_t steps = 0;
        if (rec.profile) {
          CsvTable t = profile_table(*rec.profile);
          t.add_metadata("label", rec.profile->label);
          t.add_metadata("outcome", std::string(to_string(rec.outcome)));
          t.add_metadata("tv_ratio", format_number(rec.tv_ratio));
          steps = rec.profile->steps;
          out.add(name, std::move(t), p, r.t_final, steps, rec.profile->wall_seconds);
        } else if (rec.blowup) {
          steps = rec.blowup->step;
          out.blowup(name, *rec.blowup, p, r.t_final);
          if (rec.variant == Variant::UnifiedAP) report.stability_violated = true;
        }
        outcomes.rows.push_back({format_number(rec.beta), std::string(to_string(rec.variant)),
                                 std::to_string(rec.n_cells), format_number(rec.dx),
                                 std::string(to_string(rec.outcome)), std::to_string(steps),
                                 format_number(rec.tv), format_number(rec.tv_ratio)});
        out.say("beta=" + format_number(rec.beta) + " " + std::string(to_string(rec.variant)) +
                " dx=" + format_number(rec.dx) + ": " + std::string(to_string(rec.outcome)) +
                (rec.blowup ? " at step " + std::to_string(rec.blowup->step) : ""));
      }
      out.add("mesh_sweep_outcomes.csv", std::move(outcomes), r.params, r.t_final, 0, 0.0);
      CsvTable pairs;
      pairs.columns = {"beta", "coarse_cells", "fine_cells", "l1_rho"};
      for (const MeshPair& m : r.ap_pairs) {
        pairs.rows.push_back({format_number(m.beta), std::to_string(m.coarse_cells),
                              std::to_string(m.fine_cells), format_number(m.l1)});
        out.say("AP beta=" + format_number(m.beta) + " L1(N=" + std::to_string(m.coarse_cells) +
                ", N=" + std::to_string(m.fine_cells) + ") = " + fmt(m.l1));
      }
      out.add("mesh_sweep_pairs.csv", std::move(pairs), r.params, r.t_final, 0, 0.0);
      break;
    }
    case ExperimentKind::Run: {
      const SingleRunResult r = single_run_experiment(c);
      if (r.profile) {
        CsvTable t = profile_table(*r.profile);
        t.add_metadata("label", r.profile->label);
        t.add_metadata("bc", std::string(to_string(r.options.bc)));
        t.add_metadata("recon", std::string(to_string(r.options.reconstruction)));
        t.add_metadata("variant", std::string(to_string(r.options.variant)));
        out.add("run.csv", std::move(t), r.params, r.t_final, r.profile->steps,
                r.profile->wall_seconds);
        out.say("completed " + std::to_string(r.profile->steps) + " steps");
      } else if (r.blowup) {
        out.blowup("run.csv", *r.blowup, r.params, r.t_final);
        out.say("blow-up at step " + std::to_string(r.blowup->step) + ", t=" + fmt(r.blowup->time));
        report.stability_violated = true;
      }
      break;
    }
  }
  return report;
}

void write_report(const ExperimentReport& report, const ExperimentConfig& config) {
  for (const OutputFile& f : report.files) write_csv_file(config.out_dir / f.name, f.table);
}

}  // namespace apwb::harness

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "sclab/experiment.hpp"

namespace fs = std::filesystem;
using namespace sclab;

namespace {

enum Exit { kOk = 0, kInvariantFailure = 1, kTruncated = 2, kConfig = 3 };

struct Options {
  std::string config;
  std::string out;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int modes = 0;
  int nmax = -1;
};

ExperimentConfig load(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.workers > 0) cfg.workers = o.workers;
  if (o.seed_set) cfg.seed = o.seed;
  return cfg;
}

fs::path out_dir(const ExperimentConfig& cfg) {
  fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  return dir;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_check(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(o);
  const InvariantReport r = run_invariants(cfg);
  for (const auto& x : r.outcomes) {
    std::cout << std::left << std::setw(8) << x.status << std::setw(26) << x.name;
    if (x.status != "skipped") std::cout << " measured " << x.measured << " tol " << x.tolerance;
    if (!x.detail.empty()) std::cout << "  (" << x.detail << ")";
    std::cout << '\n';
  }
  const fs::path dir = out_dir(cfg);
  write_manifest(dir / "invariants.json", cfg, to_json(r), since(t0));
  return r.ok() ? kOk : kInvariantFailure;
}

int cmd_classical(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(o);
  const OneParticleSpace space(cfg.model.a);
  require_h1(space);
  const ClassicalTrajectory traj = evolve_classical(space, cfg.model.v, cfg.phi0, cfg.t_final, cfg.classical_steps);
  const fs::path dir = out_dir(cfg);
  std::ofstream csv(dir / "trajectory.csv");
  write_trajectory_csv(csv, traj);
  const double drift = std::abs(traj.energy.back() - traj.energy.front());
  write_manifest(dir / "trajectory.json", cfg,
                 {{"omega", traj.omega.back()}, {"energy", traj.energy.front()}, {"energy_drift", drift}}, since(t0));
  std::cout << "omega(T) = " << traj.omega.back() << ", energy drift " << drift << '\n';
  return kOk;
}

int cmd_scaling(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(o);
  const ScalingResult r = run_scaling(cfg);
  const fs::path dir = out_dir(cfg);
  std::ofstream csv(dir / "scaling.csv");
  write_scaling_csv(csv, r);
  write_manifest(dir / "scaling.json", cfg, to_json(r), since(t0));
  for (const auto& row : r.rows) {
    std::cout << "eps " << row.epsilon << " t " << row.time << " error " << row.error << " nmax " << row.nmax
              << (row.valid ? "" : "  [truncated]") << '\n';
  }
  for (const auto& [t, f] : r.fits)
    std::cout << "t " << t << ": slope " << f.slope << " residual " << f.residual << " over " << f.points << " points\n";
  return r.any_invalid ? kTruncated : kOk;
}

int cmd_hepp(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load(o);
  const HeppResult r = run_hepp(cfg);
  const fs::path dir = out_dir(cfg);
  std::ofstream csv(dir / "hepp.csv");
  write_hepp_csv(csv, r);
  write_manifest(dir / "hepp.json", cfg, to_json(r), since(t0));
  for (const auto& row : r.rows)
    std::cout << "eps " << row.epsilon << " t " << row.time << " |error| " << row.abs_error
              << (row.valid ? "" : "  [truncated]") << '\n';
  return r.any_invalid ? kTruncated : kOk;
}

int cmd_basis_info(const Options& o) {
  if (o.modes > 0 && o.nmax >= 0) {
    std::cout << "modes " << o.modes << " nmax " << o.nmax << " dim " << fock_dimension(o.modes, o.nmax) << '\n';
    return kOk;
  }
  const ExperimentConfig cfg = load(o);
  const int d = static_cast<int>(cfg.model.a.rows());
  const OneParticleSpace space(cfg.model.a);
  const ClassicalTrajectory traj = evolve_classical(space, cfg.model.v, cfg.phi0, cfg.t_final, cfg.classical_steps);
  double orbit = 0.0;
  for (const auto& p : traj.phi) orbit = std::max(orbit, p.squaredNorm());
  for (double eps : cfg.epsilons) {
    const int nmax = cfg.nmax.tail_driven ? required_nmax(orbit / eps, cfg.nmax.threshold) : cfg.nmax.explicit_nmax;
    std::cout << "eps " << eps << " starting nmax " << nmax << " dim " << fock_dimension(d, nmax) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical coherent-state laboratory on truncated Fock spaces"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "experiment config (JSON)");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--workers", o.workers, "worker threads for the eps sweep");
  app.add_option("--seed", o.seed, "seed for randomized checks")->each([&](const std::string&) { o.seed_set = true; });

  auto* check = app.add_subcommand("check", "run the invariant suites");
  auto* classical = app.add_subcommand("classical", "classical trajectory to CSV");
  auto* scaling = app.add_subcommand("scaling", "sqrt(eps) error scaling study");
  auto* hepp = app.add_subcommand("hepp", "Hepp-limit study");
  auto* basis = app.add_subcommand("basis-info", "truncation sizes");
  basis->add_option("--modes", o.modes, "number of modes");
  basis->add_option("--nmax", o.nmax, "particle cutoff");
  for (auto* sub : {check, classical, scaling, hepp, basis}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(o);
    if (*classical) return cmd_classical(o);
    if (*scaling) return cmd_scaling(o);
    if (*hepp) return cmd_hepp(o);
    if (*basis) return cmd_basis_info(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const TruncationError& e) {
    std::cerr << "truncation: " << e.what() << '\n';
    return kTruncated;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return kOk;
}

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sllb/config.hpp"
#include "sllb/errors.hpp"
#include "sllb/io.hpp"
#include "sllb/spectral.hpp"

namespace fs = std::filesystem;
using namespace sllb;

namespace {

constexpr int kUsageExit = 64;
constexpr int kInternalExit = 70;

struct Context {
  RunConfig cfg;
  std::string fp;
  fs::path out;
};

Context prepare(const std::string& config_path, const std::string& out, const std::string& seed,
                const std::string& paths, std::vector<std::string> overrides) {
  if (!out.empty()) overrides.push_back("output.dir=\"" + out + "\"");
  if (!seed.empty()) overrides.push_back("seeds.master_seed=" + seed);
  if (!paths.empty()) overrides.push_back("seeds.n_paths=" + paths);
  Context c;
  c.cfg = config_path.empty() ? parse_config("domain: {n_modes: 16}\n", overrides) : load_config(config_path, overrides);
  c.fp = fingerprint(c.cfg);
  c.out = fs::path(c.cfg.output.dir);
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw IoError("cannot create output directory " + c.out.string() + ": " + ec.message());
  std::ofstream canon(c.out / "config.yaml");
  if (!canon) throw IoError("cannot write " + (c.out / "config.yaml").string());
  canon << canonical_yaml(c.cfg);
  return c;
}

Manifest manifest(const Context& c, const std::string& command) {
  Manifest m;
  m.command = command;
  m.fingerprint = c.fp;
  m.master_seed = c.cfg.master_seed;
  m.n_paths = c.cfg.n_paths;
  return m;
}

struct Model {
  SpacePtr space;
  std::unique_ptr<GalerkinSystem> system;
  SpectralField u0;
};

Model build_model(const RunConfig& cfg) {
  Model m;
  m.space = Space::make(cfg.domain);
  m.system = std::make_unique<GalerkinSystem>(m.space, cfg.params, build_noise(cfg, m.space));
  m.u0 = build_initial(cfg, m.space);
  return m;
}

std::string path_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%04zu", i);
  return buf;
}

void summary(const Context& c, const std::string& command, const std::string& text) {
  std::cout << command << ": " << text << " [fingerprint " << c.fp << ", out " << c.out.string() << "]\n";
}

int cmd_spectrum(const Context& c) {
  const Space space(c.cfg.domain);
  std::ofstream csv(c.out / "spectrum.csv");
  if (!csv) throw IoError("cannot write spectrum.csv");
  csv.precision(17);
  csv << "index,k1,k2,lambda,lambda_over_pi2\n";
  const double pi2 = M_PI * M_PI;
  std::cout << "index  k1  k2  lambda  lambda/pi^2\n";
  for (std::size_t i = 0; i < space.n(); ++i) {
    const auto& k = space.basis().modes[i];
    csv << i << ',' << k[0] << ',' << k[1] << ',' << space.lambda(i) << ',' << space.lambda(i) / pi2 << '\n';
    std::printf("%5zu %3d %3d  %.10g  %.6g\n", i, k[0], k[1], space.lambda(i), space.lambda(i) / pi2);
  }
  write_manifest(c.out, manifest(c, "spectrum"));
  summary(c, "spectrum", std::to_string(space.n()) + " eigenvalues");
  return 0;
}

// A batch with no surviving path has nothing to report.
int blow_up_status(const PathBatch& batch) {
  if (!batch.paths.empty()) return 0;
  std::cerr << "error: all " << batch.attempted << " paths blew up\n";
  return static_cast<int>(ErrorKind::blow_up);
}

int cmd_simulate(const Context& c) {
  const Model m = build_model(c.cfg);
  SimulationOptions opt;
  opt.state_stride = c.cfg.output.state_stride;
  opt.ledger = {c.cfg.output.ledger_level, c.cfg.output.ledger_stride, c.cfg.experiments.cross_power};
  const PathBatch batch = run_batch(m.u0, c.cfg.time, c.cfg.scheme, *m.system, c.cfg.master_seed, c.cfg.n_paths, opt);
  for (std::size_t i = 0; i < batch.paths.size(); ++i) {
    const std::string name = path_name(batch.path_indices[i]);
    write_checkpoint(c.out / (name + ".llb"), batch.paths[i], c.cfg.domain, c.cfg.params);
    if (opt.ledger.level != LedgerLevel::off) write_ledger_csv(c.out / (name + "_ledger.csv"), batch.paths[i].ledger);
    for (const auto& w : batch.paths[i].warnings) std::cerr << "warning: " << name << ": " << w << "\n";
  }
  Manifest man = manifest(c, "simulate");
  man.extra["blow_ups"] = std::to_string(batch.blow_ups);
  if (!batch.paths.empty() && opt.state_stride > 0) {
    std::vector<std::size_t> lags;
    for (std::size_t l : c.cfg.experiments.lags)
      if (l % opt.state_stride == 0) lags.push_back(l);
    try {
      if (!lags.empty()) {
        const StructureFunction sf =
            holder_structure(batch.paths, c.cfg.time, lags, c.cfg.experiments.structure_norm);
        write_structure_csv(c.out / "structure.csv", sf);
        man.extra["structure_slope"] = std::to_string(sf.slope);
      }
    } catch (const StatisticsError& e) {
      man.extra["structure"] = std::string("skipped: ") + e.what();
    }
  }
  write_manifest(c.out, man);
  double final_l2 = 0.0;
  for (const auto& t : batch.paths) final_l2 += l2_norm(t.states.back());
  if (!batch.paths.empty()) final_l2 /= double(batch.paths.size());
  summary(c, "simulate",
          std::to_string(batch.paths.size()) + "/" + std::to_string(batch.attempted) +
              " paths completed, blow-up fraction " + std::to_string(batch.blow_up_fraction()) +
              ", mean final ||u||_L2 " + std::to_string(final_l2));
  return blow_up_status(batch);
}

int cmd_energy_check(const Context& c) {
  const Model m = build_model(c.cfg);
  SimulationOptions opt;
  opt.state_stride = 0;
  opt.ledger = {LedgerLevel::full, 1, c.cfg.experiments.cross_power};
  const PathBatch batch = run_batch(m.u0, c.cfg.time, c.cfg.scheme, *m.system, c.cfg.master_seed, c.cfg.n_paths, opt);
  double max_l2 = 0.0, max_h1 = 0.0;
  for (std::size_t i = 0; i < batch.paths.size(); ++i) {
    const auto l2 = l2_energy_residual(batch.paths[i], c.cfg.params);
    const auto h1 = h1_energy_residual(batch.paths[i], c.cfg.params);
    max_l2 = std::max(max_l2, max_abs(l2));
    max_h1 = std::max(max_h1, max_abs(h1));
    write_residual_csv(c.out / (path_name(batch.path_indices[i]) + "_residual.csv"), batch.paths[i].ledger, l2, h1);
  }
  Manifest man = manifest(c, "energy-check");
  man.extra["max_abs_l2_residual"] = std::to_string(max_l2);
  man.extra["max_abs_h1_residual"] = std::to_string(max_h1);
  man.extra["blow_ups"] = std::to_string(batch.blow_ups);
  write_manifest(c.out, man);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max|L2 residual| %.6e, max|H1 residual| %.6e over %zu paths", max_l2, max_h1,
                batch.paths.size());
  summary(c, "energy-check", buf);
  return blow_up_status(batch);
}

int cmd_moments(const Context& c) {
  MomentSetup setup;
  setup.domain = c.cfg.domain;
  setup.params = c.cfg.params;
  setup.noise_amplitude = c.cfg.noise.amplitude;
  setup.noise_decay = c.cfg.noise.decay;
  setup.t_end = c.cfg.time.t_end;
  setup.scheme = c.cfg.scheme;
  setup.master_seed = c.cfg.master_seed;
  setup.n_paths = c.cfg.n_paths;
  setup.cross_power = c.cfg.experiments.cross_power;
  if (!c.cfg.noise.modes.empty()) throw UnsupportedError("moments sweeps use the K/amplitude/decay noise recipe");
  std::vector<MomentCell> cells = c.cfg.experiments.cells;
  if (cells.empty()) cells.push_back({c.cfg.domain.n_modes[0], c.cfg.time.n_steps, c.cfg.noise.count});
  int finest = 0;
  for (const auto& cell : cells) finest = std::max(finest, cell.n);
  setup.u0 = build_initial(c.cfg, Space::make(with_modes(c.cfg.domain, finest)));
  const auto rows = run_moment_study(setup, cells, c.cfg.experiments.p_exponents);
  write_report(c.out, rows);
  write_manifest(c.out, manifest(c, "moments"));
  summary(c, "moments", std::to_string(cells.size()) + " cells, " + std::to_string(rows.size()) + " rows");
  return 0;
}

int cmd_converge(const Context& c) {
  const auto& n_list = c.cfg.experiments.n_list;
  const int finest = *std::max_element(n_list.begin(), n_list.end());
  const SpacePtr ref = Space::make(with_modes(c.cfg.domain, finest));
  const SpectralField u0 = build_initial(c.cfg, ref);
  const NoiseBasis nb = build_noise(c.cfg, Space::make(with_modes(c.cfg.domain, *std::min_element(n_list.begin(), n_list.end()))));
  const auto rows = run_galerkin_convergence(u0, c.cfg.time, c.cfg.scheme, nb, c.cfg.params, c.cfg.master_seed,
                                             c.cfg.n_paths, n_list, std::max<std::size_t>(1, c.cfg.output.state_stride));
  write_report(c.out, rows);
  write_manifest(c.out, manifest(c, "converge"));
  std::string text;
  for (const auto& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sn=%d:%.3e", text.empty() ? "" : " ", r.n, r.median_sup_l2);
    text += buf;
  }
  summary(c, "converge", "median sup_t L2 error " + text);
  return 0;
}

int cmd_uniqueness(const Context& c) {
  const Model m = build_model(c.cfg);
  const SpectralField dir = random_initial(m.space, c.cfg.experiments.direction_seed, 2.0, 1.0);
  const auto report = run_uniqueness(m.u0, dir, c.cfg.experiments.deltas, c.cfg.time, c.cfg.scheme, *m.system,
                                     c.cfg.master_seed, c.cfg.n_paths, c.cfg.experiments.record_stride);
  write_report(c.out, report);
  write_manifest(c.out, manifest(c, "uniqueness"));
  std::string text;
  for (const auto& s : report.summary) {
    char buf[96];
    if (s.delta == 0.0)
      std::snprintf(buf, sizeof buf, "%sdelta=0:%s", text.empty() ? "" : " ", s.all_identical ? "identical" : "DIFFERS");
    else
      std::snprintf(buf, sizeof buf, "%sdelta=%.0e:%.4g", text.empty() ? "" : " ", s.delta, s.median_sup_ratio);
    text += buf;
  }
  summary(c, "uniqueness", "median sup||v||/delta " + text);
  return 0;
}

int cmd_invariant(const Context& c) {
  const Model m = build_model(c.cfg);
  const auto report = run_invariant_measure(m.u0, c.cfg.experiments.invariant, c.cfg.scheme, *m.system,
                                            c.cfg.master_seed, c.cfg.n_paths);
  write_report(c.out, report);
  Manifest man = manifest(c, "invariant");
  man.extra["window_note"] = "stabilization windows [T,2T] vs [2T,4T] are heuristic";
  man.extra["blow_ups"] = std::to_string(report.blow_ups);
  write_manifest(c.out, man);
  std::string text;
  for (const auto& r : report.rows) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sT=%g:h2avg=%.4g,ks=%.3f", text.empty() ? "" : " ", r.horizon, r.h2_avg.mean,
                  r.ks.mean);
    text += buf;
  }
  summary(c, "invariant", text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("SLLB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"Spectral Galerkin simulator for the stochastic Landau-Lifshitz-Bloch equation"};
  app.require_subcommand(1, 1);
  std::string config_path, out, seed, paths;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML run configuration");
    sub->add_option("--out", out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Master seed (overrides seeds.master_seed)");
    sub->add_option("--paths", paths, "Number of paths (overrides seeds.n_paths)");
    sub->add_option("--override", overrides, "key=value override, repeatable")->take_all();
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Sub subs[] = {
      {"simulate", "Integrate paths and write checkpoints and ledgers", cmd_simulate},
      {"energy-check", "Residuals of the L2 and H1 energy balances", cmd_energy_check},
      {"moments", "Monte Carlo moment tables", cmd_moments},
      {"converge", "Galerkin convergence against the finest truncation", cmd_converge},
      {"uniqueness", "Perturbation study with shared noise", cmd_uniqueness},
      {"invariant", "Long-run time averages and window statistics", cmd_invariant},
      {"spectrum", "Print the Neumann eigenvalue table", cmd_spectrum},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (!apps[i]->parsed()) continue;
    try {
      const Context c = prepare(config_path, out, seed, paths, overrides);
      return subs[i].run(c);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return e.exit_code();
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << "\n";
      return kInternalExit;
    }
  }
  return kUsageExit;
}

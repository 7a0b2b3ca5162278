#include "sllb/experiments.hpp"

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "sllb/errors.hpp"
#include "sllb/spectral.hpp"
#include "sllb/version.hpp"

namespace sllb {

namespace {

// Runs body(i) for i in [0, count) across threads, rethrowing the first
// exception after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(sllb_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::ofstream open_csv(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out.precision(17);
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

bool same_bits(const SpectralField& a, const SpectralField& b) {
  return a.coeffs().size() == b.coeffs().size() &&
         std::memcmp(a.coeffs().data(), b.coeffs().data(), a.coeffs().size() * sizeof(double)) == 0;
}

}  // namespace

SpectralField random_initial(const SpacePtr& space, std::uint64_t seed, double decay, double h1_radius) {
  if (!(h1_radius >= 0.0)) throw ConfigError("initial.radius must be >= 0");
  SpectralField u(space);
  const auto& modes = space->basis().modes;
  for (std::size_t i = 0; i < space->n(); ++i) {
    const double scale = std::pow(1.0 + space->lambda(i), -0.5 * decay);
    for (int c = 0; c < kComponents; ++c) {
      std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
      key = mix64(key ^ std::uint64_t(modes[i][0]));
      key = mix64(key ^ (std::uint64_t(modes[i][1]) << 20));
      key = mix64(key ^ std::uint64_t(c));
      u(c, i) = keyed_normal(key) * scale;
    }
  }
  const double norm = h1_norm(u);
  if (norm > 0.0) u *= h1_radius / norm;
  return u;
}

PathBatch run_batch(const SpectralField& u0, const TimeGrid& grid, Scheme scheme, const GalerkinSystem& system,
                    std::uint64_t master_seed, std::size_t n_paths, const SimulationOptions& options) {
  std::vector<std::optional<Trajectory>> slots(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    try {
      slots[i] = simulate_path(u0, grid, scheme, system, {master_seed, i}, options);
    } catch (const BlowUpError&) {
    }
  });
  PathBatch batch;
  batch.attempted = n_paths;
  for (std::size_t i = 0; i < n_paths; ++i) {
    if (slots[i]) {
      batch.paths.push_back(std::move(*slots[i]));
      batch.path_indices.push_back(i);
    } else {
      ++batch.blow_ups;
    }
  }
  return batch;
}

double median(std::vector<double> v) {
  if (v.empty()) throw StatisticsError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------- uniqueness

double uniqueness_phi(const SpectralField& u1, const SpectralField& u2) {
  const double a1 = linf_norm(synthesize(u1));
  const double a2 = linf_norm(synthesize(u2));
  const double g2 = grad_norm_sq(u2);
  const double base = a2 * (a1 + a2);
  if (u2.space().dimension() == 1) return base + g2 + g2 * g2;
  const double h2 = h2_norm(u2);
  return base + g2 * h2 * h2 + std::sqrt(g2) * h2;
}

UniquenessReport run_uniqueness(const SpectralField& u0, const SpectralField& direction,
                                const std::vector<double>& deltas, const TimeGrid& grid, Scheme scheme,
                                const GalerkinSystem& system, std::uint64_t master_seed, std::size_t n_paths,
                                std::size_t record_stride) {
  const Space& space = system.space();
  if (space.dimension() != 1 && space.dimension() != 2)
    throw UnsupportedError("pathwise uniqueness is only established for d = 1, 2");
  if (!(u0.space().spec() == space.spec()) || !(direction.space().spec() == space.spec()))
    throw DimensionError("uniqueness inputs must live on the system's space");
  for (double d : deltas)
    if (!(d >= 0.0)) throw ConfigError("perturbation sizes must be >= 0");
  grid.validate();
  const double dnorm = h1_norm(direction);
  if (!(dnorm > 0.0)) throw ConfigError("perturbation direction must be nonzero");
  const SpectralField unit = (1.0 / dnorm) * SpectralField(system.space_ptr(), direction.coeffs());
  const SpectralField start(system.space_ptr(), u0.coeffs());
  if (record_stride == 0) record_stride = 1;

  const std::size_t nd = deltas.size();
  std::vector<std::vector<UniquenessRun>> per_path(n_paths);
  parallel_for(n_paths, [&](std::size_t path) {
    const WienerPath wiener(master_seed, path, grid, system.noise().size());
    std::vector<double> dw(system.noise().size());
    const double dt = grid.dt();
    SpectralField u1 = start;
    std::vector<SpectralField> u2(nd, start);
    std::vector<UniquenessRun> runs(nd);
    std::vector<double> v0_sq(nd), integral(nd, 0.0), max_v(nd, 0.0);
    for (std::size_t j = 0; j < nd; ++j) {
      if (deltas[j] != 0.0) u2[j].axpy(deltas[j], unit);
      runs[j].delta = deltas[j];
      runs[j].path = path;
      runs[j].identical = true;
      runs[j].gronwall = -std::numeric_limits<double>::infinity();
      const SpectralField v = u2[j] - u1;
      v0_sq[j] = inner(v, v);
      max_v[j] = v0_sq[j];
      runs[j].times.push_back(0.0);
      runs[j].v_sq.push_back(v0_sq[j]);
      runs[j].phi_integral.push_back(0.0);
    }
    for (std::size_t s = 0; s < grid.n_steps; ++s) {
      if (!dw.empty()) wiener.row(s, dw);
      for (std::size_t j = 0; j < nd; ++j) integral[j] += uniqueness_phi(u1, u2[j]) * dt;
      SpectralField next1 = step(scheme, u1, dt, dw, system);
      const double t = grid.time(s + 1);
      if (!next1.all_finite()) throw BlowUpError(s + 1, t);
      const bool record = (s + 1) % record_stride == 0 || s + 1 == grid.n_steps;
      for (std::size_t j = 0; j < nd; ++j) {
        SpectralField next2 = step(scheme, u2[j], dt, dw, system);
        if (!next2.all_finite()) throw BlowUpError(s + 1, t);
        UniquenessRun& run = runs[j];
        const SpectralField v = next2 - next1;
        const double vsq = inner(v, v);
        if (deltas[j] == 0.0) {
          run.identical = run.identical && same_bits(next1, next2);
        } else if (vsq > 0.0 && v0_sq[j] > 0.0) {
          run.gronwall = std::max(run.gronwall, std::log(vsq / v0_sq[j]) / (1.0 + integral[j]));
        }
        max_v[j] = std::max(max_v[j], vsq);
        if (record) {
          run.times.push_back(t);
          run.v_sq.push_back(vsq);
          run.phi_integral.push_back(integral[j]);
        }
        u2[j] = std::move(next2);
      }
      u1 = std::move(next1);
    }
    for (std::size_t j = 0; j < nd; ++j) {
      UniquenessRun& run = runs[j];
      if (deltas[j] == 0.0) {
        run.gronwall = 0.0;
        continue;
      }
      run.amplification = max_v[j] / v0_sq[j];
      run.sup_ratio = std::sqrt(max_v[j]) / deltas[j];
      if (!std::isfinite(run.gronwall)) run.gronwall = 0.0;
    }
    per_path[path] = std::move(runs);
  });

  UniquenessReport report;
  for (auto& runs : per_path)
    for (auto& r : runs) report.runs.push_back(std::move(r));
  for (std::size_t j = 0; j < nd; ++j) {
    UniquenessSummary s;
    s.delta = deltas[j];
    std::vector<double> ratios;
    s.max_gronwall = -std::numeric_limits<double>::infinity();
    for (const auto& r : report.runs) {
      if (r.delta != deltas[j]) continue;
      ratios.push_back(r.sup_ratio);
      s.max_gronwall = std::max(s.max_gronwall, r.gronwall);
      s.max_amplification = std::max(s.max_amplification, r.amplification);
      s.all_identical = s.all_identical && r.identical;
    }
    if (!ratios.empty()) {
      s.median_sup_ratio = median(ratios);
      s.min_sup_ratio = *std::min_element(ratios.begin(), ratios.end());
      s.max_sup_ratio = *std::max_element(ratios.begin(), ratios.end());
    } else {
      s.max_gronwall = 0.0;
    }
    report.summary.push_back(s);
  }
  return report;
}

// ------------------------------------------------------- Galerkin convergence

std::vector<ConvergenceRow> run_galerkin_convergence(const SpectralField& u0, const TimeGrid& grid, Scheme scheme,
                                                     const NoiseBasis& nb, const ModelParams& p,
                                                     std::uint64_t master_seed, std::size_t n_paths,
                                                     const std::vector<int>& n_list, std::size_t state_stride) {
  if (n_list.empty()) throw ConfigError("converge needs a non-empty n_list");
  const auto ref_it = std::max_element(n_list.begin(), n_list.end());
  const std::size_t ref = std::size_t(ref_it - n_list.begin());
  if (state_stride == 0) state_stride = 1;

  std::vector<std::unique_ptr<GalerkinSystem>> systems;
  std::vector<SpectralField> starts;
  for (int n : n_list) {
    const SpacePtr space = Space::make(with_modes(u0.space().spec(), n));
    systems.push_back(std::make_unique<GalerkinSystem>(space, p, nb));
    starts.push_back(transfer(u0, space));
  }
  const SpacePtr ref_space = systems[ref]->space_ptr();

  SimulationOptions options;
  options.state_stride = state_stride;
  std::vector<ConvergenceRow> rows(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    rows[i].n = n_list[i];
    rows[i].sup_l2.assign(n_paths, 0.0);
    rows[i].int_h1.assign(n_paths, 0.0);
  }
  parallel_for(n_paths, [&](std::size_t path) {
    std::vector<Trajectory> trajs;
    for (std::size_t i = 0; i < n_list.size(); ++i)
      trajs.push_back(simulate_path(starts[i], grid, scheme, *systems[i], {master_seed, path}, options));
    const Trajectory& r = trajs[ref];
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      double sup = 0.0, integral = 0.0;
      for (std::size_t s = 0; s < r.states.size(); ++s) {
        const SpectralField diff = transfer(trajs[i].states[s], ref_space) - r.states[s];
        sup = std::max(sup, l2_norm(diff));
        if (s + 1 < r.states.size()) {
          const double h = h1_norm(diff);
          integral += h * h * (r.times[s + 1] - r.times[s]);
        }
      }
      rows[i].sup_l2[path] = sup;
      rows[i].int_h1[path] = integral;
    }
  });
  for (auto& row : rows) {
    if (n_paths == 0) continue;
    row.median_sup_l2 = median(row.sup_l2);
    row.median_int_h1 = median(row.int_h1);
  }
  return rows;
}

// ---------------------------------------------------------- invariant measure

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw StatisticsError("KS distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

InvariantMeasureReport run_invariant_measure(const SpectralField& u0, const InvariantOptions& options, Scheme scheme,
                                             const GalerkinSystem& system, std::uint64_t master_seed,
                                             std::size_t n_paths) {
  const int dim = system.space().dimension();
  if (dim != 1 && dim != 2) throw UnsupportedError("invariant-measure study is only supported for d = 1, 2");
  if (options.horizons.empty()) throw ConfigError("invariant.horizons must not be empty");
  if (!(options.dt > 0.0)) throw ConfigError("invariant.dt must be > 0");
  if (!(options.burn_in >= 0.0 && options.burn_in < 1.0)) throw ConfigError("invariant.burn_in must be in [0, 1)");
  for (std::size_t j = 0; j < options.horizons.size(); ++j) {
    if (!(options.horizons[j] > 0.0)) throw ConfigError("invariant.horizons must be > 0");
    if (j > 0 && options.horizons[j] <= options.horizons[j - 1])
      throw ConfigError("invariant.horizons must be strictly increasing");
  }
  for (std::size_t j = 1; j < options.radii.size(); ++j)
    if (options.radii[j] <= options.radii[j - 1]) throw ConfigError("invariant.radii must be strictly increasing");
  const std::size_t stride = std::max<std::size_t>(1, options.sample_stride);

  const std::size_t nh = options.horizons.size();
  const std::size_t nr = options.radii.size();
  std::vector<std::size_t> horizon_steps(nh);
  for (std::size_t j = 0; j < nh; ++j) horizon_steps[j] = std::size_t(std::llround(options.horizons[j] / options.dt));
  const std::size_t total = 4 * horizon_steps.back();
  const TimeGrid grid{double(total) * options.dt, total};

  struct PathResult {
    bool ok = false;
    std::vector<double> h1_int, h2_int;        // per horizon
    std::vector<std::vector<double>> counts;   // per horizon, per radius
    std::vector<double> samples;               // ||u||_{H1} every `stride` steps
  };
  std::vector<PathResult> results(n_paths);

  parallel_for(n_paths, [&](std::size_t path) {
    PathResult res;
    res.h1_int.assign(nh, 0.0);
    res.h2_int.assign(nh, 0.0);
    res.counts.assign(nh, std::vector<double>(nr, 0.0));
    res.samples.reserve(total / stride + 1);
    double acc1 = 0.0, acc2 = 0.0;
    std::vector<double> running(nr, 0.0);
    std::size_t next_h = 0;
    auto observe = [&](std::size_t s, const SpectralField& u) {
      while (next_h < nh && horizon_steps[next_h] == s) {
        res.h1_int[next_h] = acc1;
        res.h2_int[next_h] = acc2;
        res.counts[next_h] = running;
        ++next_h;
      }
      const double h1 = h1_norm(u);
      const double h2 = h2_norm(u);
      if (s % stride == 0) res.samples.push_back(h1);
      acc1 += h1 * h1 * options.dt;
      acc2 += h2 * h2 * options.dt;
      for (std::size_t r = 0; r < nr; ++r)
        if (h1 > options.radii[r]) running[r] += 1.0;
    };
    SimulationOptions sim;
    sim.state_stride = 0;
    sim.observer = [&](std::size_t s, double, const SpectralField& u) { observe(s, u); };
    observe(0, SpectralField(system.space_ptr(), u0.coeffs()));
    try {
      simulate_path(u0, grid, scheme, system, {master_seed, path}, sim);
      res.ok = true;
    } catch (const BlowUpError&) {
      res.ok = false;
    }
    results[path] = std::move(res);
  });

  InvariantMeasureReport report;
  report.radii = options.radii;
  report.paths = n_paths;
  for (const auto& r : results)
    if (!r.ok) ++report.blow_ups;
  for (std::size_t j = 0; j < nh; ++j) {
    InvariantRow row;
    row.horizon = options.horizons[j];
    const double t = double(horizon_steps[j]) * options.dt;
    std::vector<double> m2, h2;
    std::vector<double> occupation(nr, 0.0);
    std::vector<double> first, second, per_path_ks;
    const std::size_t n_t = horizon_steps[j];
    const auto window = [&](std::size_t lo, std::size_t hi, const std::vector<double>& samples,
                            std::vector<double>& out) {
      const std::size_t from = lo + std::size_t(std::ceil(options.burn_in * double(hi - lo)));
      for (std::size_t k = (from + stride - 1) / stride; k * stride < hi && k < samples.size(); ++k)
        out.push_back(samples[k]);
    };
    std::size_t ok = 0;
    for (const auto& r : results) {
      if (!r.ok) continue;
      ++ok;
      m2.push_back(r.h1_int[j] / t);
      h2.push_back(r.h2_int[j] / t);
      for (std::size_t k = 0; k < nr; ++k) occupation[k] += r.counts[j][k] / double(n_t);
      std::vector<double> a, b;
      window(n_t, 2 * n_t, r.samples, a);
      window(2 * n_t, 4 * n_t, r.samples, b);
      per_path_ks.push_back(ks_distance(a, b));
      first.insert(first.end(), a.begin(), a.end());
      second.insert(second.end(), b.begin(), b.end());
    }
    if (ok == 0) throw StatisticsError("every invariant-measure path blew up");
    for (double& o : occupation) o /= double(ok);
    row.m2 = estimate(m2);
    row.h2_avg = estimate(h2);
    row.occupation = occupation;
    row.ks = estimate(per_path_ks);
    row.ks_pooled = ks_distance(first, second);
    row.window_samples = first.size() + second.size();
    report.rows.push_back(std::move(row));
  }
  return report;
}

// --------------------------------------------------------------- moment study

std::vector<MomentStudyRow> run_moment_study(const MomentSetup& setup, const std::vector<MomentCell>& cells,
                                             const std::vector<double>& p_exponents) {
  std::vector<MomentStudyRow> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const MomentCell& cell = cells[c];
    const SpacePtr space = Space::make(with_modes(setup.domain, cell.n));
    NoiseBasis nb = cell.noise_count > 0
                        ? build_default_noise(space, cell.noise_count, setup.noise_amplitude, setup.noise_decay)
                        : NoiseBasis(space, {});
    const GalerkinSystem system(space, setup.params, std::move(nb));
    const SpectralField u0 = setup.u0.n() ? transfer(setup.u0, space) : SpectralField(space);
    SimulationOptions options;
    options.state_stride = 0;
    options.ledger = {LedgerLevel::basic, 1, setup.cross_power};
    const PathBatch batch =
        run_batch(u0, {setup.t_end, cell.n_steps}, setup.scheme, system, setup.master_seed, setup.n_paths, options);
    if (batch.paths.empty()) throw StatisticsError("every path of moment cell " + std::to_string(c) + " blew up");
    for (const MomentRow& row : moment_report(batch.paths, p_exponents))
      out.push_back({c, cell, row, batch.blow_ups});
  }
  return out;
}

// ---------------------------------------------------------------- persistence

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
  ensure_dir(dir);
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "command" << YAML::Value << m.command;
  e << YAML::Key << "fingerprint" << YAML::Value << m.fingerprint;
  e << YAML::Key << "master_seed" << YAML::Value << m.master_seed;
  e << YAML::Key << "n_paths" << YAML::Value << m.n_paths;
  e << YAML::Key << "code_version" << YAML::Value << kVersion;
  if (!m.extra.empty()) {
    e << YAML::Key << "notes" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : m.extra) e << YAML::Key << k << YAML::Value << v;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  std::ofstream out(dir / "manifest.yaml");
  if (!out) throw IoError("cannot write " + (dir / "manifest.yaml").string());
  out << e.c_str() << "\n";
}

void write_report(const std::filesystem::path& dir, const UniquenessReport& r) {
  ensure_dir(dir);
  auto summary = open_csv(dir / "uniqueness_summary.csv");
  summary << "delta,median_sup_ratio,min_sup_ratio,max_sup_ratio,max_gronwall,max_amplification,all_identical\n";
  for (const auto& s : r.summary)
    summary << s.delta << ',' << s.median_sup_ratio << ',' << s.min_sup_ratio << ',' << s.max_sup_ratio << ','
            << s.max_gronwall << ',' << s.max_amplification << ',' << (s.all_identical ? 1 : 0) << '\n';
  auto series = open_csv(dir / "uniqueness_series.csv");
  series << "delta,path,time,v_sq,phi_integral\n";
  for (const auto& run : r.runs)
    for (std::size_t i = 0; i < run.times.size(); ++i)
      series << run.delta << ',' << run.path << ',' << run.times[i] << ',' << run.v_sq[i] << ','
             << run.phi_integral[i] << '\n';
}

void write_report(const std::filesystem::path& dir, const std::vector<ConvergenceRow>& rows) {
  ensure_dir(dir);
  auto out = open_csv(dir / "convergence.csv");
  out << "n,median_sup_l2,median_int_h1\n";
  for (const auto& row : rows) out << row.n << ',' << row.median_sup_l2 << ',' << row.median_int_h1 << '\n';
  auto paths = open_csv(dir / "convergence_paths.csv");
  paths << "n,path,sup_l2,int_h1\n";
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.sup_l2.size(); ++i)
      paths << row.n << ',' << i << ',' << row.sup_l2[i] << ',' << row.int_h1[i] << '\n';
}

void write_report(const std::filesystem::path& dir, const InvariantMeasureReport& r) {
  ensure_dir(dir);
  auto out = open_csv(dir / "invariant.csv");
  out << "horizon,m2,m2_se,h2_avg,h2_avg_se,ks,ks_se,ks_pooled,window_samples\n";
  for (const auto& row : r.rows)
    out << row.horizon << ',' << row.m2.mean << ',' << row.m2.std_error << ',' << row.h2_avg.mean << ','
        << row.h2_avg.std_error << ',' << row.ks.mean << ',' << row.ks.std_error << ','
        << row.ks_pooled << ',' << row.window_samples << '\n';
  auto occ = open_csv(dir / "occupation.csv");
  occ << "horizon,radius,occupation,chebyshev_bound\n";
  for (const auto& row : r.rows)
    for (std::size_t k = 0; k < r.radii.size(); ++k)
      occ << row.horizon << ',' << r.radii[k] << ',' << row.occupation[k] << ','
          << row.m2.mean / (r.radii[k] * r.radii[k]) << '\n';
}

void write_report(const std::filesystem::path& dir, const std::vector<MomentStudyRow>& rows) {
  ensure_dir(dir);
  auto out = open_csv(dir / "moments.csv");
  out << "cell,n,n_steps,noise_count,quantity,p,mean,std_error,count,blow_ups\n";
  for (const auto& r : rows)
    out << r.cell << ',' << r.config.n << ',' << r.config.n_steps << ',' << r.config.noise_count << ','
        << r.moment.quantity << ',' << r.moment.p << ',' << r.moment.value.mean << ',' << r.moment.value.std_error
        << ',' << r.moment.value.count << ',' << r.blow_ups << '\n';
}

}  // namespace sllb

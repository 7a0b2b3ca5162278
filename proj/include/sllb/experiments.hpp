#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sllb/diagnostics.hpp"
#include "sllb/integrators.hpp"

namespace sllb {

/// Band-limited random field: coefficient of multi-index k in component c is
/// z (1 + lambda_k)^{-decay/2} with z a keyed normal of (seed, k, c), then the
/// field is rescaled to ||u||_{H1} = h1_radius. Coefficients of a given
/// multi-index do not depend on the truncation before rescaling.
SpectralField random_initial(const SpacePtr& space, std::uint64_t seed, double decay, double h1_radius);

/// Independent paths 0..n_paths-1 run in parallel; per-path results depend
/// only on the path index. Paths that blow up are counted, not returned.
struct PathBatch {
  std::vector<Trajectory> paths;
  std::vector<std::uint64_t> path_indices;
  std::size_t blow_ups = 0;
  std::size_t attempted = 0;
  double blow_up_fraction() const { return attempted ? double(blow_ups) / double(attempted) : 0.0; }
};

PathBatch run_batch(const SpectralField& u0, const TimeGrid& grid, Scheme scheme, const GalerkinSystem& system,
                    std::uint64_t master_seed, std::size_t n_paths, const SimulationOptions& options = {});

/// Median of a sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);

// ---------------------------------------------------------------- uniqueness

struct UniquenessRun {
  double delta = 0.0;
  std::uint64_t path = 0;
  std::vector<double> times;
  std::vector<double> v_sq;          // ||v(t)||^2_{L2}
  std::vector<double> phi_integral;  // I(t) = int_0^t Phi
  double amplification = 0.0;        // sup_t ||v||^2 / ||v0||^2
  double sup_ratio = 0.0;            // sup_t ||v||_{L2} / delta
  double gronwall = 0.0;             // max_{t>0} log(||v||^2/||v0||^2) / (1 + I(t))
  bool identical = false;            // delta = 0 run matched the base bitwise
};

struct UniquenessSummary {
  double delta = 0.0;
  double median_sup_ratio = 0.0;
  double min_sup_ratio = 0.0;
  double max_sup_ratio = 0.0;
  double max_gronwall = 0.0;
  double max_amplification = 0.0;
  bool all_identical = true;
};

struct UniquenessReport {
  std::vector<UniquenessRun> runs;
  std::vector<UniquenessSummary> summary;
};

/// Perturbation weight Phi(s) in the Gronwall bound for v = u2 - u1.
double uniqueness_phi(const SpectralField& u1, const SpectralField& u2);

/// Runs u1 from u0 and u2 from u0 + delta * direction (direction rescaled to
/// unit H1 norm) in lockstep with the same increments for every delta.
UniquenessReport run_uniqueness(const SpectralField& u0, const SpectralField& direction,
                                const std::vector<double>& deltas, const TimeGrid& grid, Scheme scheme,
                                const GalerkinSystem& system, std::uint64_t master_seed, std::size_t n_paths,
                                std::size_t record_stride = 1);

// ------------------------------------------------------- Galerkin convergence

struct ConvergenceRow {
  int n = 0;
  std::vector<double> sup_l2;  // per path sup_t ||u_n - u_ref||_{L2}
  std::vector<double> int_h1;  // per path int ||u_n - u_ref||^2_{H1} dt
  double median_sup_l2 = 0.0;
  double median_int_h1 = 0.0;
};

/// The largest entry of n_list is the reference. Differences are taken on
/// the reference space at the kept states (`state_stride`).
std::vector<ConvergenceRow> run_galerkin_convergence(const SpectralField& u0, const TimeGrid& grid, Scheme scheme,
                                                     const NoiseBasis& nb, const ModelParams& p,
                                                     std::uint64_t master_seed, std::size_t n_paths,
                                                     const std::vector<int>& n_list, std::size_t state_stride = 1);

// ---------------------------------------------------------- invariant measure

struct InvariantOptions {
  std::vector<double> horizons{50.0, 100.0, 200.0};
  std::vector<double> radii{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double dt = 1e-3;
  /// Fraction of each window dropped before building its CDF.
  double burn_in = 0.1;
  /// Steps between samples stored for the window CDFs.
  std::size_t sample_stride = 50;
};

struct InvariantRow {
  double horizon = 0.0;
  Estimate m2;       // (1/T) int_0^T ||u||^2_{H1}
  Estimate h2_avg;   // (1/T) int_0^T ||u||^2_{H2}
  std::vector<double> occupation;  // pi_T(R) per radius, averaged over paths
  /// Path-averaged KS distance between the ||u||_{H1} CDFs over [T,2T] and [2T,4T].
  Estimate ks;
  double ks_pooled = 0.0;  // same, with both windows pooled across paths
  std::size_t window_samples = 0;
};

struct InvariantMeasureReport {
  std::vector<double> radii;
  std::vector<InvariantRow> rows;
  std::size_t blow_ups = 0;
  std::size_t paths = 0;
};

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Runs each path to 4 max(horizons) and streams the observables.
InvariantMeasureReport run_invariant_measure(const SpectralField& u0, const InvariantOptions& options, Scheme scheme,
                                             const GalerkinSystem& system, std::uint64_t master_seed,
                                             std::size_t n_paths);

// --------------------------------------------------------------- moment study

struct MomentSetup {
  DomainSpec domain;
  ModelParams params;
  double noise_amplitude = 0.1;
  double noise_decay = 2.0;
  double t_end = 1.0;
  Scheme scheme = Scheme::heun;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 16;
  /// Initial state on any truncation of the box; transferred to each cell.
  SpectralField u0;
  double cross_power = 1.25;
};

struct MomentCell {
  int n = 16;  // modes per axis
  std::size_t n_steps = 1000;
  int noise_count = 8;
};

struct MomentStudyRow {
  std::size_t cell = 0;
  MomentCell config;
  MomentRow moment;
  std::size_t blow_ups = 0;
};

std::vector<MomentStudyRow> run_moment_study(const MomentSetup& setup, const std::vector<MomentCell>& cells,
                                             const std::vector<double>& p_exponents);

// ---------------------------------------------------------------- persistence

/// Provenance written next to every report.
struct Manifest {
  std::string command;
  std::string fingerprint;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 0;
  std::map<std::string, std::string> extra;
};

void write_manifest(const std::filesystem::path& dir, const Manifest& m);
void write_report(const std::filesystem::path& dir, const UniquenessReport& r);
void write_report(const std::filesystem::path& dir, const std::vector<ConvergenceRow>& rows);
void write_report(const std::filesystem::path& dir, const InvariantMeasureReport& r);
void write_report(const std::filesystem::path& dir, const std::vector<MomentStudyRow>& rows);

}  // namespace sllb

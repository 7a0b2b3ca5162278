#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sllb {

struct TimeGrid {
  double t_end = 1.0;
  std::size_t n_steps = 1000;

  double dt() const { return t_end / double(n_steps); }
  double time(std::size_t step) const { return t_end * double(step) / double(n_steps); }
  void validate() const;
  bool operator==(const TimeGrid&) const = default;
};

/// SplitMix64 finaliser; used to derive independent counter-based streams.
std::uint64_t mix64(std::uint64_t x);
/// Standard normal sample that is a pure function of `key`.
double keyed_normal(std::uint64_t key);

/// Wiener increments for one path, evaluated lazily from keys so that any
/// (step, k) entry is a pure function of (master_seed, path_index, n_steps,
/// step, k). For even n_steps the path is the Brownian-bridge refinement of
/// the path at n_steps/2, so pairwise sums of consecutive increments give the
/// coarser path; odd n_steps are sampled directly.
class WienerPath {
 public:
  WienerPath(std::uint64_t master_seed, std::uint64_t path_index, TimeGrid grid, std::size_t noise_count);

  /// Increment of W_k over [t_step, t_step + dt]; k is zero-based.
  double increment(std::size_t step, std::size_t k) const;
  void row(std::size_t step, std::span<double> out) const;

  std::size_t noise_count() const { return count_; }
  const TimeGrid& grid() const { return grid_; }
  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t path_index() const { return path_; }

 private:
  std::uint64_t seed_, path_;
  TimeGrid grid_;
  std::size_t count_;
  std::size_t base_steps_;
  int levels_;
};

/// Materialised [n_steps x K] array of increments with seed provenance.
struct WienerIncrements {
  std::vector<double> increments;
  std::size_t n_steps = 0;
  std::size_t noise_count = 0;
  double dt = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;

  static WienerIncrements generate(std::uint64_t master_seed, std::uint64_t path_index, const TimeGrid& grid,
                                   std::size_t noise_count);

  std::span<const double> row(std::size_t step) const { return {increments.data() + step * noise_count, noise_count}; }
  double operator()(std::size_t step, std::size_t k) const { return increments[step * noise_count + k]; }
  /// Pairwise sums of consecutive steps (requires even n_steps).
  WienerIncrements coarsen() const;
};

}  // namespace sllb

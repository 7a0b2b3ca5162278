#include "sllb/wiener.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sllb/errors.hpp"

namespace sllb {

namespace {

constexpr std::uint64_t kBaseTag = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kBridgeTag = 0x2545f4914f6cdd1dULL;

std::uint64_t key_of(std::uint64_t seed, std::uint64_t path, std::uint64_t k, std::uint64_t steps,
                     std::uint64_t index, std::uint64_t tag) {
  std::uint64_t h = mix64(seed ^ tag);
  h = mix64(h ^ path);
  h = mix64(h ^ (k * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ steps);
  return mix64(h ^ index);
}

}  // namespace

void TimeGrid::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end must be > 0");
  if (n_steps < 1) throw ConfigError("time.n_steps must be >= 1");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double keyed_normal(std::uint64_t key) {
  const std::uint64_t a = mix64(key);
  const std::uint64_t b = mix64(a ^ 0xd1b54a32d192ed03ULL);
  const double u1 = (double(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = double(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

WienerPath::WienerPath(std::uint64_t master_seed, std::uint64_t path_index, TimeGrid grid,
                       std::size_t noise_count)
    : seed_(master_seed), path_(path_index), grid_(grid), count_(noise_count) {
  grid_.validate();
  base_steps_ = grid_.n_steps;
  levels_ = 0;
  while (base_steps_ % 2 == 0) {
    base_steps_ /= 2;
    ++levels_;
  }
}

double WienerPath::increment(std::size_t step, std::size_t k) const {
  if (step >= grid_.n_steps || k >= count_) throw IndexError("Wiener increment index out of range");
  // Walk from the coarsest (odd) level down to the requested one.
  const std::size_t coarse = step >> levels_;
  std::size_t steps = base_steps_;
  double h = grid_.t_end / double(steps);
  double dw = std::sqrt(h) * keyed_normal(key_of(seed_, path_, k, steps, coarse, kBaseTag));
  for (int level = levels_ - 1; level >= 0; --level) {
    const std::size_t parent = step >> (level + 1);
    const bool second = (step >> level) & 1U;
    steps *= 2;
    const double z = keyed_normal(key_of(seed_, path_, k, steps, parent, kBridgeTag));
    const double first_half = 0.5 * dw + 0.5 * std::sqrt(h) * z;
    dw = second ? dw - first_half : first_half;
    h *= 0.5;
  }
  return dw;
}

void WienerPath::row(std::size_t step, std::span<double> out) const {
  if (out.size() != count_) throw DimensionError("Wiener row buffer has the wrong length");
  for (std::size_t k = 0; k < count_; ++k) out[k] = increment(step, k);
}

WienerIncrements WienerIncrements::generate(std::uint64_t master_seed, std::uint64_t path_index,
                                            const TimeGrid& grid, std::size_t noise_count) {
  const WienerPath path(master_seed, path_index, grid, noise_count);
  WienerIncrements w;
  w.n_steps = grid.n_steps;
  w.noise_count = noise_count;
  w.dt = grid.dt();
  w.master_seed = master_seed;
  w.path_index = path_index;
  w.increments.resize(grid.n_steps * noise_count);
  for (std::size_t s = 0; s < grid.n_steps; ++s)
    path.row(s, {w.increments.data() + s * noise_count, noise_count});
  return w;
}

WienerIncrements WienerIncrements::coarsen() const {
  if (n_steps % 2 != 0) throw ConfigError("cannot coarsen an odd number of Wiener steps");
  WienerIncrements c = *this;
  c.n_steps = n_steps / 2;
  c.dt = 2.0 * dt;
  c.increments.assign(c.n_steps * noise_count, 0.0);
  for (std::size_t s = 0; s < c.n_steps; ++s)
    for (std::size_t k = 0; k < noise_count; ++k)
      c.increments[s * noise_count + k] = (*this)(2 * s, k) + (*this)(2 * s + 1, k);
  return c;
}

}  // namespace sllb

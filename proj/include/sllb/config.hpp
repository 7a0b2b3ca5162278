#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sllb/experiments.hpp"

namespace sllb {

struct NoiseRecipe {
  int count = 8;
  double amplitude = 0.1;
  double decay = 2.0;
  /// When non-empty, replaces the (count, amplitude, decay) recipe.
  std::vector<NoiseMode> modes;
};

struct InitialSpec {
  std::string kind = "zero";  // zero | constant | mode | random | file
  Vec3 value{1.0, 0.0, 0.0};
  MultiIndex mode{1, 0};
  int component = 0;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  double decay = 2.0;
  double radius = 1.0;
  std::string file;
};

struct OutputSpec {
  std::string dir = "out";
  std::size_t state_stride = 1;
  std::size_t ledger_stride = 1;
  LedgerLevel ledger_level = LedgerLevel::basic;
};

struct ExperimentSpec {
  std::vector<int> n_list{16, 32, 64, 128};
  std::vector<double> deltas{0.0, 1e-4, 1e-5, 1e-6};
  std::uint64_t direction_seed = 7;
  std::size_t record_stride = 10;
  InvariantOptions invariant;
  std::vector<double> p_exponents{1.0, 2.0};
  std::vector<MomentCell> cells;
  std::vector<std::size_t> lags{4, 8, 16, 32};
  IncrementNorm structure_norm = IncrementNorm::l3_2;
  double cross_power = 1.25;
};

struct RunConfig {
  DomainSpec domain;
  ModelParams params;
  NoiseRecipe noise;
  TimeGrid time;
  Scheme scheme = Scheme::heun;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 1;
  InitialSpec initial;
  OutputSpec output;
  ExperimentSpec experiments;
};

/// Parses YAML text, applies `overrides` ("dotted.key=value", value in YAML
/// syntax), fills defaults and validates. Throws SyntaxError with a line
/// number, ConfigError naming the offending key, or RegimeError.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical text with every default written out; parse_config of it gives
/// back the same configuration.
std::string canonical_yaml(const RunConfig& cfg);

/// 16 hex digits of the 64-bit FNV-1a hash of the canonical text.
std::string fingerprint(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);

NoiseBasis build_noise(const RunConfig& cfg, const SpacePtr& space);
SpectralField build_initial(const RunConfig& cfg, const SpacePtr& space);

}  // namespace sllb

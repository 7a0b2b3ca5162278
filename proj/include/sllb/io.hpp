#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sllb/diagnostics.hpp"
#include "sllb/integrators.hpp"

namespace sllb {

inline constexpr char kCheckpointMagic[4] = {'L', 'L', 'B', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Contents of a trajectory checkpoint.
struct Checkpoint {
  DomainSpec domain;
  ModelParams params;
  std::uint64_t stride = 1;
  std::vector<double> times;
  std::vector<std::vector<double>> coefficients;  // one component-major vector per snapshot
};

/// Binary layout, all little-endian: magic "LLB1", u32 version, DomainSpec
/// (i32 dimension, 2 x f64 lengths, 2 x i32 modes, 2 x i32 points),
/// ModelParams (4 x f64 kappa1 kappa2 gamma mu, u8 strat_gamma), u64 stride,
/// u64 snapshot count, u64 coefficient count, then per snapshot f64 time and
/// the f64 coefficients.
void write_checkpoint(const std::filesystem::path& file, const Trajectory& traj, const DomainSpec& domain,
                      const ModelParams& params);
Checkpoint read_checkpoint(const std::filesystem::path& file);

/// Ledger time series, one row per recorded snapshot.
void write_ledger_csv(const std::filesystem::path& file, const EnergyLedger& ledger);

/// time,l2_residual[,h1_residual]
void write_residual_csv(const std::filesystem::path& file, const EnergyLedger& ledger, std::span<const double> l2,
                        std::span<const double> h1);

/// lag,moment,pairs
void write_structure_csv(const std::filesystem::path& file, const StructureFunction& sf);

void write_moments_csv(const std::filesystem::path& file, const std::vector<MomentRow>& rows);

}  // namespace sllb

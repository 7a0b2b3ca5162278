#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sllb/ledger.hpp"
#include "sllb/model.hpp"
#include "sllb/wiener.hpp"

namespace sllb {

enum class Scheme { em, heun, imex };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

/// Euler-Maruyama on the Ito form: u + dt F_n(u) + sum_k G_k(u) dW_k.
SpectralField step_em_ito(const SpectralField& u, double dt, std::span<const double> dW,
                          const GalerkinSystem& system);
/// Stochastic Heun on the Stratonovich form (no correction term in the drift).
SpectralField step_heun_strat(const SpectralField& u, double dt, std::span<const double> dW,
                              const GalerkinSystem& system);
/// Linear-implicit Euler: Laplacian implicit, everything else explicit (Ito form).
SpectralField step_imex(const SpectralField& u, double dt, std::span<const double> dW,
                        const GalerkinSystem& system);

SpectralField step(Scheme scheme, const SpectralField& u, double dt, std::span<const double> dW,
                   const GalerkinSystem& system);

struct SeedInfo {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
};

struct SimulationOptions {
  /// Keep every `state_stride`-th state (the final state is always kept);
  /// 0 keeps only the initial and final states.
  std::size_t state_stride = 1;
  LedgerOptions ledger{LedgerLevel::off, 1, 1.25};
  /// Called after every step with (step index of the new state, time, state).
  std::function<void(std::size_t, double, const SpectralField&)> observer;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  EnergyLedger ledger;
  std::string fingerprint;
  std::vector<std::string> warnings;
  std::size_t state_stride = 1;
};

/// Explicit-scheme stability indicator dt * kappa1 * lambda_max.
double stability_number(const GalerkinSystem& system, double dt);

/// Integrates one path. Deterministic in (u0, grid, scheme, system, seed).
/// Throws BlowUpError on a non-finite state.
Trajectory simulate_path(const SpectralField& u0, const TimeGrid& grid, Scheme scheme, const GalerkinSystem& system,
                         const SeedInfo& seed, const SimulationOptions& options = {});

/// Same Wiener increments through several truncations (per-axis mode counts
/// in `n_list`), with u0 projected onto each.
std::vector<Trajectory> couple_resolutions(const SpectralField& u0, const TimeGrid& grid, Scheme scheme,
                                           const NoiseBasis& nb, const ModelParams& p, const SeedInfo& seed,
                                           const std::vector<int>& n_list, const SimulationOptions& options = {});

/// DomainSpec of the same box with `n` modes per axis and the minimal grid.
DomainSpec with_modes(const DomainSpec& spec, int n);

}  // namespace sllb

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sllb/integrators.hpp"

namespace sllb {

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Order-independent (Neumaier-compensated) sum.
double compensated_sum(std::span<const double> values);
Estimate estimate(std::span<const double> values);

/// Residual of the discrete L2 balance at every ledger row:
///   1/2||u(t)||^2 + kappa1 int||grad u||^2 + kappa2 int int(1+mu|u|^2)|u|^2
///   - 1/2||u0||^2 - 1/2 kappa1 sum_k int <h_k, G_k(u)> - kappa1 sum_k int <u,h_k> dW_k.
/// Requires a ledger recorded with stride 1.
std::vector<double> l2_energy_residual(const Trajectory& traj, const ModelParams& p);

/// Residual of the discrete H1 balance; requires a full-level ledger with stride 1.
std::vector<double> h1_energy_residual(const Trajectory& traj, const ModelParams& p);

double max_abs(std::span<const double> v);

/// One line of a moment table.
struct MomentRow {
  std::string quantity;
  double p = 1.0;
  Estimate value;
};

/// Monte Carlo moment estimates over a batch of trajectories with ledgers:
///   sup_l2      E sup_t ||u||^{2p}_{L2}
///   int_grad    E (int ||grad u||^2)^p
///   int_quartic E (int int (1+mu|u|^2)|u|^2)^p
///   sup_grad    E sup_t ||grad u||^{2p}
///   sup_h1      E sup_t ||u||^{2p}_{H1}
///   int_lap     E (int ||Lap u||^2)^p
///   int_f3      E int ||(1+mu|u|^2)u||^2            (p = 1 only)
///   int_cross   E (int ||u x Lap u||^r)^p
///   int_linf    E (int ||u||^2_{L-inf})^p
std::vector<MomentRow> moment_report(std::span<const Trajectory> batch, std::span<const double> p_exponents);

/// Looks up a row of a moment table; throws IndexError if absent.
const MomentRow& find_moment(const std::vector<MomentRow>& table, const std::string& quantity, double p);

/// Maximum over samples of the interpolation ratio
///   d = 1: ||v||_{L-inf} / (||v||_{L2}^{1/2} ||v||_{H1}^{1/2})
///   d = 2: ||v||_{L4}    / (||v||_{L2}^{1/2} ||v||_{H1}^{1/2})
double interpolation_ratios(std::span<const SpectralField> samples, int dimension);

enum class IncrementNorm { l2, l3_2 };

struct StructureFunction {
  std::vector<double> lags;
  std::vector<double> moments;
  std::vector<std::size_t> pairs;
  double slope = 0.0;
  IncrementNorm norm = IncrementNorm::l2;
};

/// S_2(tau) = mean over paths and time pairs of ||u(t+tau) - u(t)||^2 in the
/// chosen spatial norm; lags in units of steps of the underlying grid. The
/// slope is a least-squares fit of log S_2 on log tau over the lags within
/// [4 dt, T/8].
StructureFunction holder_structure(std::span<const Trajectory> batch, const TimeGrid& grid,
                                   std::span<const std::size_t> lag_steps, IncrementNorm norm);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sllb

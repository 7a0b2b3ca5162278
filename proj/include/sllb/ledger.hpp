#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sllb/model.hpp"

namespace sllb {

enum class LedgerLevel {
  off,
  /// Norms, quartic/L4/L-inf/cross terms and both stochastic integrals.
  basic,
  /// Everything in basic plus the gradient-weighted quartic terms and the
  /// remainder R(u, h_k) needed for the H1 balance.
  full,
};

struct LedgerOptions {
  LedgerLevel level = LedgerLevel::basic;
  std::size_t stride = 1;
  /// Exponent r of the accumulated int ||u x Lap u||^r (r < 4/3).
  double cross_power = 1.25;
};

/// Instantaneous energy quantities of one state.
struct LedgerTerms {
  double half_l2 = 0.0;       // 1/2 ||u||^2
  double grad_sq = 0.0;       // ||grad u||^2
  double lap_sq = 0.0;        // ||Lap u||^2
  double quartic = 0.0;       // int (1 + mu|u|^2)|u|^2
  double l4_4 = 0.0;          // ||u||_L4^4
  double cross_norm = 0.0;    // ||u x Lap u||_L2
  double linf_sq = 0.0;       // max_grid |u|^2
  double f3_l2_sq = 0.0;      // ||(1 + mu|u|^2) u||^2
  double grad_quartic = 0.0;  // int (1 + mu|u|^2)|grad u|^2            (full)
  double udu_sq = 0.0;        // sum_j int (u . d_j u)^2                 (full)
  double remainder = 0.0;     // sum_k R(u, h_k)                          (full)
};

/// One ledger row: instantaneous terms at `time` plus left-point integrals
/// over [0, time] and the accumulated Ito stochastic integrals.
struct LedgerSnapshot {
  double time = 0.0;
  LedgerTerms now;
  double int_grad_sq = 0.0;
  double int_lap_sq = 0.0;
  double int_quartic = 0.0;
  double int_l4_4 = 0.0;
  double int_cross_pow = 0.0;
  double int_linf_sq = 0.0;
  double int_f3_l2_sq = 0.0;
  double int_grad_quartic = 0.0;
  double int_udu_sq = 0.0;
  double int_remainder = 0.0;
  /// int (1/2) kappa1 sum_k <h_k, G_k(u)> ds
  double l2_source = 0.0;
  /// kappa1 sum_k int <u, h_k> dW_k
  double stoch_l2 = 0.0;
  /// sum_k int <grad u, gamma u x grad h_k + kappa1 grad h_k> dW_k
  double stoch_h1 = 0.0;
};

struct EnergyLedger {
  LedgerOptions options;
  std::vector<LedgerSnapshot> rows;
};

/// R(u, h_k) by dealiased quadrature (k zero-based).
double r_remainder(const SpectralField& u, std::size_t k, const NoiseBasis& nb, const ModelParams& p);

/// sum_k <grad u, gamma u x grad h_k + kappa1 grad h_k> w_k, by quadrature of the gradients.
double h1_noise_pairing(const SpectralField& u, std::span<const double> weights, const NoiseBasis& nb,
                        const ModelParams& p);

/// Evaluates ledger terms and accumulates the running integrals along a path.
class LedgerRecorder {
 public:
  LedgerRecorder(const GalerkinSystem& system, LedgerOptions options);

  LedgerTerms evaluate(const SpectralField& u) const;

  /// Starts a ledger at the initial state.
  void begin(const SpectralField& u0, double t0);
  /// Accounts for one step [t, t + dt] taken from `u` with increments dW, then
  /// observes the new state `next`. Records a row when the step count hits
  /// the stride or `force_row` is set.
  void advance(const SpectralField& u, double dt, std::span<const double> dW, const SpectralField& next,
               double t_next, bool force_row);

  EnergyLedger take() { return std::move(ledger_); }
  const EnergyLedger& ledger() const { return ledger_; }

 private:
  const GalerkinSystem& system_;
  LedgerOptions options_;
  EnergyLedger ledger_;
  LedgerSnapshot running_;
  std::size_t steps_ = 0;
};

}  // namespace sllb

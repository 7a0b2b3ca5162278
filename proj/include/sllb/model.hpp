#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sllb/field.hpp"

namespace sllb {

/// Temperature-level inputs from which the effective coefficients derive.
struct RawParams {
  double temperature = 0.0;
  double curie_temperature = 0.0;
  double chi_parallel = 0.0;
};

/// Effective coefficients of the stochastic LLB equation above Curie.
struct ModelParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double gamma = 1.0;
  double mu = 1.0;
  /// Include gamma in the Stratonovich-to-Ito correction (chain-rule form).
  /// Off reproduces the formula without gamma, for comparison only.
  bool strat_gamma = true;
  std::optional<RawParams> raw;

  /// Throws ConfigError unless every coefficient is positive. With
  /// `allow_degenerate`, kappa2, gamma and mu may be zero (reduced test
  /// dynamics such as pure heat flow); kappa1 must stay positive.
  void validate(bool allow_degenerate = false) const;
  /// Prefactor of sum_k Pi_n(G_k x h_k) in the Ito drift.
  double strat_prefactor() const { return 0.5 * (strat_gamma ? gamma : 1.0); }
};

/// kappa2 = kappa1 / chi, mu = 3T / (5 (T - Tc)). Throws RegimeError unless T > Tc.
ModelParams derive_params(double temperature, double curie_temperature, double chi_parallel, double kappa1,
                          double gamma);

/// Single-mode noise field: amplitude * e_mode in one component.
struct NoiseMode {
  MultiIndex mode{0, 0};
  int component = 0;
  double amplitude = 0.0;
};

/// The family {h_k} with its W^{1,inf} ledger. Fields are resolved in S_n, so
/// Pi_n h_k = h_k. Grid values of h_k and of its gradient are cached.
class NoiseBasis {
 public:
  NoiseBasis() = default;
  NoiseBasis(SpacePtr space, std::vector<SpectralField> fields);
  static NoiseBasis from_modes(SpacePtr space, const std::vector<NoiseMode>& modes);

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  const SpacePtr& space_ptr() const { return space_; }
  /// Zero-based: field(0) is h_1.
  const SpectralField& field(std::size_t k) const;
  const std::vector<SpectralField>& fields() const { return fields_; }

  /// ||h_k||^2_{W^{1,inf}} with ||f||_{W^{1,inf}} = ||f||_inf + ||grad f||_inf.
  const std::vector<double>& w1inf_bounds() const { return w1inf_; }
  double total_bound() const { return total_; }
  /// sum_k ||h_k||^2_{L2}
  double l2_sum() const;

  /// Grid values of h_k and d h_k / dx_a.
  const PhysicalField& grid(std::size_t k) const { return grids_[k]; }
  const PhysicalField& grid_gradient(std::size_t k, int axis) const { return grad_grids_[k][axis]; }

  /// Same family on another truncation; throws ConfigError when a mode of
  /// some h_k is not resolved there.
  NoiseBasis restrict_to(const SpacePtr& target) const;

  /// Grid values of sum_k h_k * weights[k].
  PhysicalField combine(std::span<const double> weights) const;

 private:
  SpacePtr space_;
  std::vector<SpectralField> fields_;
  std::vector<double> w1inf_;
  double total_ = 0.0;
  std::vector<PhysicalField> grids_;
  std::vector<std::vector<PhysicalField>> grad_grids_;
};

/// h_k = a k^{-s} e_k in component ((k-1) mod 3), k = 1..K. Requires s > 1.5.
NoiseBasis build_default_noise(const SpacePtr& space, int count, double amplitude = 0.1, double decay = 2.0);

/// Pi_n(u x Laplacian u)
SpectralField f2_cross_term(const SpectralField& u);
/// Pi_n((1 + mu |u|^2) u)
SpectralField f3_cubic_term(const SpectralField& u, double mu);
/// G_k(u) = Pi_n(gamma u x h_k + kappa1 h_k); k is zero-based.
SpectralField noise_operator(const SpectralField& u, std::size_t k, const NoiseBasis& nb, const ModelParams& p);
/// (gamma/2) sum_k Pi_n(G_k(u) x h_k), evaluated directly by quadrature.
SpectralField strat_correction(const SpectralField& u, const NoiseBasis& nb, const ModelParams& p);

struct DriftBreakdown {
  SpectralField f1, f2, f3, strat, total;
};

/// Ito drift F_n = kappa1 f1 + gamma f2 - kappa2 f3 + strat, with all parts.
DriftBreakdown drift_ito(const SpectralField& u, const NoiseBasis& nb, const ModelParams& p);

/// Fused evaluation of the Galerkin system used by the time steppers. The
/// Stratonovich correction is linear in u (h_k x h_k = 0) and is applied
/// through a precomputed 3n x 3n matrix.
class GalerkinSystem {
 public:
  GalerkinSystem(SpacePtr space, ModelParams params, NoiseBasis noise);

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const ModelParams& params() const { return params_; }
  const NoiseBasis& noise() const { return noise_; }

  /// dt * (gamma Pi(u x Lap u) - kappa2 Pi((1+mu|u|^2)u)) + sum_k G_k(u) dW_k
  /// (+ dt kappa1 Lap u when `with_linear`). One synthesis pass and one
  /// analysis pass.
  SpectralField explicit_increment(const SpectralField& u, double dt, std::span<const double> dW,
                                   bool with_linear) const;

  /// Stratonovich-to-Ito correction via the precomputed operator.
  SpectralField strat_correction(const SpectralField& u) const;
  const std::vector<double>& strat_matrix() const { return strat_matrix_; }

  /// Full Ito drift F_n(u).
  SpectralField drift(const SpectralField& u) const;

 private:
  SpacePtr space_;
  ModelParams params_;
  NoiseBasis noise_;
  std::vector<double> strat_matrix_;  // row-major (3n x 3n)
};

}  // namespace sllb

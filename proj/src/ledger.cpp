#include "sllb/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "sllb/kernels.hpp"
#include "sllb/spectral.hpp"

namespace sllb {

namespace {

// R(u, h_k) from precomputed grids of u and grad u.
double remainder_from_grids(const PhysicalField& u_grid, const std::vector<PhysicalField>& du,
                            const SpectralField& u, std::size_t k, const NoiseBasis& nb, const ModelParams& p) {
  const SpectralField gk = noise_operator(u, k, nb, p);
  const PhysicalField g_grid = synthesize(gk);
  const std::vector<PhysicalField> dg = gradient(gk);
  const std::size_t grid = u_grid.size();
  double first = 0.0, second = 0.0;
  for (std::size_t a = 0; a < du.size(); ++a) {
    const PhysicalField& dh = nb.grid_gradient(k, int(a));
    for (std::size_t q = 0; q < grid; ++q) {
      const Vec3 dhq = dh.at(q);
      first += dot(du[a].at(q), cross(g_grid.at(q), dhq));
      second += dot(p.gamma * cross(u_grid.at(q), dhq) + p.kappa1 * dhq, dg[a].at(q));
    }
  }
  const double w = u_grid.space().weight();
  return 0.5 * p.gamma * first * w + 0.5 * second * w;
}

}  // namespace

double r_remainder(const SpectralField& u, std::size_t k, const NoiseBasis& nb, const ModelParams& p) {
  nb.field(k);  // range check
  return remainder_from_grids(synthesize(u), gradient(u), u, k, nb, p);
}

double h1_noise_pairing(const SpectralField& u, std::span<const double> weights, const NoiseBasis& nb,
                        const ModelParams& p) {
  if (weights.size() != nb.size()) throw DimensionError("noise weight count does not match K");
  const PhysicalField u_grid = synthesize(u);
  const std::vector<PhysicalField> du = gradient(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    double s = 0.0;
    for (std::size_t a = 0; a < du.size(); ++a) {
      const PhysicalField& dh = nb.grid_gradient(k, int(a));
      for (std::size_t q = 0; q < u_grid.size(); ++q) {
        const Vec3 dhq = dh.at(q);
        s += dot(du[a].at(q), p.gamma * cross(u_grid.at(q), dhq) + p.kappa1 * dhq);
      }
    }
    acc += weights[k] * s * u_grid.space().weight();
  }
  return acc;
}

LedgerRecorder::LedgerRecorder(const GalerkinSystem& system, LedgerOptions options)
    : system_(system), options_(options) {
  if (options_.stride < 1) options_.stride = 1;
  ledger_.options = options_;
}

LedgerTerms LedgerRecorder::evaluate(const SpectralField& u) const {
  LedgerTerms t;
  t.half_l2 = 0.5 * inner(u, u);
  t.grad_sq = grad_norm_sq(u);
  t.lap_sq = lap_norm_sq(u);
  const ModelParams& p = system_.params();
  const PhysicalField ug = synthesize(u);
  const PhysicalField lg = synthesize(laplacian(u));
  const std::size_t grid = ug.size();
  double quartic = 0.0, l4 = 0.0, cross_sq = 0.0, linf = 0.0, f3 = 0.0;
  for (std::size_t q = 0; q < grid; ++q) {
    const Vec3 a = ug.at(q);
    const double m = norm_sq(a);
    const double s = 1.0 + p.mu * m;
    quartic += s * m;
    l4 += m * m;
    cross_sq += norm_sq(cross(a, lg.at(q)));
    linf = std::max(linf, m);
    f3 += s * s * m;
  }
  const double w = ug.space().weight();
  t.quartic = quartic * w;
  t.l4_4 = l4 * w;
  t.cross_norm = std::sqrt(cross_sq * w);
  t.linf_sq = linf;
  t.f3_l2_sq = f3 * w;
  if (options_.level == LedgerLevel::full) {
    const std::vector<PhysicalField> du = gradient(u);
    double gq = 0.0, udu = 0.0;
    for (std::size_t q = 0; q < grid; ++q) {
      const Vec3 a = ug.at(q);
      const double s = 1.0 + p.mu * norm_sq(a);
      for (const auto& d : du) {
        const Vec3 dq = d.at(q);
        gq += s * norm_sq(dq);
        const double pair = dot(a, dq);
        udu += pair * pair;
      }
    }
    t.grad_quartic = gq * w;
    t.udu_sq = udu * w;
    const NoiseBasis& nb = system_.noise();
    for (std::size_t k = 0; k < nb.size(); ++k) t.remainder += remainder_from_grids(ug, du, u, k, nb, p);
  }
  return t;
}

void LedgerRecorder::begin(const SpectralField& u0, double t0) {
  running_ = LedgerSnapshot{};
  running_.time = t0;
  running_.now = evaluate(u0);
  steps_ = 0;
  ledger_.rows.clear();
  ledger_.rows.push_back(running_);
}

void LedgerRecorder::advance(const SpectralField& u, double dt, std::span<const double> dW,
                             const SpectralField& next, double t_next, bool force_row) {
  const LedgerTerms& now = running_.now;
  const ModelParams& p = system_.params();
  running_.int_grad_sq += now.grad_sq * dt;
  running_.int_lap_sq += now.lap_sq * dt;
  running_.int_quartic += now.quartic * dt;
  running_.int_l4_4 += now.l4_4 * dt;
  running_.int_cross_pow += std::pow(now.cross_norm, options_.cross_power) * dt;
  running_.int_linf_sq += now.linf_sq * dt;
  running_.int_f3_l2_sq += now.f3_l2_sq * dt;
  running_.int_grad_quartic += now.grad_quartic * dt;
  running_.int_udu_sq += now.udu_sq * dt;
  running_.int_remainder += now.remainder * dt;

  const NoiseBasis& nb = system_.noise();
  if (!nb.empty() && !dW.empty()) {
    // <h_k, G_k(u)> = kappa1 ||h_k||^2 since h_k . (u x h_k) = 0.
    running_.l2_source += 0.5 * p.kappa1 * p.kappa1 * nb.l2_sum() * dt;
    double s = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) s += inner(u, nb.field(k)) * dW[k];
    running_.stoch_l2 += p.kappa1 * s;
    // <grad u, gamma u x grad H + kappa1 grad H> = -<Lap u, gamma u x H + kappa1 H>
    // for u in S_n (Neumann), with H = sum_k h_k dW_k.
    const PhysicalField h = nb.combine(dW);
    const PhysicalField ug = synthesize(u);
    const PhysicalField lg = synthesize(laplacian(u));
    double pair = 0.0;
    for (std::size_t q = 0; q < ug.size(); ++q) {
      const Vec3 hq = h.at(q);
      pair += dot(lg.at(q), p.gamma * cross(ug.at(q), hq) + p.kappa1 * hq);
    }
    running_.stoch_h1 -= pair * ug.space().weight();
  }

  ++steps_;
  running_.time = t_next;
  running_.now = evaluate(next);
  if (force_row || steps_ % options_.stride == 0) ledger_.rows.push_back(running_);
}

}  // namespace sllb

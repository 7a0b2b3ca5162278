#include "sllb/model.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "sllb/errors.hpp"
#include "sllb/kernels.hpp"
#include "sllb/spectral.hpp"

namespace sllb {

void ModelParams::validate(bool allow_degenerate) const {
  auto check = [allow_degenerate](double v, const char* name, bool strict) {
    const bool ok = std::isfinite(v) && (strict || !allow_degenerate ? v > 0.0 : v >= 0.0);
    if (!ok) throw ConfigError(std::string("model.") + name + " must be > 0");
  };
  check(kappa1, "kappa1", true);
  check(kappa2, "kappa2", false);
  check(gamma, "gamma", false);
  check(mu, "mu", false);
  if (raw) {
    const ModelParams d =
        derive_params(raw->temperature, raw->curie_temperature, raw->chi_parallel, kappa1, gamma);
    if (std::abs(d.kappa2 - kappa2) > 1e-12 * d.kappa2 || std::abs(d.mu - mu) > 1e-12 * d.mu)
      throw ConfigError("model.kappa2/mu disagree with the raw temperature inputs");
  }
}

ModelParams derive_params(double temperature, double curie_temperature, double chi_parallel, double kappa1,
                          double gamma) {
  if (!(temperature > curie_temperature))
    throw RegimeError("above-Curie model only: need T > Tc (T=" + std::to_string(temperature) +
                      ", Tc=" + std::to_string(curie_temperature) + ")");
  if (!(curie_temperature > 0.0)) throw RegimeError("Curie temperature must be positive");
  if (!(chi_parallel > 0.0)) throw ConfigError("model.chi_parallel must be > 0");
  if (!(kappa1 > 0.0)) throw ConfigError("model.kappa1 must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("model.gamma must be > 0");
  ModelParams p;
  p.kappa1 = kappa1;
  p.gamma = gamma;
  p.kappa2 = kappa1 / chi_parallel;
  p.mu = 3.0 * temperature / (5.0 * (temperature - curie_temperature));
  p.raw = RawParams{temperature, curie_temperature, chi_parallel};
  return p;
}

// ---------------------------------------------------------------------------
// NoiseBasis

NoiseBasis::NoiseBasis(SpacePtr space, std::vector<SpectralField> fields)
    : space_(std::move(space)), fields_(std::move(fields)) {
  for (const auto& h : fields_) {
    if (h.n() != space_->n()) throw DimensionError("noise field lives on a different space");
    if (!h.all_finite()) throw ConfigError("noise field has non-finite coefficients");
    const SupNorms s = sup_norms(h);
    const double b = (s.value + s.gradient) * (s.value + s.gradient);
    w1inf_.push_back(b);
    total_ += b;
    grids_.push_back(synthesize(h));
    grad_grids_.push_back(gradient(h));
  }
}

NoiseBasis NoiseBasis::from_modes(SpacePtr space, const std::vector<NoiseMode>& modes) {
  std::vector<SpectralField> fields;
  for (const auto& m : modes) {
    const std::size_t i = space->basis().find(m.mode);
    if (i == EigenBasis::npos)
      throw ConfigError("noise mode (" + std::to_string(m.mode[0]) + "," + std::to_string(m.mode[1]) +
                        ") is beyond the spectral truncation");
    fields.push_back(SpectralField::mode(space, i, m.component, m.amplitude));
  }
  return NoiseBasis(std::move(space), std::move(fields));
}

const SpectralField& NoiseBasis::field(std::size_t k) const {
  if (k >= fields_.size())
    throw IndexError("noise index " + std::to_string(k + 1) + " out of range (K=" + std::to_string(size()) + ")");
  return fields_[k];
}

double NoiseBasis::l2_sum() const {
  double s = 0.0;
  for (const auto& h : fields_) s += inner(h, h);
  return s;
}

NoiseBasis NoiseBasis::restrict_to(const SpacePtr& target) const {
  if (target.get() == space_.get()) return *this;
  std::vector<SpectralField> out;
  for (const auto& h : fields_) {
    SpectralField t = transfer(h, target);
    const double lost = std::abs(inner(h, h) - inner(t, t));
    if (lost > 1e-14 * (1.0 + inner(h, h)))
      throw ConfigError("noise field has modes outside the truncation n=" + std::to_string(target->n()));
    out.push_back(std::move(t));
  }
  return NoiseBasis(target, std::move(out));
}

PhysicalField NoiseBasis::combine(std::span<const double> weights) const {
  if (weights.size() != fields_.size()) throw DimensionError("noise weight count does not match K");
  PhysicalField out(space_);
  auto& v = out.values();
  for (std::size_t k = 0; k < fields_.size(); ++k) {
    const double w = weights[k];
    if (w == 0.0) continue;
    const auto& h = grids_[k].values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * h[i];
  }
  return out;
}

NoiseBasis build_default_noise(const SpacePtr& space, int count, double amplitude, double decay) {
  if (count < 0) throw ConfigError("noise.K must be >= 0");
  if (!(decay > 1.5))
    throw ConfigError("noise.decay must exceed 1.5 so that sum_k ||h_k||^2_{W^{1,inf}} <= h < inf (got " +
                      std::to_string(decay) + ")");
  if (std::size_t(count) >= space->n())
    throw ConfigError("noise.K=" + std::to_string(count) + " requests modes beyond the truncation n=" +
                      std::to_string(space->n()));
  std::vector<SpectralField> fields;
  for (int k = 1; k <= count; ++k)
    fields.push_back(SpectralField::mode(space, std::size_t(k), (k - 1) % 3, amplitude * std::pow(k, -decay)));
  return NoiseBasis(space, std::move(fields));
}

// ---------------------------------------------------------------------------
// Drift and noise operators, direct quadrature route

SpectralField f2_cross_term(const SpectralField& u) {
  return dealiased_pointwise(2, [](const Vec3& a, const Vec3& l) { return cross(a, l); }, u, laplacian(u));
}

SpectralField f3_cubic_term(const SpectralField& u, double mu) {
  return dealiased_pointwise(3, [mu](const Vec3& a) { return (1.0 + mu * norm_sq(a)) * a; }, u);
}

SpectralField noise_operator(const SpectralField& u, std::size_t k, const NoiseBasis& nb, const ModelParams& p) {
  const SpectralField& h = nb.field(k);
  const double g = p.gamma, k1 = p.kappa1;
  return dealiased_pointwise(
      2, [g, k1](const Vec3& a, const Vec3& hk) { return g * cross(a, hk) + k1 * hk; }, u, h);
}

SpectralField strat_correction(const SpectralField& u, const NoiseBasis& nb, const ModelParams& p) {
  SpectralField out(u.space_ptr());
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const SpectralField gk = noise_operator(u, k, nb, p);
    out += dealiased_pointwise(2, [](const Vec3& a, const Vec3& h) { return cross(a, h); }, gk, nb.field(k));
  }
  out *= p.strat_prefactor();
  return out;
}

DriftBreakdown drift_ito(const SpectralField& u, const NoiseBasis& nb, const ModelParams& p) {
  DriftBreakdown d;
  d.f1 = laplacian(u);
  d.f2 = f2_cross_term(u);
  d.f3 = f3_cubic_term(u, p.mu);
  d.strat = strat_correction(u, nb, p);
  d.total = SpectralField(u.space_ptr());
  auto& t = d.total.coeffs();
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = p.kappa1 * d.f1.coeffs()[i] + p.gamma * d.f2.coeffs()[i] - p.kappa2 * d.f3.coeffs()[i] +
           d.strat.coeffs()[i];
  return d;
}

// ---------------------------------------------------------------------------
// GalerkinSystem

GalerkinSystem::GalerkinSystem(SpacePtr space, ModelParams params, NoiseBasis noise)
    : space_(std::move(space)), params_(params), noise_(noise.restrict_to(space_)) {
  params_.validate(true);
  require_dealiased(*space_, 3);
  if (noise_.empty()) return;

  // Column j of the operator is the image of the unit coefficient vector e_j,
  // j = c*n + i. All 3n columns are pushed through the transforms together.
  const Space& s = *space_;
  const std::size_t n = s.n(), grid = s.grid_size(), dim = kComponents * n;
  const int batch = int(dim) * kComponents;
  std::vector<double> cols(dim * dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) cols[j * dim + j] = 1.0;
  std::vector<double> vals(std::size_t(batch) * grid), crossed(vals.size()), coeffs(cols.size()),
      accum(cols.size(), 0.0);
  const double g = params_.gamma;

  auto cross_with = [&](const PhysicalField& h, double scale) {
    const auto& hv = h.values();
    for (std::size_t col = 0; col < dim; ++col) {
      const double* v = vals.data() + col * kComponents * grid;
      double* o = crossed.data() + col * kComponents * grid;
      for (std::size_t q = 0; q < grid; ++q) {
        const Vec3 a{v[q], v[grid + q], v[2 * grid + q]};
        const Vec3 b{hv[q], hv[grid + q], hv[2 * grid + q]};
        const Vec3 r = scale * cross(a, b);
        o[q] = r.x;
        o[grid + q] = r.y;
        o[2 * grid + q] = r.z;
      }
    }
  };

  kernels::synthesize(s, cols, vals, batch);
  const std::vector<double> basis_vals = vals;
  for (std::size_t k = 0; k < noise_.size(); ++k) {
    vals = basis_vals;
    cross_with(noise_.grid(k), g);  // gamma e_j x h_k
    kernels::analyze(s, crossed, coeffs, batch);
    kernels::synthesize(s, coeffs, vals, batch);
    cross_with(noise_.grid(k), 1.0);  // Pi(gamma e_j x h_k) x h_k
    kernels::analyze(s, crossed, coeffs, batch);
    for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += coeffs[i];
  }
  // accum holds column j contiguously; store row-major for the mat-vec.
  const double pref = params_.strat_prefactor();
  strat_matrix_.assign(dim * dim, 0.0);
  for (std::size_t col = 0; col < dim; ++col)
    for (std::size_t row = 0; row < dim; ++row) strat_matrix_[row * dim + col] = pref * accum[col * dim + row];
}

SpectralField GalerkinSystem::explicit_increment(const SpectralField& u, double dt, std::span<const double> dW,
                                                 bool with_linear) const {
  const Space& s = *space_;
  const std::size_t n = s.n(), grid = s.grid_size();
  const SpectralField lap = laplacian(u);

  thread_local std::vector<double> in_coeffs, in_vals, out_vals;
  in_coeffs.resize(2 * kComponents * n);
  std::copy(u.coeffs().begin(), u.coeffs().end(), in_coeffs.begin());
  std::copy(lap.coeffs().begin(), lap.coeffs().end(), in_coeffs.begin() + kComponents * n);
  in_vals.resize(2 * kComponents * grid);
  out_vals.resize(kComponents * grid);
  kernels::synthesize(s, in_coeffs, in_vals, 2 * kComponents);

  const bool noisy = !noise_.empty() && !dW.empty();
  PhysicalField h_sum = noisy ? noise_.combine(dW) : PhysicalField();
  const double* hv = noisy ? h_sum.values().data() : nullptr;
  const double g = params_.gamma, k1 = params_.kappa1, k2 = params_.kappa2, mu = params_.mu;
  const double* uv = in_vals.data();
  const double* lv = in_vals.data() + kComponents * grid;
  double* ov = out_vals.data();

#pragma omp parallel for if (grid >= 4096 && !omp_in_parallel())
  for (std::size_t q = 0; q < grid; ++q) {
    const Vec3 a{uv[q], uv[grid + q], uv[2 * grid + q]};
    const Vec3 l{lv[q], lv[grid + q], lv[2 * grid + q]};
    Vec3 r = dt * (g * cross(a, l) - (k2 * (1.0 + mu * norm_sq(a))) * a);
    if (noisy) {
      const Vec3 h{hv[q], hv[grid + q], hv[2 * grid + q]};
      r += g * cross(a, h) + k1 * h;
    }
    ov[q] = r.x;
    ov[grid + q] = r.y;
    ov[2 * grid + q] = r.z;
  }
  SpectralField incr(space_);
  kernels::analyze(s, out_vals, incr.coeffs(), kComponents);
  if (with_linear) incr.axpy(dt * k1, lap);
  return incr;
}

SpectralField GalerkinSystem::strat_correction(const SpectralField& u) const {
  SpectralField out(space_);
  if (strat_matrix_.empty()) return out;
  const std::size_t dim = u.coeffs().size();
  const double* m = strat_matrix_.data();
  const double* x = u.coeffs().data();
  double* y = out.coeffs().data();
#pragma omp parallel for if (dim * dim >= kernels::kParallelThreshold && !omp_in_parallel())
  for (std::size_t r = 0; r < dim; ++r) {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t c = 0; c < dim; ++c) acc += m[r * dim + c] * x[c];
    y[r] = acc;
  }
  return out;
}

SpectralField GalerkinSystem::drift(const SpectralField& u) const {
  SpectralField f = explicit_increment(u, 1.0, {}, true);
  f += strat_correction(u);
  return f;
}

}  // namespace sllb

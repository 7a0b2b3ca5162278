#include "sllb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sllb {

SpectralField::SpectralField(SpacePtr space) : space_(std::move(space)), coeffs_(kComponents * space_->n(), 0.0) {}

SpectralField::SpectralField(SpacePtr space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != kComponents * space_->n())
    throw DimensionError("expected " + std::to_string(kComponents * space_->n()) + " coefficients, got " +
                         std::to_string(coeffs_.size()));
}

SpectralField SpectralField::mode(SpacePtr space, std::size_t mode, int component, double amplitude) {
  if (mode >= space->n()) throw IndexError("mode " + std::to_string(mode) + " outside the truncation");
  if (component < 0 || component >= kComponents) throw IndexError("component out of range");
  SpectralField f(std::move(space));
  f(component, mode) = amplitude;
  return f;
}

SpectralField SpectralField::constant(SpacePtr space, const Vec3& value) {
  SpectralField f(space);
  double volume = 1.0;
  for (int a = 0; a < space->dimension(); ++a) volume *= space->spec().lengths[a];
  const double e0 = 1.0 / std::sqrt(volume);
  for (int c = 0; c < kComponents; ++c) f(c, 0) = value[c] / e0;
  return f;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), 0.0); }

void SpectralField::check_compatible(const SpectralField& o) const {
  if (coeffs_.size() != o.coeffs_.size()) throw DimensionError("fields live on different spaces");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : coeffs_) v *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  return *this;
}

PhysicalField::PhysicalField(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != kComponents * space_->grid_size())
    throw DimensionError("grid values do not match the quadrature grid");
}

PhysicalField synthesize(const SpectralField& c) {
  PhysicalField f(c.space_ptr());
  kernels::synthesize(c.space(), c.coeffs(), f.values(), kComponents);
  return f;
}

SpectralField analyze(const PhysicalField& f) {
  SpectralField c(f.space_ptr());
  kernels::analyze(f.space(), f.values(), c.coeffs(), kComponents);
  return c;
}

std::vector<PhysicalField> gradient(const SpectralField& c) {
  std::vector<PhysicalField> out;
  for (int a = 0; a < c.space().dimension(); ++a) {
    PhysicalField f(c.space_ptr());
    kernels::synthesize(c.space(), c.coeffs(), f.values(), kComponents, a);
    out.push_back(std::move(f));
  }
  return out;
}

SpectralField laplacian(const SpectralField& c) {
  SpectralField out(c.space_ptr());
  const std::size_t n = c.n();
  for (int k = 0; k < kComponents; ++k)
    for (std::size_t i = 0; i < n; ++i) out(k, i) = -c.space().lambda(i) * c(k, i);
  return out;
}

double sobolev_norm(const SpectralField& c, double beta) {
  const std::size_t n = c.n();
  double acc = 0.0;
  for (int k = 0; k < kComponents; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double w = beta == 0.0 ? 1.0 : std::pow(1.0 + c.space().lambda(i), 2.0 * beta);
      acc += w * c(k, i) * c(k, i);
    }
  return std::sqrt(acc);
}

double grad_norm_sq(const SpectralField& c) {
  const std::size_t n = c.n();
  double acc = 0.0;
  for (int k = 0; k < kComponents; ++k)
    for (std::size_t i = 0; i < n; ++i) acc += c.space().lambda(i) * c(k, i) * c(k, i);
  return acc;
}

double lap_norm_sq(const SpectralField& c) {
  const std::size_t n = c.n();
  double acc = 0.0;
  for (int k = 0; k < kComponents; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double l = c.space().lambda(i);
      acc += l * l * c(k, i) * c(k, i);
    }
  return acc;
}

double inner(const SpectralField& a, const SpectralField& b) {
  if (a.coeffs().size() != b.coeffs().size()) throw DimensionError("inner product of mismatched fields");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) acc += a.coeffs()[i] * b.coeffs()[i];
  return acc;
}

double quad_inner(const PhysicalField& a, const PhysicalField& b) {
  if (a.values().size() != b.values().size()) throw DimensionError("inner product of mismatched grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) acc += a.values()[i] * b.values()[i];
  return acc * a.space().weight();
}

double quad_integral_pow(const PhysicalField& f, double p) {
  double acc = 0.0;
  for (std::size_t g = 0; g < f.size(); ++g) {
    const double m = norm_sq(f.at(g));
    acc += p == 2.0 ? m : std::pow(m, 0.5 * p);
  }
  return acc * f.space().weight();
}

double lp_norm(const PhysicalField& f, double p) { return std::pow(quad_integral_pow(f, p), 1.0 / p); }

double linf_norm(const PhysicalField& f) {
  double m = 0.0;
  for (std::size_t g = 0; g < f.size(); ++g) m = std::max(m, norm_sq(f.at(g)));
  return std::sqrt(m);
}

SupNorms sup_norms(const SpectralField& c, int refine) {
  const Space& s = c.space();
  const int dim = s.dimension();
  std::array<int, 2> pts{1, 1};
  std::array<std::vector<double>, 2> val, der;
  for (int a = 0; a < 2; ++a) {
    const int nn = s.axis_modes(a);
    if (a < dim) {
      pts[a] = refine * s.axis_points(a) + 1;
      const double len = s.spec().lengths[a];
      val[a].resize(std::size_t(pts[a]) * nn);
      der[a].resize(std::size_t(pts[a]) * nn);
      for (int j = 0; j < pts[a]; ++j) {
        const double x = len * j / (pts[a] - 1);
        for (int k = 0; k < nn; ++k) {
          val[a][std::size_t(j) * nn + k] = eigenfunction_1d(k, len, x);
          der[a][std::size_t(j) * nn + k] = eigenfunction_1d_derivative(k, len, x);
        }
      }
    } else {
      val[a] = {1.0};
      der[a] = {0.0};
    }
  }
  const auto& modes = s.basis().modes;
  const std::size_t n = s.n();
  const int n1 = s.axis_modes(0), n2 = s.axis_modes(1);
  SupNorms out;
  for (int j1 = 0; j1 < pts[0]; ++j1)
    for (int j2 = 0; j2 < pts[1]; ++j2) {
      double v2 = 0.0, g2 = 0.0;
      for (int k = 0; k < kComponents; ++k) {
        double v = 0.0, dx = 0.0, dy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double a = val[0][std::size_t(j1) * n1 + modes[i][0]];
          const double b = val[1][std::size_t(j2) * n2 + modes[i][1]];
          v += c(k, i) * a * b;
          dx += c(k, i) * der[0][std::size_t(j1) * n1 + modes[i][0]] * b;
          if (dim == 2) dy += c(k, i) * a * der[1][std::size_t(j2) * n2 + modes[i][1]];
        }
        v2 += v * v;
        g2 += dx * dx + dy * dy;
      }
      out.value = std::max(out.value, std::sqrt(v2));
      out.gradient = std::max(out.gradient, std::sqrt(g2));
    }
  return out;
}

SpectralField transfer(const SpectralField& c, const SpacePtr& target) {
  const Space& src = c.space();
  if (src.dimension() != target->dimension() || src.spec().lengths != target->spec().lengths)
    throw DimensionError("transfer between different domains");
  SpectralField out(target);
  for (std::size_t i = 0; i < target->n(); ++i) {
    const std::size_t j = src.basis().find(target->basis().modes[i]);
    if (j == EigenBasis::npos) continue;
    for (int k = 0; k < kComponents; ++k) out(k, i) = c(k, j);
  }
  return out;
}

void require_dealiased(const Space& space, int degree) {
  if (!space.resolves_degree(degree))
    throw ConfigError("quadrature grid too small for a degree-" + std::to_string(degree) +
                      " nonlinearity; increase domain.quad_points");
}

}  // namespace sllb

#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "sllb/field.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline sllb::SpectralField random_field(const sllb::SpacePtr& space, std::mt19937_64& rng, double decay = 1.0) {
  std::normal_distribution<double> z;
  sllb::SpectralField u(space);
  for (int c = 0; c < sllb::kComponents; ++c)
    for (std::size_t i = 0; i < space->n(); ++i) u(c, i) = z(rng) * std::pow(1.0 + space->lambda(i), -0.5 * decay);
  return u;
}

inline double max_diff(const sllb::SpectralField& a, const sllb::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return m;
}

inline double max_abs(const sllb::SpectralField& a) {
  double m = 0.0;
  for (double v : a.coeffs()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testing

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sllb/domain.hpp"

namespace sllb {

inline constexpr int kComponents = 3;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int c) { return c == 0 ? x : (c == 1 ? y : z); }
  double operator[](int c) const { return c == 0 ? x : (c == 1 ? y : z); }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm_sq(const Vec3& a) { return dot(a, a); }

/// R^3-valued field stored as coefficients in the eigenbasis of its space,
/// component-major: coeffs[c * n + i].
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(SpacePtr space);
  SpectralField(SpacePtr space, std::vector<double> coeffs);

  /// Single-mode field: amplitude * e_mode in component c.
  static SpectralField mode(SpacePtr space, std::size_t mode, int component, double amplitude = 1.0);
  /// Spatially constant field with the given vector value.
  static SpectralField constant(SpacePtr space, const Vec3& value);

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t n() const { return space_ ? space_->n() : 0; }

  double& operator()(int c, std::size_t i) { return coeffs_[c * n() + i]; }
  double operator()(int c, std::size_t i) const { return coeffs_[c * n() + i]; }
  std::span<double> component(int c) { return {coeffs_.data() + c * n(), n()}; }
  std::span<const double> component(int c) const { return {coeffs_.data() + c * n(), n()}; }

  std::vector<double>& coeffs() { return coeffs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool all_finite() const;
  void set_zero();

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += a * x
  SpectralField& axpy(double a, const SpectralField& x);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField& o) const { return coeffs_ == o.coeffs_; }

 private:
  void check_compatible(const SpectralField& o) const;

  SpacePtr space_;
  std::vector<double> coeffs_;
};

/// Values on the quadrature grid, component-major: values[c * G + g].
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(SpacePtr space) : space_(std::move(space)), values_(kComponents * space_->grid_size(), 0.0) {}
  PhysicalField(SpacePtr space, std::vector<double> values);

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return space_ ? space_->grid_size() : 0; }

  double& operator()(int c, std::size_t g) { return values_[c * size() + g]; }
  double operator()(int c, std::size_t g) const { return values_[c * size() + g]; }
  Vec3 at(std::size_t g) const {
    const std::size_t m = size();
    return {values_[g], values_[m + g], values_[2 * m + g]};
  }
  void set(std::size_t g, const Vec3& v) {
    const std::size_t m = size();
    values_[g] = v.x;
    values_[m + g] = v.y;
    values_[2 * m + g] = v.z;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

}  // namespace sllb

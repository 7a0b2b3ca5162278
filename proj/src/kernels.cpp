#include "sllb/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "sllb/errors.hpp"

namespace sllb::kernels {

namespace {

void check_shapes(const Space& space, std::size_t ncoeffs, std::size_t nvalues, int ncomp) {
  if (ncomp < 1) throw DimensionError("component count must be positive");
  if (ncoeffs != std::size_t(ncomp) * space.n() || nvalues != std::size_t(ncomp) * space.grid_size())
    throw DimensionError("coefficient/grid buffer sizes do not match the space");
}

const std::vector<double>& axis_table(const Space& space, int axis, int deriv_axis) {
  return axis == deriv_axis ? space.deriv_table(axis) : space.synth_table(axis);
}

bool go_parallel(std::size_t work) { return work >= kParallelThreshold && !omp_in_parallel(); }

}  // namespace

void synthesize(const Space& space, std::span<const double> coeffs, std::span<double> values, int ncomp,
                int deriv_axis) {
  check_shapes(space, coeffs.size(), values.size(), ncomp);
  if (deriv_axis >= space.dimension()) throw DimensionError("derivative axis out of range");
  const std::size_t n = space.n();
  const long n1 = space.axis_modes(0), n2 = space.axis_modes(1);
  const long m1 = space.axis_points(0), m2 = space.axis_points(1);
  const double* s1 = axis_table(space, 0, deriv_axis).data();
  const double* s2 = axis_table(space, 1, deriv_axis).data();

  thread_local std::vector<double> tensor, partial;
  tensor.assign(std::size_t(ncomp) * n1 * n2, 0.0);
  partial.resize(std::size_t(ncomp) * m2 * n1);

  for (int c = 0; c < ncomp; ++c)
    for (std::size_t i = 0; i < n; ++i) tensor[c * n1 * n2 + space.tensor_slot(i)] = coeffs[c * n + i];

  const double* a = tensor.data();
  double* t = partial.data();
  // Contract axis 1: t[c][j2][k1] = sum_k2 s2[j2][k2] a[c][k1][k2]
  if (n2 == 1 && m2 == 1 && s2[0] == 1.0) {
    std::copy(tensor.begin(), tensor.end(), partial.begin());
  } else {
#pragma omp parallel for collapse(3) if (go_parallel(std::size_t(ncomp) * m2 * n1 * n2))
    for (int c = 0; c < ncomp; ++c)
      for (long j2 = 0; j2 < m2; ++j2)
        for (long k1 = 0; k1 < n1; ++k1) {
          const double* row = s2 + j2 * n2;
          const double* col = a + (c * n1 + k1) * n2;
          double acc = 0.0;
#pragma omp simd reduction(+ : acc)
          for (long k2 = 0; k2 < n2; ++k2) acc += row[k2] * col[k2];
          t[(c * m2 + j2) * n1 + k1] = acc;
        }
  }
  // Contract axis 0: v[c][j1][j2] = sum_k1 s1[j1][k1] t[c][j2][k1]
  double* v = values.data();
  const long grid = m1 * m2;
#pragma omp parallel for collapse(3) if (go_parallel(std::size_t(ncomp) * grid * n1))
  for (int c = 0; c < ncomp; ++c)
    for (long j1 = 0; j1 < m1; ++j1)
      for (long j2 = 0; j2 < m2; ++j2) {
        const double* row = s1 + j1 * n1;
        const double* col = t + (c * m2 + j2) * n1;
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (long k1 = 0; k1 < n1; ++k1) acc += row[k1] * col[k1];
        v[c * grid + j1 * m2 + j2] = acc;
      }
}

void analyze(const Space& space, std::span<const double> values, std::span<double> coeffs, int ncomp) {
  check_shapes(space, coeffs.size(), values.size(), ncomp);
  const std::size_t n = space.n();
  const long n1 = space.axis_modes(0), n2 = space.axis_modes(1);
  const long m1 = space.axis_points(0), m2 = space.axis_points(1);
  const double* w1 = space.analysis_table(0).data();
  const double* w2 = space.analysis_table(1).data();
  const long grid = m1 * m2;

  thread_local std::vector<double> partial, tensor;
  partial.resize(std::size_t(ncomp) * n2 * m1);
  tensor.resize(std::size_t(ncomp) * n1 * n2);
  const double* f = values.data();
  double* u = partial.data();
  // Contract axis 1: u[c][k2][j1] = sum_j2 w2[k2][j2] f[c][j1][j2]
  if (n2 == 1 && m2 == 1 && w2[0] == 1.0) {
    std::copy(values.begin(), values.end(), partial.begin());
  } else {
#pragma omp parallel for collapse(3) if (go_parallel(std::size_t(ncomp) * n2 * grid))
    for (int c = 0; c < ncomp; ++c)
      for (long k2 = 0; k2 < n2; ++k2)
        for (long j1 = 0; j1 < m1; ++j1) {
          const double* row = w2 + k2 * m2;
          const double* col = f + c * grid + j1 * m2;
          double acc = 0.0;
#pragma omp simd reduction(+ : acc)
          for (long j2 = 0; j2 < m2; ++j2) acc += row[j2] * col[j2];
          u[(c * n2 + k2) * m1 + j1] = acc;
        }
  }
  // Contract axis 0: a[c][k1][k2] = sum_j1 w1[k1][j1] u[c][k2][j1]
  double* a = tensor.data();
#pragma omp parallel for collapse(3) if (go_parallel(std::size_t(ncomp) * n1 * n2 * m1))
  for (int c = 0; c < ncomp; ++c)
    for (long k1 = 0; k1 < n1; ++k1)
      for (long k2 = 0; k2 < n2; ++k2) {
        const double* row = w1 + k1 * m1;
        const double* col = u + (c * n2 + k2) * m1;
        double acc = 0.0;
#pragma omp simd reduction(+ : acc)
        for (long j1 = 0; j1 < m1; ++j1) acc += row[j1] * col[j1];
        a[(c * n1 + k1) * n2 + k2] = acc;
      }
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t i = 0; i < n; ++i) coeffs[c * n + i] = tensor[c * n1 * n2 + space.tensor_slot(i)];
}

namespace reference {

void synthesize(const Space& space, std::span<const double> coeffs, std::span<double> values, int ncomp,
                int deriv_axis) {
  check_shapes(space, coeffs.size(), values.size(), ncomp);
  if (deriv_axis >= space.dimension()) throw DimensionError("derivative axis out of range");
  const std::size_t n = space.n(), grid = space.grid_size();
  const std::size_t n1 = space.axis_modes(0), n2 = space.axis_modes(1), m2 = space.axis_points(1);
  const auto& s1 = axis_table(space, 0, deriv_axis);
  const auto& s2 = axis_table(space, 1, deriv_axis);
  const auto& modes = space.basis().modes;
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t g = 0; g < grid; ++g) {
      const std::size_t j1 = g / m2, j2 = g % m2;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += coeffs[c * n + i] * s1[j1 * n1 + modes[i][0]] * s2[j2 * n2 + modes[i][1]];
      values[c * grid + g] = acc;
    }
}

void analyze(const Space& space, std::span<const double> values, std::span<double> coeffs, int ncomp) {
  check_shapes(space, coeffs.size(), values.size(), ncomp);
  const std::size_t n = space.n(), grid = space.grid_size();
  const std::size_t m1 = space.axis_points(0), m2 = space.axis_points(1);
  const auto& w1 = space.analysis_table(0);
  const auto& w2 = space.analysis_table(1);
  const auto& modes = space.basis().modes;
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t g = 0; g < grid; ++g) {
        const std::size_t j1 = g / m2, j2 = g % m2;
        acc += values[c * grid + g] * w1[modes[i][0] * m1 + j1] * w2[modes[i][1] * m2 + j2];
      }
      coeffs[c * n + i] = acc;
    }
}

}  // namespace reference

}  // namespace sllb::kernels

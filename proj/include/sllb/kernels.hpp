#pragma once

// Transform kernels between flat eigen-coefficients and the quadrature grid.
//
// The default kernels apply the separable tensor factorisation with OpenMP
// over output rows. `reference` holds the straightforward serial
// double sum over (mode, grid point) and exists for tests and benchmarks.
//
// Layouts: coefficients are `ncomp` blocks of n flat coefficients, grid
// values are `ncomp` blocks of grid_size() values.

#include <cstddef>
#include <span>

#include "sllb/domain.hpp"

namespace sllb::kernels {

/// Sentinel for "no derivative" in synthesize.
inline constexpr int kNoDerivative = -1;

/// values = sum_i coeffs_i * e_i(x_g), or the partial derivative along
/// `deriv_axis` of that sum when deriv_axis >= 0.
void synthesize(const Space& space, std::span<const double> coeffs, std::span<double> values, int ncomp,
                int deriv_axis = kNoDerivative);

/// coeffs_i = sum_g w * values_g * e_i(x_g)  (quadrature L2 projection).
void analyze(const Space& space, std::span<const double> values, std::span<double> coeffs, int ncomp);

namespace reference {

void synthesize(const Space& space, std::span<const double> coeffs, std::span<double> values, int ncomp,
                int deriv_axis = kNoDerivative);
void analyze(const Space& space, std::span<const double> values, std::span<double> coeffs, int ncomp);

}  // namespace reference

/// Work threshold (multiply-adds) below which kernels stay single-threaded.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

}  // namespace sllb::kernels

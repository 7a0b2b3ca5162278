#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sllb/errors.hpp"
#include "sllb/field.hpp"
#include "sllb/kernels.hpp"

namespace sllb {

/// Grid values of a spectral field.
PhysicalField synthesize(const SpectralField& c);
/// Quadrature projection of grid values onto S_n.
SpectralField analyze(const PhysicalField& f);

/// Partial derivatives d/dx_a of the field on the grid, one per spatial axis.
std::vector<PhysicalField> gradient(const SpectralField& c);

SpectralField laplacian(const SpectralField& c);

/// ||(I + A)^beta u||_{L2} with A the Neumann Laplacian.
double sobolev_norm(const SpectralField& c, double beta);
/// ||grad u||^2 = sum lambda_i c_i^2.
double grad_norm_sq(const SpectralField& c);
/// ||Laplacian u||^2 = sum lambda_i^2 c_i^2.
double lap_norm_sq(const SpectralField& c);
/// L2 inner product by Parseval.
double inner(const SpectralField& a, const SpectralField& b);
inline double l2_norm(const SpectralField& c) { return sobolev_norm(c, 0.0); }
inline double h1_norm(const SpectralField& c) { return sobolev_norm(c, 0.5); }
inline double h2_norm(const SpectralField& c) { return sobolev_norm(c, 1.0); }

/// Quadrature L2 inner product of grid fields.
double quad_inner(const PhysicalField& a, const PhysicalField& b);
/// Quadrature integral of |f|^p over the domain.
double quad_integral_pow(const PhysicalField& f, double p);
/// (int |f|^p)^(1/p) by quadrature.
double lp_norm(const PhysicalField& f, double p);
/// Max over grid points of the Euclidean norm |f(x)|.
double linf_norm(const PhysicalField& f);

/// Sup norms of a field and of its Jacobian (Frobenius) on an oversampled
/// grid that includes the domain boundary; `refine` scales the point count
/// of the quadrature grid.
struct SupNorms {
  double value = 0.0;
  double gradient = 0.0;
};
SupNorms sup_norms(const SpectralField& c, int refine = 4);

/// Projection of a field onto another truncation of the same box, matching
/// coefficients by multi-index (padding with zeros or truncating).
SpectralField transfer(const SpectralField& c, const SpacePtr& target);

/// Fails with ConfigError if the grid cannot integrate a degree-`degree`
/// pointwise nonlinearity exactly against S_n.
void require_dealiased(const Space& space, int degree);

/// Synthesize the inputs, apply `op` (Vec3... -> Vec3) pointwise, analyze.
/// For polynomial op of total degree <= `degree` the result is the exact
/// L2 projection Pi_n(op(...)).
template <class Op, class... Fields>
SpectralField dealiased_pointwise(int degree, Op&& op, const SpectralField& first, const Fields&... rest) {
  const auto& space = first.space_ptr();
  if (((rest.space_ptr().get() != space.get() && !(rest.space().spec() == space->spec())) || ...))
    throw DimensionError("dealiased_pointwise inputs live on different spaces");
  require_dealiased(*space, degree);
  std::array<PhysicalField, 1 + sizeof...(Fields)> grids{synthesize(first), synthesize(rest)...};
  PhysicalField out(space);
  const std::size_t g_count = space->grid_size();
  for (std::size_t g = 0; g < g_count; ++g) {
    out.set(g, [&]<std::size_t... I>(std::index_sequence<I...>) {
      return op(grids[I].at(g)...);
    }(std::make_index_sequence<1 + sizeof...(Fields)>{}));
  }
  return analyze(out);
}

}  // namespace sllb

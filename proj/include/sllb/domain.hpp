#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <vector>

namespace sllb {

using MultiIndex = std::array<int, 2>;

/// Box domain (0,L1) or (0,L1)x(0,L2) with a per-axis cosine truncation and
/// a per-axis midpoint quadrature grid used for nonlinear evaluation.
struct DomainSpec {
  int dimension = 1;
  std::array<double, 2> lengths{1.0, 1.0};
  std::array<int, 2> n_modes{1, 1};
  std::array<int, 2> quad_points{3, 1};

  /// Unit interval / unit square with N modes per axis and the minimal
  /// dealiasing grid 2N+1.
  static DomainSpec interval(int n, double length = 1.0);
  static DomainSpec rectangle(int n1, int n2, double l1 = 1.0, double l2 = 1.0);

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  std::size_t total_modes() const;
  std::size_t total_points() const;

  bool operator==(const DomainSpec&) const = default;
};

/// Neumann-Laplacian eigenpairs of the box, sorted by eigenvalue with ties
/// broken lexicographically on the multi-index.
struct EigenBasis {
  std::vector<double> eigenvalues;
  std::vector<MultiIndex> modes;
  std::map<MultiIndex, std::size_t> flat_of;

  std::size_t size() const { return eigenvalues.size(); }
  /// Flat index of a multi-index, or npos when it is not in the truncation.
  std::size_t find(const MultiIndex& k) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

EigenBasis build_basis(const DomainSpec& spec);

/// The Galerkin space S_n together with everything needed to move between
/// coefficients and the quadrature grid. Immutable once built; shared
/// read-only between fields and across threads.
class Space {
 public:
  explicit Space(const DomainSpec& spec);
  static std::shared_ptr<const Space> make(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  const EigenBasis& basis() const { return basis_; }
  int dimension() const { return spec_.dimension; }
  std::size_t n() const { return basis_.size(); }
  std::size_t grid_size() const { return grid_size_; }
  double lambda(std::size_t i) const { return basis_.eigenvalues[i]; }
  double lambda_max() const { return basis_.eigenvalues.back(); }

  /// Per-axis modes / points (axis 1 is trivial in 1D: one mode, one point).
  int axis_modes(int a) const { return axis_n_[a]; }
  int axis_points(int a) const { return axis_m_[a]; }

  /// Flat mode i -> position in the row-major N1 x N2 tensor layout.
  std::size_t tensor_slot(std::size_t i) const { return tensor_slot_[i]; }

  /// Row-major [M_a x N_a] tables of eigenfunction values and derivatives at
  /// the grid points of axis a, and the analysis table [N_a x M_a] with the
  /// quadrature weight folded in.
  const std::vector<double>& synth_table(int a) const { return synth_[a]; }
  const std::vector<double>& deriv_table(int a) const { return deriv_[a]; }
  const std::vector<double>& analysis_table(int a) const { return analysis_[a]; }

  /// Quadrature weight of a single grid point (product over axes).
  double weight() const { return weight_; }
  /// Physical coordinate of grid point g along axis a.
  double coordinate(std::size_t g, int a) const;

  /// Highest trigonometric degree (in units of the fundamental per axis) the
  /// grid integrates exactly.
  bool resolves_degree(int polynomial_degree) const;

 private:
  DomainSpec spec_;
  EigenBasis basis_;
  std::array<int, 2> axis_n_{};
  std::array<int, 2> axis_m_{};
  std::size_t grid_size_ = 0;
  double weight_ = 1.0;
  std::vector<std::size_t> tensor_slot_;
  std::array<std::vector<double>, 2> synth_;
  std::array<std::vector<double>, 2> deriv_;
  std::array<std::vector<double>, 2> analysis_;
  std::array<std::vector<double>, 2> nodes_;
};

using SpacePtr = std::shared_ptr<const Space>;

/// 1D eigenfunction of (0,L): 1/sqrt(L) for k = 0, sqrt(2/L) cos(k pi x / L) otherwise.
double eigenfunction_1d(int k, double length, double x);
double eigenfunction_1d_derivative(int k, double length, double x);

}  // namespace sllb

#include "sllb/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sllb/errors.hpp"

namespace sllb {

namespace {
constexpr double pi = std::numbers::pi;
}

DomainSpec DomainSpec::interval(int n, double length) {
  DomainSpec s;
  s.dimension = 1;
  s.lengths = {length, 1.0};
  s.n_modes = {n, 1};
  s.quad_points = {2 * n + 1, 1};
  return s;
}

DomainSpec DomainSpec::rectangle(int n1, int n2, double l1, double l2) {
  DomainSpec s;
  s.dimension = 2;
  s.lengths = {l1, l2};
  s.n_modes = {n1, n2};
  s.quad_points = {2 * n1 + 1, 2 * n2 + 1};
  return s;
}

void DomainSpec::validate() const {
  if (dimension == 3) throw UnsupportedError("three-dimensional domains are not supported");
  if (dimension != 1 && dimension != 2)
    throw ConfigError("domain.dimension must be 1 or 2, got " + std::to_string(dimension));
  for (int a = 0; a < dimension; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw ConfigError("domain.lengths must be positive");
    if (n_modes[a] < 1) throw ConfigError("domain.n_modes must be >= 1 per axis");
    if (quad_points[a] < 2 * n_modes[a] + 1)
      throw ConfigError("domain.quad_points must be >= 2*n_modes+1 per axis (cubic dealiasing), axis " +
                        std::to_string(a) + " has " + std::to_string(quad_points[a]) + " < " +
                        std::to_string(2 * n_modes[a] + 1));
  }
}

std::size_t DomainSpec::total_modes() const {
  return dimension == 1 ? std::size_t(n_modes[0]) : std::size_t(n_modes[0]) * std::size_t(n_modes[1]);
}

std::size_t DomainSpec::total_points() const {
  return dimension == 1 ? std::size_t(quad_points[0])
                        : std::size_t(quad_points[0]) * std::size_t(quad_points[1]);
}

std::size_t EigenBasis::find(const MultiIndex& k) const {
  auto it = flat_of.find(k);
  return it == flat_of.end() ? npos : it->second;
}

EigenBasis build_basis(const DomainSpec& spec) {
  spec.validate();
  const int n2 = spec.dimension == 2 ? spec.n_modes[1] : 1;
  struct Entry {
    double lambda;
    MultiIndex k;
  };
  std::vector<Entry> entries;
  entries.reserve(spec.total_modes());
  for (int k1 = 0; k1 < spec.n_modes[0]; ++k1) {
    for (int k2 = 0; k2 < n2; ++k2) {
      const double a = k1 / spec.lengths[0];
      const double b = spec.dimension == 2 ? k2 / spec.lengths[1] : 0.0;
      entries.push_back({pi * pi * (a * a + b * b), {k1, k2}});
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return x.k < y.k;
  });
  EigenBasis basis;
  for (const auto& e : entries) {
    basis.flat_of.emplace(e.k, basis.eigenvalues.size());
    basis.eigenvalues.push_back(e.lambda);
    basis.modes.push_back(e.k);
  }
  return basis;
}

double eigenfunction_1d(int k, double length, double x) {
  if (k == 0) return 1.0 / std::sqrt(length);
  return std::sqrt(2.0 / length) * std::cos(k * pi * x / length);
}

double eigenfunction_1d_derivative(int k, double length, double x) {
  if (k == 0) return 0.0;
  const double w = k * pi / length;
  return -std::sqrt(2.0 / length) * w * std::sin(w * x);
}

Space::Space(const DomainSpec& spec) : spec_(spec), basis_(build_basis(spec)) {
  for (int a = 0; a < 2; ++a) {
    const bool active = a < spec_.dimension;
    axis_n_[a] = active ? spec_.n_modes[a] : 1;
    axis_m_[a] = active ? spec_.quad_points[a] : 1;
    const int nn = axis_n_[a];
    const int mm = axis_m_[a];
    synth_[a].assign(std::size_t(nn) * mm, 0.0);
    deriv_[a].assign(std::size_t(nn) * mm, 0.0);
    analysis_[a].assign(std::size_t(mm) * nn, 0.0);
    nodes_[a].assign(mm, 0.0);
    if (!active) {
      // Trivial axis: a single constant "mode" of value 1 with unit weight.
      synth_[a][0] = 1.0;
      analysis_[a][0] = 1.0;
      continue;
    }
    const double len = spec_.lengths[a];
    const double w = len / mm;
    for (int j = 0; j < mm; ++j) {
      const double x = (j + 0.5) * w;
      nodes_[a][j] = x;
      for (int k = 0; k < nn; ++k) {
        const double v = eigenfunction_1d(k, len, x);
        synth_[a][std::size_t(j) * nn + k] = v;
        deriv_[a][std::size_t(j) * nn + k] = eigenfunction_1d_derivative(k, len, x);
        analysis_[a][std::size_t(k) * mm + j] = w * v;
      }
    }
  }
  grid_size_ = std::size_t(axis_m_[0]) * axis_m_[1];
  weight_ = 1.0;
  for (int a = 0; a < spec_.dimension; ++a) weight_ *= spec_.lengths[a] / spec_.quad_points[a];
  tensor_slot_.resize(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const auto& k = basis_.modes[i];
    tensor_slot_[i] = std::size_t(k[0]) * axis_n_[1] + std::size_t(k[1]);
  }
}

std::shared_ptr<const Space> Space::make(const DomainSpec& spec) { return std::make_shared<const Space>(spec); }

double Space::coordinate(std::size_t g, int a) const {
  const std::size_t m1 = axis_m_[1];
  const std::size_t j = a == 0 ? g / m1 : g % m1;
  return nodes_[a][j];
}

bool Space::resolves_degree(int polynomial_degree) const {
  // Midpoint rule on M points integrates cos(m pi x/L) exactly for m < 2M.
  // A degree-q product of fields of max wavenumber N-1, tested against one
  // more basis function, has wavenumber (q+1)(N-1).
  for (int a = 0; a < spec_.dimension; ++a) {
    const long top = long(polynomial_degree + 1) * (axis_n_[a] - 1);
    if (top >= 2L * axis_m_[a]) return false;
  }
  return true;
}

}  // namespace sllb

#include <doctest.h>

#include "helpers.hpp"
#include "sllb/errors.hpp"
#include "sllb/kernels.hpp"
#include "sllb/spectral.hpp"

using namespace sllb;
using testing::kPi;

namespace {

PhysicalField sample(const SpacePtr& space, auto&& f) {
  PhysicalField out(space);
  for (std::size_t g = 0; g < space->grid_size(); ++g) {
    const double x = space->coordinate(g, 0);
    const double y = space->dimension() == 2 ? space->coordinate(g, 1) : 0.0;
    out.set(g, f(x, y));
  }
  return out;
}

}  // namespace

TEST_SUITE("spectral_core") {

TEST_CASE("eigenvalues of the Neumann interval and square") {
  const Space a(DomainSpec::interval(4));
  REQUIRE(a.n() == 4);
  CHECK(a.lambda(0) == 0.0);
  CHECK(a.lambda(1) == doctest::Approx(kPi * kPi));
  CHECK(a.lambda(2) == doctest::Approx(4 * kPi * kPi));
  CHECK(a.lambda(3) == doctest::Approx(9 * kPi * kPi));

  const Space b(DomainSpec::rectangle(2, 2));
  REQUIRE(b.n() == 4);
  CHECK(b.lambda(0) == 0.0);
  CHECK(b.lambda(1) == doctest::Approx(kPi * kPi));
  CHECK(b.lambda(2) == doctest::Approx(kPi * kPi));
  CHECK(b.lambda(3) == doctest::Approx(2 * kPi * kPi));
  CHECK(b.basis().modes[1] == MultiIndex{0, 1});
  CHECK(b.basis().modes[2] == MultiIndex{1, 0});

  const Space c(DomainSpec::interval(2, 2.0));
  CHECK(c.lambda(1) == doctest::Approx(kPi * kPi / 4));
}

TEST_CASE("eigenvalues are sorted and the lookup is consistent") {
  const Space s(DomainSpec::rectangle(5, 3, 1.0, 0.7));
  for (std::size_t i = 1; i < s.n(); ++i) CHECK(s.lambda(i) >= s.lambda(i - 1));
  for (std::size_t i = 0; i < s.n(); ++i) CHECK(s.basis().find(s.basis().modes[i]) == i);
  CHECK(s.basis().find({7, 0}) == EigenBasis::npos);
}

TEST_CASE("invalid domains are rejected") {
  DomainSpec d = DomainSpec::interval(4);
  d.quad_points[0] = 8;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = DomainSpec::interval(4);
  d.dimension = 3;
  CHECK_THROWS_AS(d.validate(), UnsupportedError);
  d = DomainSpec::interval(4);
  d.lengths[0] = 0.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = DomainSpec::interval(0);
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("eigenfunctions are orthonormal under quadrature and satisfy Neumann conditions") {
  const auto space = Space::make(DomainSpec::rectangle(4, 3, 1.0, 2.0));
  for (std::size_t i = 0; i < space->n(); ++i) {
    const PhysicalField ei = synthesize(SpectralField::mode(space, i, 0));
    for (std::size_t j = 0; j < space->n(); ++j) {
      const PhysicalField ej = synthesize(SpectralField::mode(space, j, 0));
      CHECK(quad_inner(ei, ej) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(eigenfunction_1d_derivative(k, 1.5, 0.0)) < 1e-12);
    CHECK(std::abs(eigenfunction_1d_derivative(k, 1.5, 1.5)) < 1e-12);
    const double h = 1e-6;
    const double one_sided = (eigenfunction_1d(k, 1.5, h) - eigenfunction_1d(k, 1.5, 0.0)) / h;
    CHECK(std::abs(one_sided) < 1e-4);
  }
  CHECK(eigenfunction_1d(0, 1.0, 0.3) == doctest::Approx(1.0));
  CHECK(eigenfunction_1d(2, 1.0, 0.3) == doctest::Approx(std::sqrt(2.0) * std::cos(2 * kPi * 0.3)));
}

TEST_CASE("analyze and synthesize") {
  const auto space = Space::make(DomainSpec::interval(4));
  SpectralField zero(space);
  CHECK(analyze(synthesize(zero)) == zero);

  const SpectralField c1 = analyze(sample(space, [](double x, double) { return Vec3{std::cos(kPi * x), 0, 0}; }));
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(c1(c, i) == doctest::Approx(c == 0 && i == 1 ? 1.0 / std::sqrt(2.0) : 0.0).scale(1.0).epsilon(1e-14));

  const SpectralField c5 = analyze(sample(space, [](double x, double) { return Vec3{std::cos(5 * kPi * x), 0, 0}; }));
  CHECK(testing::max_abs(c5) < 1e-14);

  std::mt19937_64 rng(3);
  const auto sq = Space::make(DomainSpec::rectangle(6, 5, 1.0, 0.5));
  const SpectralField u = testing::random_field(sq, rng);
  CHECK(testing::max_diff(analyze(synthesize(u)), u) < 1e-13);
}

TEST_CASE("laplacian, Sobolev norms and gradient norms") {
  const auto space = Space::make(DomainSpec::interval(4));
  const SpectralField e0 = SpectralField::mode(space, 0, 0);
  const SpectralField e1 = SpectralField::mode(space, 1, 0);
  CHECK(testing::max_abs(laplacian(e0)) == 0.0);
  CHECK(laplacian(e1)(0, 1) == doctest::Approx(-kPi * kPi));
  CHECK(laplacian((1 / std::sqrt(2.0)) * e1)(0, 1) == doctest::Approx(-kPi * kPi / std::sqrt(2.0)));

  CHECK(sobolev_norm(e1, 0.5) == doctest::Approx(std::sqrt(1 + kPi * kPi)));
  CHECK(sobolev_norm(e1, 0.5) == doctest::Approx(3.2969).epsilon(1e-4));
  CHECK(sobolev_norm(SpectralField(space), 0.7) == 0.0);
  const SpectralField mix = e0 + SpectralField::mode(space, 1, 1);
  CHECK(sobolev_norm(mix, 1.0) == doctest::Approx(std::sqrt(1 + std::pow(1 + kPi * kPi, 2))));
  CHECK(sobolev_norm(mix, 1.0) == doctest::Approx(10.916).epsilon(1e-4));
  // Graph-norm expansion ||u||^2 + 2||grad u||^2 + ||Lap u||^2 by quadrature.
  double grad_q = 0.0;
  for (const auto& d : gradient(mix)) grad_q += quad_inner(d, d);
  const PhysicalField lap = synthesize(laplacian(mix));
  const PhysicalField val = synthesize(mix);
  CHECK(quad_inner(val, val) + 2 * grad_q + quad_inner(lap, lap) ==
        doctest::Approx(std::pow(sobolev_norm(mix, 1.0), 2)).epsilon(1e-12));

  CHECK(grad_norm_sq(e0) == 0.0);
  CHECK(grad_norm_sq(e1) == doctest::Approx(kPi * kPi));
  CHECK(grad_norm_sq((1 / std::sqrt(2.0)) * e1) == doctest::Approx(kPi * kPi / 2));
  CHECK(lap_norm_sq(e1) == doctest::Approx(std::pow(kPi, 4)));
}

TEST_CASE("two-dimensional eigenfunction relation") {
  const auto space = Space::make(DomainSpec::rectangle(3, 3));
  const std::size_t i = space->basis().find({1, 1});
  const SpectralField e = SpectralField::mode(space, i, 2);
  CHECK(laplacian(e)(2, i) == doctest::Approx(-2 * kPi * kPi));
  const auto g = gradient(e);
  REQUIRE(g.size() == 2);
  double q = quad_inner(g[0], g[0]) + quad_inner(g[1], g[1]);
  CHECK(q == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("pointwise evaluation with dealiasing") {
  const auto space = Space::make(DomainSpec::interval(6));
  std::mt19937_64 rng(5);
  const SpectralField u = testing::random_field(space, rng);
  CHECK(testing::max_diff(dealiased_pointwise(1, [](const Vec3& a) { return a; }, u), u) < 1e-13);

  const SpectralField c = SpectralField::constant(space, {2, 0, 0});
  const SpectralField cube = dealiased_pointwise(3, [](const Vec3& a) { return norm_sq(a) * a; }, c);
  const SpectralField expect = SpectralField::constant(space, {8, 0, 0});
  CHECK(testing::max_diff(cube, expect) < 1e-12);

  CHECK_THROWS_AS(dealiased_pointwise(5, [](const Vec3& a) { return a; }, u), ConfigError);
}

TEST_CASE("projection contraction, Parseval, idempotence and self-adjointness") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (const DomainSpec& spec : {DomainSpec::interval(8), DomainSpec::rectangle(5, 4)}) {
    const auto space = Space::make(spec);
    for (int trial = 0; trial < 20; ++trial) {
      PhysicalField f(space), g(space);
      for (auto& v : f.values()) v = z(rng);
      for (auto& v : g.values()) v = z(rng);
      const SpectralField pf = analyze(f);
      CHECK(l2_norm(pf) <= std::sqrt(quad_inner(f, f)) * (1 + 1e-10));
      const SpectralField again = analyze(synthesize(pf));
      CHECK(testing::max_diff(again, pf) < 1e-12 * (1 + testing::max_abs(pf)));
      const double lhs = quad_inner(synthesize(pf), g);
      const double rhs = quad_inner(f, synthesize(analyze(g)));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      const SpectralField u = testing::random_field(space, rng);
      const PhysicalField ug = synthesize(u);
      CHECK(std::pow(l2_norm(u), 2) == doctest::Approx(quad_inner(ug, ug)).epsilon(1e-10));
    }
  }
}

TEST_CASE("gradient contraction of the projection") {
  std::mt19937_64 rng(12);
  DomainSpec big_spec = DomainSpec::interval(10);
  DomainSpec small_spec = DomainSpec::interval(4);
  small_spec.quad_points[0] = big_spec.quad_points[0];
  const auto big = Space::make(big_spec);
  const auto small = Space::make(small_spec);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f = testing::random_field(big, rng, 0.0);
    const PhysicalField fg = synthesize(f);
    const PhysicalField on_small(small, fg.values());
    const SpectralField pf = analyze(on_small);
    CHECK(testing::max_diff(pf, transfer(f, small)) < 1e-12);
    double grad_f = 0.0;
    for (const auto& d : gradient(f)) grad_f += quad_inner(d, d);
    CHECK(grad_norm_sq(pf) <= grad_f * (1 + 1e-12));
  }
}

TEST_CASE("tensor kernels agree with the serial reference") {
  std::mt19937_64 rng(21);
  for (const DomainSpec& spec :
       {DomainSpec::interval(17), DomainSpec::rectangle(7, 5, 1.0, 3.0), DomainSpec::rectangle(40, 40)}) {
    const Space space(spec);
    const std::size_t n = space.n(), m = space.grid_size();
    std::normal_distribution<double> z;
    std::vector<double> c(3 * n), v(3 * m), a(3 * m), b(3 * m), ca(3 * n), cb(3 * n);
    for (auto& x : c) x = z(rng);
    for (auto& x : v) x = z(rng);
    for (int axis = -1; axis < spec.dimension; ++axis) {
      kernels::synthesize(space, c, a, 3, axis);
      kernels::reference::synthesize(space, c, b, 3, axis);
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        err = std::max(err, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
      }
      CHECK(err <= 1e-12 * scale);
    }
    kernels::analyze(space, v, ca, 3);
    kernels::reference::analyze(space, v, cb, 3);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      err = std::max(err, std::abs(ca[i] - cb[i]));
      scale = std::max(scale, std::abs(cb[i]));
    }
    CHECK(err <= 1e-12 * scale);
  }
}

TEST_CASE("transfer between truncations") {
  std::mt19937_64 rng(4);
  const auto a = Space::make(DomainSpec::rectangle(4, 4));
  const auto b = Space::make(DomainSpec::rectangle(8, 8));
  const SpectralField u = testing::random_field(a, rng);
  const SpectralField up = transfer(u, b);
  CHECK(l2_norm(up) == doctest::Approx(l2_norm(u)));
  CHECK(transfer(up, a) == u);
  CHECK_THROWS_AS(transfer(u, Space::make(DomainSpec::interval(4))), DimensionError);
}

TEST_CASE("sup norms of a single mode") {
  const auto space = Space::make(DomainSpec::interval(4));
  const SupNorms s = sup_norms(SpectralField::mode(space, 1, 0));
  CHECK(s.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.gradient == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-12));
  CHECK(linf_norm(synthesize(SpectralField::constant(space, {3, 4, 0}))) == doctest::Approx(5.0));
}

TEST_CASE("fields on different spaces do not mix") {
  const auto a = Space::make(DomainSpec::interval(4));
  const auto b = Space::make(DomainSpec::interval(5));
  SpectralField u(a);
  CHECK_THROWS_AS(u += SpectralField(b), DimensionError);
  CHECK_THROWS_AS(SpectralField(a, std::vector<double>(5)), DimensionError);
  CHECK_THROWS_AS(SpectralField::mode(a, 9, 0), IndexError);
}

}  // TEST_SUITE

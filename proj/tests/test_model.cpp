#include <doctest.h>

#include "helpers.hpp"
#include "sllb/errors.hpp"
#include "sllb/model.hpp"
#include "sllb/spectral.hpp"

using namespace sllb;
using testing::kPi;

namespace {

ModelParams unit_params() { return ModelParams{}; }

// Constant noise field b e_z on the unit interval.
NoiseBasis constant_z_noise(const SpacePtr& space, double b) {
  return NoiseBasis(space, {SpectralField::constant(space, {0, 0, b})});
}

}  // namespace

TEST_SUITE("llb_model") {

TEST_CASE("parameter derivation above the Curie temperature") {
  const ModelParams a = derive_params(2, 1, 0.5, 1, 1);
  CHECK(a.kappa2 == doctest::Approx(2.0));
  CHECK(a.mu == doctest::Approx(1.2));
  REQUIRE(a.raw);
  const ModelParams b = derive_params(4, 2, 1, 3, 1);
  CHECK(b.kappa2 == doctest::Approx(3.0));
  CHECK(b.mu == doctest::Approx(1.2));
  CHECK_THROWS_AS(derive_params(1, 2, 1, 1, 1), RegimeError);
  CHECK_THROWS_AS(derive_params(2, 2, 1, 1, 1), RegimeError);
  CHECK_NOTHROW(a.validate());
  ModelParams bad = a;
  bad.mu = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("coefficients must be positive unless degenerate dynamics are requested") {
  ModelParams p;
  p.kappa2 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_NOTHROW(p.validate(true));
  p.kappa1 = 0.0;
  CHECK_THROWS_AS(p.validate(true), ConfigError);
  p = ModelParams{};
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(true), ConfigError);
}

TEST_CASE("cross term") {
  const auto space = Space::make(DomainSpec::interval(4));
  CHECK(testing::max_abs(f2_cross_term(SpectralField::constant(space, {1, 2, 3}))) < 1e-13);
  SpectralField u(space);
  u(0, 1) = 1 / std::sqrt(2.0);  // cos(pi x) e_x
  CHECK(testing::max_abs(f2_cross_term(u)) < 1e-12);
  u(1, 2) = 1 / std::sqrt(2.0);  // + cos(2 pi x) e_y
  const SpectralField f = f2_cross_term(u);
  const double expect = -3 * kPi * kPi / (2 * std::sqrt(2.0));
  CHECK(expect == doctest::Approx(-10.4683).epsilon(1e-5));
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 4; ++i) {
      const double want = (c == 2 && (i == 1 || i == 3)) ? expect : 0.0;
      CHECK(f(c, i) == doctest::Approx(want).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cubic term") {
  const auto space = Space::make(DomainSpec::interval(4));
  const SpectralField f = f3_cubic_term(SpectralField::constant(space, {2, 0, 0}), 0.5);
  CHECK(testing::max_diff(f, SpectralField::constant(space, {6, 0, 0})) < 1e-12);
  CHECK(testing::max_abs(f3_cubic_term(SpectralField(space), 1.0)) == 0.0);
  const SpectralField g = f3_cubic_term(SpectralField::mode(space, 1, 0), 1.0);
  CHECK(g(0, 1) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(g(0, 3) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(g(0, 0)) < 1e-13);
  CHECK(std::abs(g(0, 2)) < 1e-13);
}

TEST_CASE("noise operator") {
  const auto space = Space::make(DomainSpec::interval(4));
  ModelParams p;
  p.gamma = 1.7;
  p.kappa1 = 0.6;
  const double b = 0.3, c = 1.4;
  const NoiseBasis nb = constant_z_noise(space, b);
  const SpectralField g0 = noise_operator(SpectralField(space), 0, nb, p);
  CHECK(testing::max_diff(g0, p.kappa1 * nb.field(0)) < 1e-14);
  const SpectralField g = noise_operator(SpectralField::constant(space, {c, 0, 0}), 0, nb, p);
  CHECK(testing::max_diff(g, SpectralField::constant(space, {0, -p.gamma * c * b, p.kappa1 * b})) < 1e-13);
  CHECK_THROWS_AS(noise_operator(SpectralField(space), 1, nb, p), IndexError);
}

TEST_CASE("orthogonality of the gyromagnetic part of the noise") {
  std::mt19937_64 rng(8);
  const auto space = Space::make(DomainSpec::rectangle(6, 6));
  const NoiseBasis nb = build_default_noise(space, 8);
  const ModelParams p = unit_params();
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralField u = testing::random_field(space, rng);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double lhs = inner(u, noise_operator(u, k, nb, p));
      const double rhs = p.kappa1 * inner(u, nb.field(k));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * l2_norm(u) * l2_norm(nb.field(k)));
    }
  }
}

TEST_CASE("Stratonovich correction") {
  const auto space = Space::make(DomainSpec::interval(4));
  ModelParams p;
  p.gamma = 1.3;
  const double b = 0.7, c = 0.9;
  const NoiseBasis nb = constant_z_noise(space, b);
  CHECK(testing::max_abs(strat_correction(SpectralField(space), nb, p)) < 1e-15);
  const SpectralField u = SpectralField::constant(space, {c, 0, 0});
  const SpectralField s = strat_correction(u, nb, p);
  CHECK(testing::max_diff(s, SpectralField::constant(space, {-p.gamma * p.gamma * c * b * b / 2, 0, 0})) < 1e-13);
  CHECK(testing::max_abs(strat_correction(u, NoiseBasis(space, {}), p)) == 0.0);

  ModelParams no_gamma = p;
  no_gamma.strat_gamma = false;
  const SpectralField s2 = strat_correction(u, nb, no_gamma);
  CHECK(testing::max_diff(s2, SpectralField::constant(space, {-p.gamma * c * b * b / 2, 0, 0})) < 1e-13);
}

TEST_CASE("Stratonovich correction equals the directional derivative of G along G") {
  std::mt19937_64 rng(9);
  const auto space = Space::make(DomainSpec::interval(8));
  const NoiseBasis nb = build_default_noise(space, 5, 0.5, 2.0);
  ModelParams p;
  p.gamma = 0.8;
  p.kappa1 = 1.3;
  const SpectralField u = testing::random_field(space, rng);
  SpectralField fd(space);
  const double eps = 1e-3;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const SpectralField g = noise_operator(u, k, nb, p);
    SpectralField plus = noise_operator(u + eps * g, k, nb, p);
    plus -= noise_operator(u - eps * g, k, nb, p);
    fd.axpy(0.5 / (2 * eps), plus);
  }
  const SpectralField s = strat_correction(u, nb, p);
  CHECK(testing::max_diff(s, fd) < 1e-9 * (1 + testing::max_abs(s)));
}

TEST_CASE("precomputed correction matrix matches the direct route") {
  std::mt19937_64 rng(10);
  for (const DomainSpec& spec : {DomainSpec::interval(12), DomainSpec::rectangle(5, 4, 1.0, 1.5)}) {
    const auto space = Space::make(spec);
    const NoiseBasis nb = build_default_noise(space, 8, 0.4, 2.0);
    ModelParams p;
    p.gamma = 1.2;
    const GalerkinSystem sys(space, p, nb);
    for (int trial = 0; trial < 5; ++trial) {
      const SpectralField u = testing::random_field(space, rng);
      const SpectralField direct = strat_correction(u, nb, p);
      CHECK(testing::max_diff(sys.strat_correction(u), direct) < 1e-12 * (1 + testing::max_abs(direct)));
      const SpectralField d = drift_ito(u, nb, p).total;
      CHECK(testing::max_diff(sys.drift(u), d) < 1e-11 * (1 + testing::max_abs(d)));
    }
  }
}

TEST_CASE("fused increment matches the assembled operators") {
  std::mt19937_64 rng(13);
  const auto space = Space::make(DomainSpec::rectangle(6, 5));
  const NoiseBasis nb = build_default_noise(space, 6, 0.3, 2.0);
  ModelParams p;
  p.gamma = 0.9;
  p.mu = 0.7;
  p.kappa2 = 1.1;
  const GalerkinSystem sys(space, p, nb);
  const SpectralField u = testing::random_field(space, rng);
  const std::vector<double> dw{0.1, -0.2, 0.05, 0.3, -0.1, 0.02};
  const double dt = 1e-3;
  SpectralField expect = dt * (p.gamma * f2_cross_term(u) - p.kappa2 * f3_cubic_term(u, p.mu));
  for (std::size_t k = 0; k < nb.size(); ++k) expect.axpy(dw[k], noise_operator(u, k, nb, p));
  CHECK(testing::max_diff(sys.explicit_increment(u, dt, dw, false), expect) < 1e-12);
  expect.axpy(dt * p.kappa1, laplacian(u));
  CHECK(testing::max_diff(sys.explicit_increment(u, dt, dw, true), expect) < 1e-12);
}

TEST_CASE("Ito drift") {
  const auto space = Space::make(DomainSpec::interval(4));
  const NoiseBasis none(space, {});
  ModelParams p;
  CHECK(testing::max_abs(drift_ito(SpectralField(space), none, p).total) == 0.0);

  p.kappa2 = 0.7;
  p.mu = 0.4;
  const double c = 1.5;
  const SpectralField d = drift_ito(SpectralField::constant(space, {c, 0, 0}), none, p).total;
  CHECK(testing::max_diff(d, SpectralField::constant(space, {-p.kappa2 * (1 + p.mu * c * c) * c, 0, 0})) < 1e-12);

  const SpectralField e = drift_ito(SpectralField::mode(space, 1, 0), none, unit_params()).total;
  CHECK(e(0, 1) == doctest::Approx(-kPi * kPi - 2.5).epsilon(1e-13));
  CHECK(e(0, 3) == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("drift total is the exact linear combination of its parts") {
  std::mt19937_64 rng(14);
  const auto space = Space::make(DomainSpec::interval(10));
  const NoiseBasis nb = build_default_noise(space, 4);
  ModelParams p;
  p.kappa1 = 0.3;
  p.gamma = 2.1;
  p.kappa2 = 0.9;
  for (int trial = 0; trial < 10; ++trial) {
    const DriftBreakdown d = drift_ito(testing::random_field(space, rng), nb, p);
    for (std::size_t i = 0; i < d.total.coeffs().size(); ++i) {
      const double sum = p.kappa1 * d.f1.coeffs()[i] + p.gamma * d.f2.coeffs()[i] - p.kappa2 * d.f3.coeffs()[i] +
                         d.strat.coeffs()[i];
      CHECK(d.total.coeffs()[i] == sum);
    }
  }
}

TEST_CASE("default noise recipe and its W1,inf ledger") {
  const auto space = Space::make(DomainSpec::interval(16));
  const NoiseBasis empty = build_default_noise(space, 0);
  CHECK(empty.size() == 0);
  CHECK(empty.total_bound() == 0.0);

  const NoiseBasis one = build_default_noise(space, 1, 1.0, 2.0);
  const double expect = std::pow(std::sqrt(2.0) + std::sqrt(2.0) * kPi, 2);
  CHECK(one.w1inf_bounds()[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(one.field(0)(0, 1) == 1.0);

  double previous = 0.0;
  for (int k = 0; k <= 12; ++k) {
    const NoiseBasis nb = build_default_noise(space, k);
    double sum = 0.0;
    for (double b : nb.w1inf_bounds()) sum += b;
    CHECK(nb.total_bound() == doctest::Approx(sum));
    CHECK(nb.total_bound() >= previous);
    previous = nb.total_bound();
  }
  const NoiseBasis three = build_default_noise(space, 4, 0.1, 2.0);
  CHECK(three.field(3)(0, 4) == doctest::Approx(0.1 / 16));
  CHECK(three.field(1)(1, 2) == doctest::Approx(0.1 / 4));

  CHECK_THROWS_AS(build_default_noise(space, 3, 0.1, 1.2), ConfigError);
  try {
    build_default_noise(space, 3, 0.1, 1.2);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("W^{1,inf}") != std::string::npos);
  }
  CHECK_THROWS_AS(build_default_noise(space, 16), ConfigError);
}

TEST_CASE("noise restricted to other truncations") {
  const auto coarse = Space::make(DomainSpec::interval(8));
  const auto fine = Space::make(DomainSpec::interval(32));
  const NoiseBasis nb = build_default_noise(fine, 6);
  const NoiseBasis down = nb.restrict_to(coarse);
  CHECK(down.size() == 6);
  CHECK(down.l2_sum() == doctest::Approx(nb.l2_sum()));
  CHECK_THROWS_AS(build_default_noise(fine, 12).restrict_to(coarse), ConfigError);
  CHECK_THROWS_AS(NoiseBasis::from_modes(coarse, {{{9, 0}, 0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(GalerkinSystem(coarse, ModelParams{}, build_default_noise(fine, 12)), ConfigError);
}

TEST_CASE("local Lipschitz bounds") {
  std::mt19937_64 rng(15);
  const auto space = Space::make(DomainSpec::interval(12));
  const NoiseBasis nb = build_default_noise(space, 4);
  const GalerkinSystem sys(space, ModelParams{}, nb);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SpectralField u = testing::random_field(space, rng, 2.0);
    SpectralField v = testing::random_field(space, rng, 2.0);
    u *= 1.0 / h1_norm(u);
    v *= 1.0 / h1_norm(v);
    const SpectralField du = u - v;
    const double f1_ratio = l2_norm(laplacian(u) - laplacian(v)) / l2_norm(du);
    CHECK(f1_ratio <= space->lambda_max() * (1 + 1e-12));
    worst = std::max(worst, l2_norm(sys.drift(u) - sys.drift(v)) / l2_norm(du));
  }
  CHECK(std::isfinite(worst));
  CHECK(worst < 10 * space->lambda_max());
}

TEST_CASE("cross-term Sobolev constant is stable under resolution doubling") {
  auto constant = [](int n) {
    std::mt19937_64 rng(16);
    const auto space = Space::make(DomainSpec::interval(n));
    double c = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const SpectralField u = testing::random_field(space, rng, 2.5);
      c = std::max(c, l2_norm(f2_cross_term(u)) / (std::sqrt(h1_norm(u)) * std::pow(h2_norm(u), 1.5)));
    }
    return c;
  };
  const double c16 = constant(16), c32 = constant(32);
  CHECK(c16 > 0.0);
  CHECK(c32 / c16 < 2.0);
  CHECK(c16 / c32 < 2.0);
}

}  // TEST_SUITE

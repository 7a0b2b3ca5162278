#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "sllb/diagnostics.hpp"
#include "sllb/errors.hpp"
#include "sllb/spectral.hpp"

using namespace sllb;
using testing::kPi;

namespace {

ModelParams heat_params() {
  ModelParams p;
  p.kappa2 = 0.0;
  return p;
}

SimulationOptions with_ledger(LedgerLevel level, std::size_t stride = 1) {
  SimulationOptions o;
  o.state_stride = 0;
  o.ledger = {level, stride, 1.25};
  return o;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("summation helpers") {
  const std::vector<double> v{1e16, 1.0, -1e16};
  CHECK(compensated_sum(v) == 1.0);
  const std::vector<double> w{1, 2, 3, 4};
  const Estimate e = estimate(w);
  CHECK(e.mean == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.count == 4);
  CHECK(max_abs(std::vector<double>{-3, 2}) == 3.0);
  const std::vector<double> x{1, 2, 4, 8}, y{1, 4, 16, 64};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), StatisticsError);
}

TEST_CASE("energy residuals vanish at rest") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  const auto traj = simulate_path(SpectralField(space), TimeGrid{0.1, 10}, Scheme::em, sys, {},
                                  with_ledger(LedgerLevel::full));
  CHECK(traj.ledger.rows.size() == 11);
  CHECK(max_abs(l2_energy_residual(traj, sys.params())) == 0.0);
  CHECK(max_abs(h1_energy_residual(traj, sys.params())) == 0.0);
}

TEST_CASE("residuals need a suitable ledger") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  const auto u0 = SpectralField::mode(space, 1, 0);
  const auto strided = simulate_path(u0, TimeGrid{0.1, 10}, Scheme::em, sys, {}, with_ledger(LedgerLevel::full, 2));
  CHECK_THROWS_AS(l2_energy_residual(strided, sys.params()), ConfigError);
  const auto basic = simulate_path(u0, TimeGrid{0.1, 10}, Scheme::em, sys, {}, with_ledger(LedgerLevel::basic));
  CHECK_NOTHROW(l2_energy_residual(basic, sys.params()));
  CHECK_THROWS_AS(h1_energy_residual(basic, sys.params()), ConfigError);
  const auto none = simulate_path(u0, TimeGrid{0.1, 10}, Scheme::em, sys, {});
  CHECK_THROWS_AS(l2_energy_residual(none, sys.params()), ConfigError);
}

TEST_CASE("L2 residual of the logistic decay is first order in dt") {
  const auto space = Space::make(DomainSpec::interval(4));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  const auto u0 = SpectralField::constant(space, {1, 0, 0});
  auto residual = [&](std::size_t steps) {
    const auto t = simulate_path(u0, TimeGrid{0.5, steps}, Scheme::em, sys, {}, with_ledger(LedgerLevel::basic));
    return std::abs(l2_energy_residual(t, sys.params()).back());
  };
  const double r1 = residual(200), r2 = residual(400), r3 = residual(800);
  CHECK(r1 > 0.0);
  CHECK(std::log2(r1 / r2) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::log2(r2 / r3) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("H1 residual of heat flow is first order in dt") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, heat_params(), NoiseBasis(space, {}));
  const auto u0 = SpectralField::mode(space, 2, 1, 0.4) + SpectralField::mode(space, 1, 0, 0.3);
  auto residual = [&](std::size_t steps) {
    const auto t = simulate_path(u0, TimeGrid{0.05, steps}, Scheme::em, sys, {}, with_ledger(LedgerLevel::full));
    return max_abs(h1_energy_residual(t, sys.params()));
  };
  const double r1 = residual(500), r2 = residual(1000);
  CHECK(std::log2(r1 / r2) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("remainder term") {
  const auto space = Space::make(DomainSpec::interval(8));
  ModelParams p;
  p.kappa1 = 0.8;
  const NoiseBasis nb = build_default_noise(space, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double g = h1_norm(nb.field(k)) * h1_norm(nb.field(k)) - l2_norm(nb.field(k)) * l2_norm(nb.field(k));
    CHECK(r_remainder(SpectralField(space), k, nb, p) == doctest::Approx(p.kappa1 * p.kappa1 * g / 2));
  }
  const NoiseBasis flat(space, {SpectralField::constant(space, {0, 0.5, 0})});
  std::mt19937_64 rng(31);
  CHECK(std::abs(r_remainder(testing::random_field(space, rng), 0, flat, p)) < 1e-12);
  CHECK_THROWS_AS(r_remainder(SpectralField(space), 3, nb, p), IndexError);
}

TEST_CASE("remainder is bounded by the noise ledger") {
  std::mt19937_64 rng(32);
  const auto space = Space::make(DomainSpec::interval(10));
  const NoiseBasis nb = build_default_noise(space, 5, 0.5);
  const ModelParams p;
  const double c = std::max(p.gamma, p.kappa1);
  for (int trial = 0; trial < 30; ++trial) {
    const SpectralField u = testing::random_field(space, rng, 2.0);
    double r = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) r += r_remainder(u, k, nb, p);
    const double h1 = h1_norm(u);
    CHECK(std::abs(r) <= 4 * c * c * nb.total_bound() * (1 + h1 * h1));
  }
}

TEST_CASE("moments of heat flow match the closed form") {
  const auto space = Space::make(DomainSpec::interval(4));
  const GalerkinSystem sys(space, heat_params(), NoiseBasis(space, {}));
  const double T = 0.1;
  std::vector<Trajectory> batch;
  batch.push_back(simulate_path(SpectralField::mode(space, 1, 0), TimeGrid{T, 4000}, Scheme::imex, sys, {},
                                with_ledger(LedgerLevel::basic)));
  const std::vector<double> ps{1.0, 2.0};
  const auto table = moment_report(batch, ps);
  const double closed = (1 - std::exp(-2 * kPi * kPi * T)) / 2;
  CHECK(find_moment(table, "int_grad", 1).value.mean == doctest::Approx(closed).epsilon(5e-3));
  CHECK(find_moment(table, "int_grad", 2).value.mean == doctest::Approx(closed * closed).epsilon(1e-2));
  CHECK(find_moment(table, "sup_l2", 1).value.mean == doctest::Approx(1.0));
  CHECK(find_moment(table, "sup_h1", 1).value.mean == doctest::Approx(1 + kPi * kPi));
  CHECK(find_moment(table, "int_cross", 1).value.mean < 1e-20);
  CHECK_NOTHROW(find_moment(table, "int_f3", 1));
  CHECK_THROWS_AS(find_moment(table, "int_f3", 2), IndexError);
  CHECK(moment_report(std::span<const Trajectory>{}, ps).empty());
}

TEST_CASE("interpolation ratios") {
  const auto line = Space::make(DomainSpec::interval(8));
  const std::vector<SpectralField> flat{SpectralField::constant(line, {1, 0, 0})};
  CHECK(interpolation_ratios(flat, 1) == doctest::Approx(1.0));
  const std::vector<SpectralField> e1{SpectralField::mode(line, 1, 0)};
  const double expect = std::sqrt(2.0) / std::pow(1 + kPi * kPi, 0.25);
  CHECK(expect == doctest::Approx(0.779).epsilon(1e-3));
  CHECK(interpolation_ratios(e1, 1) == doctest::Approx(expect).epsilon(1e-9));
  CHECK_THROWS_AS(interpolation_ratios(e1, 2), DimensionError);
  std::mt19937_64 rng(33);
  const auto box = Space::make(DomainSpec::rectangle(6, 6));
  std::vector<SpectralField> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(testing::random_field(box, rng));
  const double r = interpolation_ratios(samples, 2);
  CHECK(r > 0.0);
  CHECK(r < 3.0);
}

TEST_CASE("structure function of a frozen path") {
  const auto space = Space::make(DomainSpec::interval(4));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  const TimeGrid grid{1.0, 100};
  std::vector<Trajectory> batch{simulate_path(SpectralField(space), grid, Scheme::imex, sys, {})};
  const std::vector<std::size_t> lags{4, 8};
  const auto sf = holder_structure(batch, grid, lags, IncrementNorm::l3_2);
  CHECK(sf.moments == std::vector<double>{0.0, 0.0});
  CHECK(sf.pairs[0] == 97);
  CHECK(sf.lags[1] == doctest::Approx(0.08));

  const TimeGrid short_grid{1.0, 10};
  std::vector<Trajectory> small{simulate_path(SpectralField(space), short_grid, Scheme::imex, sys, {})};
  const std::vector<std::size_t> long_lag{4};
  CHECK_THROWS_AS(holder_structure(small, short_grid, long_lag, IncrementNorm::l2), StatisticsError);
  const std::vector<std::size_t> unsorted{8, 4};
  CHECK_THROWS_AS(holder_structure(batch, grid, unsorted, IncrementNorm::l2), ConfigError);
}

TEST_CASE("structure function of heat flow scales like the lag squared") {
  const auto space = Space::make(DomainSpec::interval(4));
  const GalerkinSystem sys(space, heat_params(), NoiseBasis(space, {}));
  const TimeGrid grid{0.5, 1000};
  std::vector<Trajectory> batch{simulate_path(SpectralField::mode(space, 1, 0), grid, Scheme::imex, sys, {})};
  const std::vector<std::size_t> lags{4, 8, 16, 32, 64};
  const auto sf = holder_structure(batch, grid, lags, IncrementNorm::l2);
  CHECK(sf.slope == doctest::Approx(2.0).epsilon(0.05));
}

}  // TEST_SUITE

TEST_SUITE("diagnostics") {

TEST_CASE("ledger terms that are sums of squares stay non-negative") {
  const auto space = Space::make(DomainSpec::rectangle(6, 6));
  const GalerkinSystem sys(space, ModelParams{}, build_default_noise(space, 6, 0.5));
  SpectralField u0(space);
  u0(0, 0) = 0.5;
  u0(1, 3) = 0.2;
  const auto traj =
      simulate_path(u0, TimeGrid{0.05, 100}, Scheme::imex, sys, {2, 0}, with_ledger(LedgerLevel::full));
  for (const auto& r : traj.ledger.rows) {
    CHECK(r.now.quartic >= 0.0);
    CHECK(r.now.grad_sq >= 0.0);
    CHECK(r.now.lap_sq >= 0.0);
    CHECK(r.now.udu_sq >= 0.0);
    CHECK(r.now.grad_quartic >= 0.0);
    CHECK(r.int_udu_sq >= 0.0);
  }
}

TEST_CASE("moments vanish at rest") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  std::vector<Trajectory> batch;
  for (int i = 0; i < 2; ++i)
    batch.push_back(
        simulate_path(SpectralField(space), TimeGrid{0.1, 10}, Scheme::heun, sys, {}, with_ledger(LedgerLevel::basic)));
  for (const auto& row : moment_report(batch, std::vector<double>{1.0, 2.0})) CHECK(row.value.mean == 0.0);
}

TEST_CASE("interpolation ratio is stable under resolution doubling") {
  auto worst = [](int n) {
    std::mt19937_64 rng(34);
    const auto space = Space::make(DomainSpec::interval(n));
    std::vector<SpectralField> samples;
    for (int i = 0; i < 1000; ++i) samples.push_back(testing::random_field(space, rng, 2.0));
    return interpolation_ratios(samples, 1);
  };
  const double r32 = worst(32), r64 = worst(64);
  CHECK(std::abs(r64 - r32) / r32 < 0.05);
}

TEST_CASE("additive noise gives a linear structure function") {
  const auto space = Space::make(DomainSpec::interval(8));
  ModelParams p;
  p.kappa1 = 0.8;
  const NoiseBasis nb = build_default_noise(space, 2, 0.5);
  const GalerkinSystem sys(space, p, nb);
  const TimeGrid grid{3.2e-3, 320};
  std::vector<Trajectory> batch;
  for (std::uint64_t path = 0; path < 100; ++path)
    batch.push_back(simulate_path(SpectralField(space), grid, Scheme::em, sys, {5, path}));
  const std::vector<std::size_t> lags{5, 10, 20, 40};
  const auto sf = holder_structure(batch, grid, lags, IncrementNorm::l2);
  for (std::size_t i = 1; i < sf.lags.size(); ++i) CHECK(sf.moments[i] / sf.moments[i - 1] == doctest::Approx(2.0).epsilon(0.2));
  // Ito isometry on the additive part.
  const double expect = p.kappa1 * p.kappa1 * nb.l2_sum() * sf.lags[0];
  CHECK(sf.moments[0] == doctest::Approx(expect).epsilon(0.1));
  const auto sf32 = holder_structure(batch, grid, lags, IncrementNorm::l3_2);
  CHECK(sf32.slope == doctest::Approx(1.0).epsilon(0.1));
}

}  // TEST_SUITE

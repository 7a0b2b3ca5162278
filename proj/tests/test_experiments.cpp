#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "sllb/errors.hpp"
#include "sllb/experiments.hpp"
#include "sllb/spectral.hpp"

using namespace sllb;

namespace {

ModelParams heat_params() {
  ModelParams p;
  p.kappa2 = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("random initial states") {
  const auto coarse = Space::make(DomainSpec::interval(8));
  const auto fine = Space::make(DomainSpec::interval(16));
  const auto a = random_initial(coarse, 3, 2.0, 1.5);
  const auto b = random_initial(fine, 3, 2.0, 1.5);
  CHECK(h1_norm(a) == doctest::Approx(1.5));
  CHECK(h1_norm(b) == doctest::Approx(1.5));
  const double scale = a(0, 1) / b(0, 1);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 8; ++i) CHECK(a(c, i) == doctest::Approx(scale * b(c, i)));
  CHECK(testing::max_diff(a, random_initial(coarse, 3, 2.0, 1.5)) == 0.0);
  CHECK(testing::max_diff(a, random_initial(coarse, 4, 2.0, 1.5)) > 0.0);
  const auto box = Space::make(DomainSpec::rectangle(4, 4));
  CHECK(h1_norm(random_initial(box, 1, 3.0, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS(median({}));
}

TEST_CASE("path batches are independent of scheduling") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, build_default_noise(space, 3));
  const auto u0 = random_initial(space, 2, 2.0, 1.0);
  const TimeGrid grid{0.05, 50};
  const auto batch = run_batch(u0, grid, Scheme::imex, sys, 17, 6, {0});
  REQUIRE(batch.paths.size() == 6);
  CHECK(batch.blow_ups == 0);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(batch.path_indices[i] == i);
    const auto single = simulate_path(u0, grid, Scheme::imex, sys, {17, i}, {0});
    CHECK(testing::max_diff(batch.paths[i].states.back(), single.states.back()) == 0.0);
  }
}

TEST_CASE("blown-up paths are counted") {
  const auto space = Space::make(DomainSpec::interval(4));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  const auto batch = run_batch(SpectralField::constant(space, {10, 0, 0}), TimeGrid{50.0, 50}, Scheme::em, sys, 0, 4);
  CHECK(batch.paths.empty());
  CHECK(batch.blow_ups == 4);
  CHECK(batch.blow_up_fraction() == 1.0);
}

TEST_CASE("uniqueness with zero perturbation is exact") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, build_default_noise(space, 3));
  const auto u0 = random_initial(space, 5, 2.0, 1.0);
  const auto dir = random_initial(space, 6, 2.0, 3.0);
  const std::vector<double> deltas{0.0, 1e-4, 1e-6};
  const auto report = run_uniqueness(u0, dir, deltas, TimeGrid{0.05, 100}, Scheme::imex, sys, 1, 3, 10);
  REQUIRE(report.summary.size() == 3);
  CHECK(report.summary[0].all_identical);
  CHECK(report.summary[0].max_sup_ratio == 0.0);
  for (const auto& run : report.runs) {
    CHECK(run.times.size() == 11);
    if (run.delta == 0.0) CHECK(run.identical);
  }
  // Linearised regime: the relative perturbation growth is independent of delta.
  const double a = report.summary[1].median_sup_ratio, b = report.summary[2].median_sup_ratio;
  CHECK(std::abs(a - b) / b < 0.01);
  CHECK(a > 0.0);
}

TEST_CASE("uniqueness weight") {
  const auto space = Space::make(DomainSpec::interval(6));
  const auto u = SpectralField::constant(space, {1, 0, 0});
  CHECK(uniqueness_phi(u, u) == doctest::Approx(2.0));
  CHECK(uniqueness_phi(SpectralField(space), SpectralField(space)) == 0.0);
}

TEST_CASE("Galerkin convergence of heat flow is trivial") {
  const auto fine = Space::make(DomainSpec::interval(16));
  const auto u0 = SpectralField::mode(fine, 1, 2, 0.5);
  const auto rows = run_galerkin_convergence(u0, TimeGrid{0.05, 50}, Scheme::imex, NoiseBasis(fine, {}),
                                             heat_params(), 0, 2, {4, 8, 16}, 5);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].n == 16);
  for (const auto& r : rows) {
    CHECK(r.sup_l2.size() == 2);
    CHECK(r.median_sup_l2 < 1e-12);
  }
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_distance({}, {1}), StatisticsError);
}

TEST_CASE("deterministic decay towards rest") {
  const auto space = Space::make(DomainSpec::interval(6));
  const GalerkinSystem sys(space, ModelParams{}, NoiseBasis(space, {}));
  InvariantOptions opt;
  opt.horizons = {1.0, 2.0};
  opt.radii = {0.01, 0.1, 1.0};
  opt.dt = 1e-2;
  opt.sample_stride = 5;
  const auto report = run_invariant_measure(random_initial(space, 3, 2.0, 2.0), opt, Scheme::imex, sys, 0, 2);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.blow_ups == 0);
  CHECK(report.rows[1].m2.mean < report.rows[0].m2.mean);
  CHECK(report.rows[0].m2.std_error == 0.0);
  for (const auto& row : report.rows)
    for (std::size_t k = 0; k < opt.radii.size(); ++k) {
      // Exceedance fraction never beats the Chebyshev bound.
      CHECK(row.occupation[k] <= row.m2.mean / (opt.radii[k] * opt.radii[k]) + 1e-12);
      if (k > 0) CHECK(row.occupation[k] <= row.occupation[k - 1]);
    }
}

TEST_CASE("moment studies") {
  MomentSetup setup;
  setup.domain = DomainSpec::interval(8);
  setup.t_end = 0.01;
  setup.n_paths = 2;
  CHECK(run_moment_study(setup, {}, {1.0}).empty());
  const auto rows = run_moment_study(setup, {{8, 10, 2}, {4, 10, 0}}, {1.0});
  CHECK(rows.size() == 2 * 9);
  CHECK(rows.front().cell == 0);
  CHECK(rows.back().cell == 1);
}

TEST_CASE("reports land on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "sllb_experiments_test";
  std::filesystem::remove_all(dir);
  write_manifest(dir, {"unit", "0123456789abcdef", 4, 2, {{"note", "x"}}});
  std::ifstream in(dir / "manifest.yaml");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.find("0123456789abcdef") != std::string::npos);
  CHECK(text.find("code_version") != std::string::npos);
  std::vector<ConvergenceRow> rows(1);
  rows[0].n = 4;
  rows[0].sup_l2 = {0.5};
  rows[0].int_h1 = {0.25};
  write_report(dir, rows);
  CHECK(std::filesystem::exists(dir / "convergence.csv"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE

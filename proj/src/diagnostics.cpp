#include "sllb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sllb/errors.hpp"
#include "sllb/spectral.hpp"

namespace sllb {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

Estimate estimate(std::span<const double> values) {
  Estimate e;
  e.count = values.size();
  if (values.empty()) return e;
  e.mean = compensated_sum(values) / double(values.size());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
    const double var = compensated_sum(sq) / double(values.size() - 1);
    e.std_error = std::sqrt(var / double(values.size()));
  }
  return e;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

void require_full_ledger(const Trajectory& traj, bool need_full) {
  const auto& opt = traj.ledger.options;
  if (traj.ledger.rows.empty() || opt.level == LedgerLevel::off)
    throw ConfigError("energy residual needs a recorded ledger");
  if (opt.stride != 1) throw ConfigError("energy residual needs ledger stride 1 (got " + std::to_string(opt.stride) + ")");
  if (need_full && opt.level != LedgerLevel::full)
    throw ConfigError("H1 energy residual needs the full ledger level");
}

}  // namespace

std::vector<double> l2_energy_residual(const Trajectory& traj, const ModelParams& p) {
  require_full_ledger(traj, false);
  const auto& rows = traj.ledger.rows;
  const double start = rows.front().now.half_l2;
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const double lhs = r.now.half_l2 + p.kappa1 * r.int_grad_sq + p.kappa2 * r.int_quartic;
    const double rhs = start + r.l2_source + r.stoch_l2;
    out.push_back(lhs - rhs);
  }
  return out;
}

std::vector<double> h1_energy_residual(const Trajectory& traj, const ModelParams& p) {
  require_full_ledger(traj, true);
  const auto& rows = traj.ledger.rows;
  const double start = 0.5 * rows.front().now.grad_sq;
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const double lhs = 0.5 * r.now.grad_sq + p.kappa1 * r.int_lap_sq + p.kappa2 * r.int_grad_quartic +
                       2.0 * p.mu * p.kappa2 * r.int_udu_sq;
    const double rhs = start + r.int_remainder + r.stoch_h1;
    out.push_back(lhs - rhs);
  }
  return out;
}

std::vector<MomentRow> moment_report(std::span<const Trajectory> batch, std::span<const double> p_exponents) {
  std::vector<MomentRow> table;
  if (batch.empty()) return table;
  for (const auto& t : batch)
    if (t.ledger.rows.empty()) throw ConfigError("moment_report needs trajectories with ledgers");

  struct PathStats {
    double sup_l2 = 0, sup_grad = 0, sup_h1 = 0;
    double int_grad, int_quartic, int_lap, int_f3, int_cross, int_linf;
  };
  std::vector<PathStats> stats;
  for (const auto& t : batch) {
    PathStats s{};
    for (const auto& r : t.ledger.rows) {
      s.sup_l2 = std::max(s.sup_l2, 2.0 * r.now.half_l2);
      s.sup_grad = std::max(s.sup_grad, r.now.grad_sq);
      s.sup_h1 = std::max(s.sup_h1, 2.0 * r.now.half_l2 + r.now.grad_sq);
    }
    const auto& last = t.ledger.rows.back();
    s.int_grad = last.int_grad_sq;
    s.int_quartic = last.int_quartic;
    s.int_lap = last.int_lap_sq;
    s.int_f3 = last.int_f3_l2_sq;
    s.int_cross = last.int_cross_pow;
    s.int_linf = last.int_linf_sq;
    stats.push_back(s);
  }

  auto add = [&](const std::string& name, double p, auto getter) {
    std::vector<double> v;
    v.reserve(stats.size());
    for (const auto& s : stats) v.push_back(std::pow(getter(s), p));
    table.push_back({name, p, estimate(v)});
  };
  for (double p : p_exponents) {
    add("sup_l2", p, [](const PathStats& s) { return s.sup_l2; });
    add("int_grad", p, [](const PathStats& s) { return s.int_grad; });
    add("int_quartic", p, [](const PathStats& s) { return s.int_quartic; });
    add("sup_grad", p, [](const PathStats& s) { return s.sup_grad; });
    add("sup_h1", p, [](const PathStats& s) { return s.sup_h1; });
    add("int_lap", p, [](const PathStats& s) { return s.int_lap; });
    add("int_cross", p, [](const PathStats& s) { return s.int_cross; });
    add("int_linf", p, [](const PathStats& s) { return s.int_linf; });
  }
  add("int_f3", 1.0, [](const PathStats& s) { return s.int_f3; });
  return table;
}

const MomentRow& find_moment(const std::vector<MomentRow>& table, const std::string& quantity, double p) {
  for (const auto& r : table)
    if (r.quantity == quantity && r.p == p) return r;
  throw IndexError("no moment row " + quantity + " p=" + std::to_string(p));
}

double interpolation_ratios(std::span<const SpectralField> samples, int dimension) {
  double best = 0.0;
  for (const auto& v : samples) {
    if (v.space().dimension() != dimension) throw DimensionError("sample dimension does not match");
    const double denom = std::sqrt(l2_norm(v) * h1_norm(v));
    if (denom == 0.0) continue;
    double num = 0.0;
    if (dimension == 1) {
      num = sup_norms(v).value;
    } else if (dimension == 2) {
      num = lp_norm(synthesize(v), 4.0);
    } else {
      throw UnsupportedError("interpolation ratios are defined for d = 1, 2");
    }
    best = std::max(best, num / denom);
  }
  return best;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw StatisticsError("slope fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

StructureFunction holder_structure(std::span<const Trajectory> batch, const TimeGrid& grid,
                                   std::span<const std::size_t> lag_steps, IncrementNorm norm) {
  StructureFunction sf;
  sf.norm = norm;
  if (batch.empty()) throw StatisticsError("structure function needs at least one trajectory");
  for (std::size_t i = 1; i < lag_steps.size(); ++i)
    if (lag_steps[i] <= lag_steps[i - 1]) throw ConfigError("lags must be strictly increasing");
  const std::size_t stride = batch.front().state_stride;
  for (const auto& t : batch)
    if (t.state_stride != stride || stride == 0)
      throw ConfigError("structure function needs trajectories with a common non-zero state stride");

  const double dt = grid.dt();
  for (std::size_t lag : lag_steps) {
    if (lag == 0 || lag % stride != 0) throw ConfigError("lags must be positive multiples of the state stride");
    const std::size_t offset = lag / stride;
    std::vector<double> samples;
    for (const auto& t : batch) {
      // Only the regularly strided part of the trajectory (the final state may be off-stride).
      const std::size_t regular = grid.n_steps / stride + 1;
      const std::size_t count = std::min(regular, t.states.size());
      for (std::size_t a = 0; a + offset < count; ++a) {
        const SpectralField diff = t.states[a + offset] - t.states[a];
        double v = 0.0;
        if (norm == IncrementNorm::l2) {
          v = inner(diff, diff);
        } else {
          const double n = lp_norm(synthesize(diff), 1.5);
          v = n * n;
        }
        samples.push_back(v);
      }
    }
    if (samples.size() < 8)
      throw StatisticsError("lag " + std::to_string(lag) + " has only " + std::to_string(samples.size()) +
                            " time pairs (need 8)");
    sf.lags.push_back(double(lag) * dt);
    sf.moments.push_back(estimate(samples).mean);
    sf.pairs.push_back(samples.size());
  }
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < sf.lags.size(); ++i) {
    if (sf.lags[i] < 4.0 * dt * (1 - 1e-12) || sf.lags[i] > grid.t_end / 8.0 * (1 + 1e-12)) continue;
    if (!(sf.moments[i] > 0.0)) continue;
    fx.push_back(sf.lags[i]);
    fy.push_back(sf.moments[i]);
  }
  sf.slope = fx.size() >= 2 ? loglog_slope(fx, fy) : 0.0;
  return sf;
}

}  // namespace sllb

#include "sllb/integrators.hpp"

#include <cmath>
#include <sstream>

#include "sllb/errors.hpp"
#include "sllb/spectral.hpp"

namespace sllb {

Scheme parse_scheme(const std::string& name) {
  if (name == "em") return Scheme::em;
  if (name == "heun") return Scheme::heun;
  if (name == "imex") return Scheme::imex;
  throw ConfigError("unknown scheme '" + name + "' (expected em, heun or imex)");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::em: return "em";
    case Scheme::heun: return "heun";
    case Scheme::imex: return "imex";
  }
  return "?";
}

SpectralField step_em_ito(const SpectralField& u, double dt, std::span<const double> dW,
                          const GalerkinSystem& system) {
  SpectralField next = u;
  next += system.explicit_increment(u, dt, dW, true);
  next.axpy(dt, system.strat_correction(u));
  return next;
}

SpectralField step_heun_strat(const SpectralField& u, double dt, std::span<const double> dW,
                              const GalerkinSystem& system) {
  const SpectralField first = system.explicit_increment(u, dt, dW, true);
  const SpectralField predictor = u + first;
  const SpectralField second = system.explicit_increment(predictor, dt, dW, true);
  SpectralField next = u;
  next.axpy(0.5, first);
  next.axpy(0.5, second);
  return next;
}

SpectralField step_imex(const SpectralField& u, double dt, std::span<const double> dW, const GalerkinSystem& system) {
  SpectralField next = u;
  next += system.explicit_increment(u, dt, dW, false);
  next.axpy(dt, system.strat_correction(u));
  const Space& s = system.space();
  const double k1dt = system.params().kappa1 * dt;
  for (int c = 0; c < kComponents; ++c)
    for (std::size_t i = 0; i < s.n(); ++i) next(c, i) /= 1.0 + k1dt * s.lambda(i);
  return next;
}

SpectralField step(Scheme scheme, const SpectralField& u, double dt, std::span<const double> dW,
                   const GalerkinSystem& system) {
  switch (scheme) {
    case Scheme::em: return step_em_ito(u, dt, dW, system);
    case Scheme::heun: return step_heun_strat(u, dt, dW, system);
    case Scheme::imex: return step_imex(u, dt, dW, system);
  }
  throw ConfigError("unknown scheme");
}

double stability_number(const GalerkinSystem& system, double dt) {
  return dt * system.params().kappa1 * system.space().lambda_max();
}

Trajectory simulate_path(const SpectralField& u0, const TimeGrid& grid, Scheme scheme, const GalerkinSystem& system,
                         const SeedInfo& seed, const SimulationOptions& options) {
  grid.validate();
  if (!u0.all_finite()) throw ConfigError("initial state has non-finite coefficients");
  if (!(u0.space().spec() == system.space().spec()))
    throw DimensionError("initial state does not match the system's space");
  const SpectralField start(system.space_ptr(), u0.coeffs());

  Trajectory traj;
  traj.state_stride = options.state_stride;
  const double dt = grid.dt();
  if (scheme != Scheme::imex && stability_number(system, dt) > 1.0) {
    std::ostringstream msg;
    msg << "explicit scheme with dt*kappa1*lambda_max = " << stability_number(system, dt) << " > 1";
    traj.warnings.push_back(msg.str());
  }
  {
    std::ostringstream fp;
    fp << "scheme=" << to_string(scheme) << ";t_end=" << grid.t_end << ";n_steps=" << grid.n_steps
       << ";seed=" << seed.master_seed << ";path=" << seed.path_index << ";n=" << system.space().n()
       << ";K=" << system.noise().size();
    traj.fingerprint = fp.str();
  }

  const std::size_t count = system.noise().size();
  const WienerPath wiener(seed.master_seed, seed.path_index, grid, count);
  std::vector<double> dw(count);

  std::optional<LedgerRecorder> recorder;
  if (options.ledger.level != LedgerLevel::off) {
    recorder.emplace(system, options.ledger);
    recorder->begin(start, 0.0);
  }

  traj.times.push_back(0.0);
  traj.states.push_back(start);
  SpectralField u = start;
  for (std::size_t s = 0; s < grid.n_steps; ++s) {
    if (count > 0) wiener.row(s, dw);
    SpectralField next = step(scheme, u, dt, dw, system);
    const double t_next = grid.time(s + 1);
    if (!next.all_finite()) throw BlowUpError(s + 1, t_next);
    const bool last = s + 1 == grid.n_steps;
    if (recorder) recorder->advance(u, dt, dw, next, t_next, last);
    if (last || (options.state_stride > 0 && (s + 1) % options.state_stride == 0)) {
      traj.times.push_back(t_next);
      traj.states.push_back(next);
    }
    if (options.observer) options.observer(s + 1, t_next, next);
    u = std::move(next);
  }
  if (recorder) traj.ledger = recorder->take();
  return traj;
}

DomainSpec with_modes(const DomainSpec& spec, int n) {
  DomainSpec out = spec;
  for (int a = 0; a < spec.dimension; ++a) {
    out.n_modes[a] = n;
    out.quad_points[a] = 2 * n + 1;
  }
  return out;
}

std::vector<Trajectory> couple_resolutions(const SpectralField& u0, const TimeGrid& grid, Scheme scheme,
                                           const NoiseBasis& nb, const ModelParams& p, const SeedInfo& seed,
                                           const std::vector<int>& n_list, const SimulationOptions& options) {
  std::vector<Trajectory> out;
  for (int n : n_list) {
    const SpacePtr space = Space::make(with_modes(u0.space().spec(), n));
    const GalerkinSystem system(space, p, nb);  // throws if a noise mode is unresolved
    out.push_back(simulate_path(transfer(u0, space), grid, scheme, system, seed, options));
  }
  return out;
}

}  // namespace sllb

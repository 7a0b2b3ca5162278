#include "sllb/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sllb/errors.hpp"
#include "sllb/io.hpp"
#include "sllb/spectral.hpp"

namespace sllb {

namespace {

std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.is_null() ? std::string() : " (line " + std::to_string(m.line + 1) + ")";
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(path + " must be a mapping" + where(node));
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + (path.empty() ? key : path + "." + key) + "'" + where(kv.first));
  }
}

template <class T>
T get(const YAML::Node& parent, const std::string& path, const char* key, const T& fallback) {
  const YAML::Node n = parent[key];
  if (!n || n.IsNull()) return fallback;
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + path + "." + key + "'" + where(n));
  }
}

std::uint64_t get_u64(const YAML::Node& parent, const std::string& path, const char* key, std::uint64_t fallback) {
  const YAML::Node n = parent[key];
  if (!n || n.IsNull()) return fallback;
  try {
    const std::string s = n.as<std::string>();
    std::size_t used = 0;
    if (s.empty() || s[0] == '-') throw std::invalid_argument("negative");
    const std::uint64_t v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + path + "." + key + "' (expected an unsigned integer)" + where(n));
  }
}

std::size_t get_count(const YAML::Node& parent, const std::string& path, const char* key, std::size_t fallback) {
  return std::size_t(get_u64(parent, path, key, fallback));
}

// Scalar or list of per-axis values.
template <class T>
std::vector<T> get_axes(const YAML::Node& parent, const std::string& path, const char* key) {
  const YAML::Node n = parent[key];
  if (!n || n.IsNull()) return {};
  try {
    if (n.IsSequence()) return n.as<std::vector<T>>();
    return {n.as<T>()};
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + path + "." + key + "'" + where(n));
  }
}

LedgerLevel parse_level(const std::string& s) {
  if (s == "off") return LedgerLevel::off;
  if (s == "basic") return LedgerLevel::basic;
  if (s == "full") return LedgerLevel::full;
  throw ConfigError("output.ledger_level must be off, basic or full (got '" + s + "')");
}

const char* level_name(LedgerLevel l) {
  switch (l) {
    case LedgerLevel::off: return "off";
    case LedgerLevel::basic: return "basic";
    case LedgerLevel::full: return "full";
  }
  return "?";
}

IncrementNorm parse_norm(const std::string& s) {
  if (s == "l2") return IncrementNorm::l2;
  if (s == "l3/2") return IncrementNorm::l3_2;
  throw ConfigError("experiments.structure.norm must be l2 or l3/2 (got '" + s + "')");
}

void apply_override(YAML::Node& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + spec + "' is not key=value");
  const std::string key = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("override '" + spec + "': " + e.msg);
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    parts.push_back(part);
  }
  // yaml-cpp node assignment rebinds handles, so walk with fresh copies.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node child = chain.back()[parts[i]];
    if (!child || child.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      child = chain.back()[parts[i]];
    }
    if (!child.IsMap()) throw ConfigError("override key '" + key + "' descends into a non-mapping");
    chain.push_back(child);
  }
  chain.back()[parts.back()] = parsed;
}

void parse_domain(const YAML::Node& n, RunConfig& c) {
  check_keys(n, "domain", {"dimension", "lengths", "n_modes", "quad_points"});
  if (!n || !n["n_modes"]) throw ConfigError("missing required key 'domain.n_modes'");
  DomainSpec d;
  d.dimension = get<int>(n, "domain", "dimension", 1);
  if (d.dimension == 3) throw UnsupportedError("three-dimensional domains are not supported");
  if (d.dimension != 1 && d.dimension != 2)
    throw ConfigError("domain.dimension must be 1 or 2, got " + std::to_string(d.dimension));
  auto fill = [&](const char* key, auto& target, auto fallback) {
    auto v = get_axes<std::decay_t<decltype(target[0])>>(n, "domain", key);
    if (v.empty()) {
      for (int a = 0; a < d.dimension; ++a) target[a] = fallback(a);
      return;
    }
    if (v.size() == 1) v.resize(d.dimension, v[0]);
    if (int(v.size()) != d.dimension)
      throw ConfigError("domain." + std::string(key) + " needs " + std::to_string(d.dimension) + " entries");
    for (int a = 0; a < d.dimension; ++a) target[a] = v[a];
  };
  fill("lengths", d.lengths, [](int) { return 1.0; });
  fill("n_modes", d.n_modes, [](int) { return 1; });
  fill("quad_points", d.quad_points, [&](int a) { return 2 * d.n_modes[a] + 1; });
  if (d.dimension == 1) {
    d.lengths[1] = 1.0;
    d.n_modes[1] = 1;
    d.quad_points[1] = 1;
  }
  d.validate();
  c.domain = d;
}

void parse_model(const YAML::Node& n, RunConfig& c) {
  check_keys(n, "model", {"kappa1", "kappa2", "gamma", "mu", "strat_gamma", "raw"});
  ModelParams p;
  if (!n) {
    c.params = p;
    return;
  }
  const double k1 = get<double>(n, "model", "kappa1", 1.0);
  const double g = get<double>(n, "model", "gamma", 1.0);
  if (const YAML::Node raw = n["raw"]; raw) {
    check_keys(raw, "model.raw", {"temperature", "curie_temperature", "chi_parallel"});
    if (n["kappa2"] || n["mu"])
      throw ConfigError("model.kappa2/mu are derived from model.raw and must not be given as well");
    for (const char* k : {"temperature", "curie_temperature", "chi_parallel"})
      if (!raw[k]) throw ConfigError(std::string("missing required key 'model.raw.") + k + "'");
    p = derive_params(get<double>(raw, "model.raw", "temperature", 0.0),
                      get<double>(raw, "model.raw", "curie_temperature", 0.0),
                      get<double>(raw, "model.raw", "chi_parallel", 0.0), k1, g);
  } else {
    p.kappa1 = k1;
    p.gamma = g;
    p.kappa2 = get<double>(n, "model", "kappa2", 1.0);
    p.mu = get<double>(n, "model", "mu", 1.0);
  }
  p.strat_gamma = get<bool>(n, "model", "strat_gamma", true);
  p.validate();
  c.params = p;
}

void parse_noise(const YAML::Node& n, RunConfig& c) {
  check_keys(n, "noise", {"K", "amplitude", "decay", "modes"});
  NoiseRecipe r;
  if (n) {
    r.count = get<int>(n, "noise", "K", 8);
    r.amplitude = get<double>(n, "noise", "amplitude", 0.1);
    r.decay = get<double>(n, "noise", "decay", 2.0);
    if (const YAML::Node modes = n["modes"]; modes && !modes.IsNull()) {
      if (n["K"] || n["amplitude"] || n["decay"])
        throw ConfigError("noise.modes replaces the K/amplitude/decay recipe; give one or the other");
      if (!modes.IsSequence()) throw ConfigError("noise.modes must be a list" + where(modes));
      for (const auto& m : modes) {
        check_keys(m, "noise.modes[]", {"mode", "component", "amplitude"});
        NoiseMode nm;
        const auto idx = get_axes<int>(m, "noise.modes[]", "mode");
        if (idx.empty() || idx.size() > 2) throw ConfigError("noise.modes[].mode needs 1 or 2 indices" + where(m));
        nm.mode = {idx[0], idx.size() > 1 ? idx[1] : 0};
        nm.component = get<int>(m, "noise.modes[]", "component", 0);
        nm.amplitude = get<double>(m, "noise.modes[]", "amplitude", 0.0);
        if (nm.component < 0 || nm.component > 2) throw ConfigError("noise.modes[].component must be 0, 1 or 2");
        r.modes.push_back(nm);
      }
      r.count = int(r.modes.size());
    }
  }
  if (r.modes.empty()) {
    if (r.count < 0) throw ConfigError("noise.K must be >= 0");
    if (r.count > 0 && !(r.decay > 1.5))
      throw ConfigError("noise.decay must exceed 1.5 so that sum_k ||h_k||^2_{W^{1,inf}} <= h < inf (got " +
                        std::to_string(r.decay) + ")");
    if (!std::isfinite(r.amplitude)) throw ConfigError("noise.amplitude must be finite");
    if (std::size_t(r.count) >= c.domain.total_modes())
      throw ConfigError("noise.K=" + std::to_string(r.count) + " requests modes beyond the truncation");
  }
  c.noise = r;
}

void parse_initial(const YAML::Node& n, RunConfig& c) {
  check_keys(n, "initial", {"kind", "value", "mode", "component", "amplitude", "seed", "decay", "radius", "file"});
  InitialSpec s;
  if (n) {
    s.kind = get<std::string>(n, "initial", "kind", "zero");
    const auto value = get_axes<double>(n, "initial", "value");
    if (!value.empty()) {
      if (value.size() != 3) throw ConfigError("initial.value needs 3 components");
      s.value = {value[0], value[1], value[2]};
    }
    const auto mode = get_axes<int>(n, "initial", "mode");
    if (!mode.empty()) {
      if (mode.size() > 2) throw ConfigError("initial.mode needs 1 or 2 indices");
      s.mode = {mode[0], mode.size() > 1 ? mode[1] : 0};
    }
    s.component = get<int>(n, "initial", "component", 0);
    s.amplitude = get<double>(n, "initial", "amplitude", 1.0);
    s.seed = get_u64(n, "initial", "seed", 1);
    s.decay = get<double>(n, "initial", "decay", 2.0);
    s.radius = get<double>(n, "initial", "radius", 1.0);
    s.file = get<std::string>(n, "initial", "file", "");
  }
  static const std::set<std::string> kinds{"zero", "constant", "mode", "random", "file"};
  if (!kinds.count(s.kind))
    throw ConfigError("initial.kind must be zero, constant, mode, random or file (got '" + s.kind + "')");
  if (s.component < 0 || s.component > 2) throw ConfigError("initial.component must be 0, 1 or 2");
  if (s.kind == "random" && !(s.radius >= 0.0)) throw ConfigError("initial.radius must be >= 0");
  if (s.kind == "file" && s.file.empty()) throw ConfigError("initial.file is required for kind 'file'");
  c.initial = s;
}

void parse_experiments(const YAML::Node& n, RunConfig& c) {
  check_keys(n, "experiments", {"converge", "uniqueness", "invariant", "moments", "structure"});
  ExperimentSpec e;
  if (n) {
    if (const YAML::Node x = n["converge"]; x) {
      check_keys(x, "experiments.converge", {"n_list"});
      e.n_list = get<std::vector<int>>(x, "experiments.converge", "n_list", e.n_list);
    }
    if (const YAML::Node x = n["uniqueness"]; x) {
      check_keys(x, "experiments.uniqueness", {"deltas", "direction_seed", "record_stride"});
      e.deltas = get<std::vector<double>>(x, "experiments.uniqueness", "deltas", e.deltas);
      e.direction_seed = get_u64(x, "experiments.uniqueness", "direction_seed", e.direction_seed);
      e.record_stride = get_count(x, "experiments.uniqueness", "record_stride", e.record_stride);
    }
    if (const YAML::Node x = n["invariant"]; x) {
      const std::string p = "experiments.invariant";
      check_keys(x, p, {"horizons", "radii", "dt", "burn_in", "sample_stride"});
      e.invariant.horizons = get<std::vector<double>>(x, p, "horizons", e.invariant.horizons);
      e.invariant.radii = get<std::vector<double>>(x, p, "radii", e.invariant.radii);
      e.invariant.dt = get<double>(x, p, "dt", e.invariant.dt);
      e.invariant.burn_in = get<double>(x, p, "burn_in", e.invariant.burn_in);
      e.invariant.sample_stride = get_count(x, p, "sample_stride", e.invariant.sample_stride);
    }
    if (const YAML::Node x = n["moments"]; x) {
      const std::string p = "experiments.moments";
      check_keys(x, p, {"p", "cross_power", "cells"});
      e.p_exponents = get<std::vector<double>>(x, p, "p", e.p_exponents);
      e.cross_power = get<double>(x, p, "cross_power", e.cross_power);
      if (const YAML::Node cells = x["cells"]; cells && !cells.IsNull()) {
        if (!cells.IsSequence()) throw ConfigError(p + ".cells must be a list" + where(cells));
        for (const auto& cell : cells) {
          check_keys(cell, p + ".cells[]", {"n", "n_steps", "K"});
          MomentCell m;
          m.n = get<int>(cell, p + ".cells[]", "n", c.domain.n_modes[0]);
          m.n_steps = get_count(cell, p + ".cells[]", "n_steps", c.time.n_steps);
          m.noise_count = get<int>(cell, p + ".cells[]", "K", c.noise.count);
          e.cells.push_back(m);
        }
      }
    }
    if (const YAML::Node x = n["structure"]; x) {
      check_keys(x, "experiments.structure", {"lags", "norm"});
      e.lags = get<std::vector<std::size_t>>(x, "experiments.structure", "lags", e.lags);
      e.structure_norm = parse_norm(get<std::string>(x, "experiments.structure", "norm", "l3/2"));
    }
  }
  for (int n_val : e.n_list)
    if (n_val < 1) throw ConfigError("experiments.converge.n_list entries must be >= 1");
  for (double d : e.deltas)
    if (!(d >= 0.0)) throw ConfigError("experiments.uniqueness.deltas must be >= 0");
  for (double p : e.p_exponents)
    if (!(p >= 1.0)) throw ConfigError("experiments.moments.p entries must be >= 1");
  if (!(e.cross_power >= 1.0 && e.cross_power < 4.0 / 3.0))
    throw ConfigError("experiments.moments.cross_power must lie in [1, 4/3)");
  for (const auto& m : e.cells)
    if (m.n < 1 || m.n_steps < 1 || m.noise_count < 0) throw ConfigError("experiments.moments.cells entry invalid");
  c.experiments = e;
}

RunConfig from_node(const YAML::Node& root) {
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  check_keys(root, "", {"domain", "model", "noise", "time", "scheme", "seeds", "initial", "output", "experiments"});
  RunConfig c;
  parse_domain(root["domain"], c);
  parse_model(root["model"], c);
  if (const YAML::Node t = root["time"]; t) {
    check_keys(t, "time", {"t_end", "n_steps"});
    c.time.t_end = get<double>(t, "time", "t_end", 1.0);
    c.time.n_steps = get_count(t, "time", "n_steps", 0);
  }
  if (!(root["time"] && root["time"]["n_steps"])) {
    // Default step count keeps dt * kappa1 * lambda_max <= 0.5.
    double lambda_max = 0.0;
    for (int a = 0; a < c.domain.dimension; ++a) {
      const double k = std::numbers::pi * (c.domain.n_modes[a] - 1) / c.domain.lengths[a];
      lambda_max += k * k;
    }
    const double needed = std::ceil(c.time.t_end * c.params.kappa1 * lambda_max / 0.5);
    c.time.n_steps = std::max<std::size_t>(1000, std::size_t(needed));
  }
  c.time.validate();
  parse_noise(root["noise"], c);
  c.scheme = parse_scheme(get<std::string>(root, "", "scheme", "heun"));
  if (const YAML::Node s = root["seeds"]; s) {
    check_keys(s, "seeds", {"master_seed", "n_paths"});
    c.master_seed = get_u64(s, "seeds", "master_seed", 0);
    c.n_paths = get_count(s, "seeds", "n_paths", 1);
  }
  if (c.n_paths < 1) throw ConfigError("seeds.n_paths must be >= 1");
  parse_initial(root["initial"], c);
  if (const YAML::Node o = root["output"]; o) {
    check_keys(o, "output", {"dir", "state_stride", "ledger_stride", "ledger_level"});
    c.output.dir = get<std::string>(o, "output", "dir", "out");
    c.output.state_stride = get_count(o, "output", "state_stride", 1);
    c.output.ledger_stride = get_count(o, "output", "ledger_stride", 1);
    c.output.ledger_level = parse_level(get<std::string>(o, "output", "ledger_level", "basic"));
  }
  if (c.output.dir.empty()) throw ConfigError("output.dir must not be empty");
  if (c.output.ledger_stride < 1) throw ConfigError("output.ledger_stride must be >= 1");
  parse_experiments(root["experiments"], c);
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SyntaxError(e.msg, e.mark.line + 1);
  }
  if (!overrides.empty()) {
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
    for (const auto& o : overrides) apply_override(root, o);
  }
  return from_node(root);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string canonical_yaml(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e.SetSeqFormat(YAML::Flow);
  const int dim = c.domain.dimension;
  auto axes = [&](const auto& arr) {
    std::vector<std::decay_t<decltype(arr[0])>> v(arr.begin(), arr.begin() + dim);
    return v;
  };
  e << YAML::BeginMap;
  e << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dimension" << YAML::Value << dim;
  e << YAML::Key << "lengths" << YAML::Value << axes(c.domain.lengths);
  e << YAML::Key << "n_modes" << YAML::Value << axes(c.domain.n_modes);
  e << YAML::Key << "quad_points" << YAML::Value << axes(c.domain.quad_points);
  e << YAML::EndMap;

  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kappa1" << YAML::Value << c.params.kappa1;
  e << YAML::Key << "gamma" << YAML::Value << c.params.gamma;
  if (c.params.raw) {
    e << YAML::Key << "raw" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "temperature" << YAML::Value << c.params.raw->temperature;
    e << YAML::Key << "curie_temperature" << YAML::Value << c.params.raw->curie_temperature;
    e << YAML::Key << "chi_parallel" << YAML::Value << c.params.raw->chi_parallel;
    e << YAML::EndMap;
  } else {
    e << YAML::Key << "kappa2" << YAML::Value << c.params.kappa2;
    e << YAML::Key << "mu" << YAML::Value << c.params.mu;
  }
  e << YAML::Key << "strat_gamma" << YAML::Value << c.params.strat_gamma;
  e << YAML::EndMap;

  e << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  if (c.noise.modes.empty()) {
    e << YAML::Key << "K" << YAML::Value << c.noise.count;
    e << YAML::Key << "amplitude" << YAML::Value << c.noise.amplitude;
    e << YAML::Key << "decay" << YAML::Value << c.noise.decay;
  } else {
    e << YAML::Key << "modes" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : c.noise.modes) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "mode" << YAML::Value << std::vector<int>(m.mode.begin(), m.mode.begin() + dim);
      e << YAML::Key << "component" << YAML::Value << m.component;
      e << YAML::Key << "amplitude" << YAML::Value << m.amplitude;
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "t_end" << YAML::Value << c.time.t_end;
  e << YAML::Key << "n_steps" << YAML::Value << c.time.n_steps;
  e << YAML::EndMap;
  e << YAML::Key << "scheme" << YAML::Value << to_string(c.scheme);
  e << YAML::Key << "seeds" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "master_seed" << YAML::Value << c.master_seed;
  e << YAML::Key << "n_paths" << YAML::Value << c.n_paths;
  e << YAML::EndMap;

  const InitialSpec& s = c.initial;
  e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << s.kind;
  if (s.kind == "constant") {
    e << YAML::Key << "value" << YAML::Value << std::vector<double>{s.value.x, s.value.y, s.value.z};
  } else if (s.kind == "mode") {
    e << YAML::Key << "mode" << YAML::Value << std::vector<int>(s.mode.begin(), s.mode.begin() + dim);
    e << YAML::Key << "component" << YAML::Value << s.component;
    e << YAML::Key << "amplitude" << YAML::Value << s.amplitude;
  } else if (s.kind == "random") {
    e << YAML::Key << "seed" << YAML::Value << s.seed;
    e << YAML::Key << "decay" << YAML::Value << s.decay;
    e << YAML::Key << "radius" << YAML::Value << s.radius;
  } else if (s.kind == "file") {
    e << YAML::Key << "file" << YAML::Value << s.file;
  }
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dir" << YAML::Value << c.output.dir;
  e << YAML::Key << "state_stride" << YAML::Value << c.output.state_stride;
  e << YAML::Key << "ledger_stride" << YAML::Value << c.output.ledger_stride;
  e << YAML::Key << "ledger_level" << YAML::Value << level_name(c.output.ledger_level);
  e << YAML::EndMap;

  const ExperimentSpec& x = c.experiments;
  e << YAML::Key << "experiments" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "converge" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n_list" << YAML::Value << x.n_list;
  e << YAML::EndMap;
  e << YAML::Key << "uniqueness" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "deltas" << YAML::Value << x.deltas;
  e << YAML::Key << "direction_seed" << YAML::Value << x.direction_seed;
  e << YAML::Key << "record_stride" << YAML::Value << x.record_stride;
  e << YAML::EndMap;
  e << YAML::Key << "invariant" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "horizons" << YAML::Value << x.invariant.horizons;
  e << YAML::Key << "radii" << YAML::Value << x.invariant.radii;
  e << YAML::Key << "dt" << YAML::Value << x.invariant.dt;
  e << YAML::Key << "burn_in" << YAML::Value << x.invariant.burn_in;
  e << YAML::Key << "sample_stride" << YAML::Value << x.invariant.sample_stride;
  e << YAML::EndMap;
  e << YAML::Key << "moments" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "p" << YAML::Value << x.p_exponents;
  e << YAML::Key << "cross_power" << YAML::Value << x.cross_power;
  e << YAML::Key << "cells" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : x.cells) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "n" << YAML::Value << m.n;
    e << YAML::Key << "n_steps" << YAML::Value << m.n_steps;
    e << YAML::Key << "K" << YAML::Value << m.noise_count;
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  e << YAML::Key << "structure" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "lags" << YAML::Value << x.lags;
  e << YAML::Key << "norm" << YAML::Value << (x.structure_norm == IncrementNorm::l2 ? "l2" : "l3/2");
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_yaml(cfg))));
  return buf;
}

NoiseBasis build_noise(const RunConfig& cfg, const SpacePtr& space) {
  if (!cfg.noise.modes.empty()) return NoiseBasis::from_modes(space, cfg.noise.modes);
  if (cfg.noise.count == 0) return NoiseBasis(space, {});
  return build_default_noise(space, cfg.noise.count, cfg.noise.amplitude, cfg.noise.decay);
}

SpectralField build_initial(const RunConfig& cfg, const SpacePtr& space) {
  const InitialSpec& s = cfg.initial;
  if (s.kind == "zero") return SpectralField(space);
  if (s.kind == "constant") return SpectralField::constant(space, s.value);
  if (s.kind == "mode") {
    const std::size_t i = space->basis().find(s.mode);
    if (i == EigenBasis::npos)
      throw ConfigError("initial.mode (" + std::to_string(s.mode[0]) + "," + std::to_string(s.mode[1]) +
                        ") is outside the truncation");
    return SpectralField::mode(space, i, s.component, s.amplitude);
  }
  if (s.kind == "random") return random_initial(space, s.seed, s.decay, s.radius);
  const Checkpoint cp = read_checkpoint(s.file);
  if (cp.coefficients.empty()) throw IoError("checkpoint " + s.file + " has no snapshots");
  const SpacePtr src = Space::make(cp.domain);
  return transfer(SpectralField(src, cp.coefficients.back()), space);
}

}  // namespace sllb

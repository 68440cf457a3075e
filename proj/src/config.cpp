#include "wassinc/config.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "wassinc/catalog.hpp"
#include "wassinc/errors.hpp"
#include "wassinc/rng.hpp"

namespace wassinc {

namespace {

using nlohmann::json;

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be an object", path));
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(fmt::format("unknown key '{}{}{}'", path, path.empty() ? "" : ".", key));
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(fmt::format("missing key '{}'", join(path, key)));
  return j.at(key);
}

double as_number(const json& v, const std::string& name) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw ConfigError(fmt::format("'{}' must be a number", name));
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& name) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(fmt::format("'{}' must be a nonnegative integer", name));
  }
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(fmt::format("'{}' must be a string", name));
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError(fmt::format("'{}' must be a boolean", name));
  return v.get<bool>();
}

std::vector<double> as_numbers(const json& v, const std::string& name) {
  if (!v.is_array()) return {as_number(v, name)};
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], fmt::format("{}[{}]", name, i)));
  return out;
}

Point as_point(const json& v, std::size_t dim, const std::string& name) {
  const std::vector<double> values = as_numbers(v, name);
  if (values.size() != dim) {
    throw ConfigError(fmt::format("'{}' must have {} coordinates (got {})", name, dim, values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(dim));
}

PiecewiseConstant parse_rate(const json& v, double horizon, const std::string& name) {
  if (v.is_number()) {
    const double value = v.get<double>();
    if (!(value >= 0.0) || !std::isfinite(value)) throw ConfigError(fmt::format("'{}' must be finite and >= 0", name));
    return PiecewiseConstant::constant(horizon, value);
  }
  allow_keys(v, name, {"breakpoints", "values"});
  const std::vector<double> breaks = as_numbers(require(v, name, "breakpoints"), join(name, "breakpoints"));
  const std::vector<double> values = as_numbers(require(v, name, "values"), join(name, "values"));
  if (breaks.empty() || breaks.front() != 0.0 || breaks.back() < horizon) {
    throw ConfigError(fmt::format("'{}.breakpoints' must cover [0, T]", name));
  }
  try {
    return PiecewiseConstant(breaks, values);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("'{}': {}", name, e.what()));
  }
}

RateFunctions parse_rates(const json& j, const std::string& path, double horizon) {
  const std::string name = join(path, "rates");
  const json& r = require(j, path, "rates");
  allow_keys(r, name, {"m", "l", "L"});
  return {parse_rate(require(r, name, "m"), horizon, join(name, "m")),
          parse_rate(require(r, name, "l"), horizon, join(name, "l")),
          parse_rate(require(r, name, "L"), horizon, join(name, "L"))};
}

FieldSpec parse_field(const json& j, const std::string& path, double horizon) {
  allow_keys(j, path, {"label", "rates", "growth"});
  FieldSpec spec;
  spec.label = as_string(require(j, path, "label"), join(path, "label"));
  spec.rates = parse_rates(j, path, horizon);
  if (j.contains("growth")) {
    const std::string g = as_string(j.at("growth"), join(path, "growth"));
    if (g == "local") {
      spec.growth = Growth::kLocal;
    } else if (g == "with_moment") {
      spec.growth = Growth::kWithMoment;
    } else {
      throw ConfigError(fmt::format("'{}' must be 'local' or 'with_moment' (got '{}')", join(path, "growth"), g));
    }
  }
  return spec;
}

SamplerSpec parse_sampler(const json& j, const std::string& path, std::size_t dim) {
  allow_keys(j, path, {"kind", "mean", "sigma", "low", "high", "gap", "fraction", "points"});
  SamplerSpec s;
  s.kind = as_string(require(j, path, "kind"), join(path, "kind"));
  if (s.kind == "gaussian") {
    if (j.contains("mean")) s.mean = as_numbers(j.at("mean"), join(path, "mean"));
    if (j.contains("sigma")) s.sigma = as_number(j.at("sigma"), join(path, "sigma"));
  } else if (s.kind == "uniform") {
    s.low = as_numbers(require(j, path, "low"), join(path, "low"));
    s.high = as_numbers(require(j, path, "high"), join(path, "high"));
  } else if (s.kind == "two_clusters") {
    s.gap = as_number(require(j, path, "gap"), join(path, "gap"));
    if (j.contains("sigma")) s.sigma = as_number(j.at("sigma"), join(path, "sigma"));
    if (j.contains("fraction")) s.fraction = as_number(j.at("fraction"), join(path, "fraction"));
    if (!(s.fraction >= 0.0 && s.fraction <= 1.0)) {
      throw ConfigError(fmt::format("'{}' must lie in [0, 1]", join(path, "fraction")));
    }
  } else if (s.kind == "atoms") {
    const json& pts = require(j, path, "points");
    if (!pts.is_array() || pts.empty()) throw ConfigError(fmt::format("'{}' must be a nonempty array", join(path, "points")));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s.atoms.push_back(as_point(pts[i], dim, fmt::format("{}[{}]", join(path, "points"), i)));
    }
  } else {
    throw ConfigError(fmt::format("unknown sampler '{}' in '{}'", s.kind, join(path, "kind")));
  }
  if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) throw ConfigError(fmt::format("'{}' must be >= 0", join(path, "sigma")));
  return s;
}

FamilySpec parse_family(const json& j, double horizon, std::size_t dim) {
  const std::string path = "family";
  allow_keys(j, path, {"kind", "controls", "field", "gains", "rates"});
  FamilySpec f;
  f.kind = as_string(require(j, path, "kind"), "family.kind");
  if (f.kind == "constants") {
    const json& c = require(j, path, "controls");
    if (!c.is_array() || c.empty()) throw ConfigError("'family.controls' must be a nonempty array");
    for (std::size_t i = 0; i < c.size(); ++i) f.controls.push_back(as_point(c[i], dim, fmt::format("family.controls[{}]", i)));
  } else if (f.kind == "gain") {
    f.field = parse_field(require(j, path, "field"), "family.field", horizon);
    f.gains = as_numbers(require(j, path, "gains"), "family.gains");
  } else {
    throw ConfigError(fmt::format("unknown family kind '{}' in 'family.kind'", f.kind));
  }
  f.rates = parse_rates(j, path, horizon);
  return f;
}

ExperimentSpec parse_experiment(const json& j) {
  const std::string path = "experiment";
  allow_keys(j, path,
             {"kind", "verify", "n", "substeps", "strategy", "n_list", "R", "delta", "tol", "max_iter", "q",
              "weight_steps", "relaxed_control", "policy", "rescale", "samples", "include_error_term"});
  ExperimentSpec e;
  e.kind = as_string(require(j, path, "kind"), "experiment.kind");
  auto count = [&](const char* key, std::size_t& out) {
    if (j.contains(key)) out = as_count(j.at(key), join(path, key));
  };
  count("n", e.n);
  count("substeps", e.substeps);
  count("max_iter", e.max_iter);
  count("q", e.q);
  count("weight_steps", e.weight_steps);
  count("samples", e.samples);
  if (j.contains("verify")) e.verify = as_string(j.at("verify"), "experiment.verify");
  if (j.contains("strategy")) e.strategy = as_string(j.at("strategy"), "experiment.strategy");
  if (j.contains("policy")) e.policy = as_string(j.at("policy"), "experiment.policy");
  if (j.contains("n_list")) {
    const json& list = j.at("n_list");
    if (!list.is_array()) throw ConfigError("'experiment.n_list' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) e.n_list.push_back(as_count(list[i], fmt::format("experiment.n_list[{}]", i)));
  }
  if (j.contains("R")) e.R = as_numbers(j.at("R"), "experiment.R");
  if (j.contains("delta")) e.delta = as_number(j.at("delta"), "experiment.delta");
  if (j.contains("tol")) e.tol = as_number(j.at("tol"), "experiment.tol");
  if (j.contains("relaxed_control")) e.relaxed_control = as_numbers(j.at("relaxed_control"), "experiment.relaxed_control");
  if (j.contains("rescale")) e.rescale = as_bool(j.at("rescale"), "experiment.rescale");
  if (j.contains("include_error_term")) e.include_error_term = as_bool(j.at("include_error_term"), "experiment.include_error_term");
  return e;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("invalid JSON: {}", e.what()));
  }
  allow_keys(j, "", {"p", "T", "d", "N", "seed", "steps", "dt", "method", "slack", "initial", "reference_initial",
                     "field", "reference_field", "family", "experiment"});
  ScenarioConfig c;
  if (j.contains("p")) c.p = as_number(j.at("p"), "p");
  if (j.contains("T")) c.T = as_number(j.at("T"), "T");
  if (j.contains("d")) c.d = as_count(j.at("d"), "d");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("slack")) c.slack = as_number(j.at("slack"), "slack");
  if (!(c.p >= 1.0) || !std::isfinite(c.p)) throw ConfigError(fmt::format("'p' must be >= 1 (got {})", c.p));
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError(fmt::format("'T' must be > 0 (got {})", c.T));
  if (c.d == 0) throw ConfigError("'d' must be >= 1");
  if (!(c.slack >= 0.0)) throw ConfigError("'slack' must be >= 0");

  if (j.contains("steps") && j.contains("dt")) throw ConfigError("give either 'steps' or 'dt', not both");
  if (j.contains("steps")) c.steps = as_count(j.at("steps"), "steps");
  if (j.contains("dt")) {
    const double dt = as_number(j.at("dt"), "dt");
    if (!(dt > 0.0)) throw ConfigError("'dt' must be > 0");
    const double ratio = c.T / dt;
    c.steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(c.steps)) > 1e-9 * ratio) {
      throw ConfigError(fmt::format("'dt' = {} does not divide T = {}", dt, c.T));
    }
  }
  if (c.steps == 0) throw ConfigError("'steps' must be >= 1");
  if (j.contains("method")) {
    const std::string m = as_string(j.at("method"), "method");
    if (m == "euler") {
      c.method = Method::kEuler;
    } else if (m == "rk4") {
      c.method = Method::kRk4;
    } else {
      throw ConfigError(fmt::format("'method' must be 'euler' or 'rk4' (got '{}')", m));
    }
  }

  c.initial = parse_sampler(require(j, "", "initial"), "initial", c.d);
  if (j.contains("N")) {
    c.N = as_count(j.at("N"), "N");
  } else if (c.initial.kind == "atoms") {
    c.N = c.initial.atoms.size();
  }
  if (c.N == 0) throw ConfigError("'N' must be >= 1");
  if (j.contains("reference_initial")) c.reference_initial = parse_sampler(j.at("reference_initial"), "reference_initial", c.d);
  if (j.contains("field")) c.field = parse_field(j.at("field"), "field", c.T);
  if (j.contains("reference_field")) c.reference_field = parse_field(j.at("reference_field"), "reference_field", c.T);
  if (j.contains("family")) c.family = parse_family(j.at("family"), c.T, c.d);
  c.experiment = parse_experiment(require(j, "", "experiment"));
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ParticleCloud sample_cloud(const SamplerSpec& spec, std::size_t dim, std::size_t count, std::uint64_t seed,
                           std::uint64_t stream) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
  auto broadcast = [&](const std::vector<double>& v, double fallback, std::size_t c, const char* name) {
    if (v.empty()) return fallback;
    if (v.size() == 1) return v.front();
    if (v.size() != dim) throw ConfigError(fmt::format("sampler '{}' needs 1 or {} values", name, dim));
    return v[c];
  };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      const std::uint64_t counter = i * dim + c;
      double x = 0.0;
      if (spec.kind == "gaussian") {
        x = broadcast(spec.mean, 0.0, c, "mean") + spec.sigma * rng::normal(seed, stream, counter);
      } else if (spec.kind == "uniform") {
        const double lo = broadcast(spec.low, 0.0, c, "low");
        const double hi = broadcast(spec.high, 1.0, c, "high");
        x = lo + (hi - lo) * rng::uniform(seed, stream, counter);
      } else if (spec.kind == "two_clusters") {
        const auto far = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(count)));
        const double center = i + far >= count ? (1.0 - spec.fraction) * spec.gap : -spec.fraction * spec.gap;
        x = (c == 0 ? center : 0.0) + spec.sigma * rng::normal(seed, stream, counter);
      } else if (spec.kind == "atoms") {
        if (spec.atoms.size() != count) {
          throw ConfigError(fmt::format("atoms sampler lists {} points but N = {}", spec.atoms.size(), count));
        }
        x = spec.atoms[i][static_cast<Eigen::Index>(c)];
      } else {
        throw ConfigError(fmt::format("unknown sampler '{}'", spec.kind));
      }
      pts(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = x;
    }
  }
  return ParticleCloud(std::move(pts));
}

NonlocalField build_field(const FieldSpec& spec, std::size_t dim, double horizon) {
  NonlocalField f = catalog::field(spec.label, dim, horizon);
  f.rates = spec.rates;
  if (spec.growth) f.growth = *spec.growth;
  return f;
}

ControlledFamily build_family(const FamilySpec& spec, std::size_t dim, double horizon) {
  ControlledFamily f;
  if (spec.kind == "constants") {
    f = catalog::constants_family(spec.controls, horizon);
  } else if (spec.kind == "gain") {
    if (!spec.field) throw ConfigError("gain family needs 'family.field'");
    if (spec.gains.empty()) throw ConfigError("gain family needs at least one gain");
    f = catalog::gain_family(build_field(*spec.field, dim, horizon), spec.gains);
  } else {
    throw ConfigError(fmt::format("unknown family kind '{}'", spec.kind));
  }
  f.rates = spec.rates;
  return f;
}

}  // namespace wassinc

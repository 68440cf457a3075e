#include "wassinc/catalog.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "wassinc/errors.hpp"

namespace wassinc::catalog {

namespace {

double parse_number(std::string_view text, const std::string& label) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ConfigError(fmt::format("field label '{}': cannot parse number '{}'", label, text));
  }
  return value;
}

std::vector<double> parse_list(std::string_view text, const std::string& label) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma), label));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

NonlocalField make(std::string label, FieldRule rule, RateFunctions rates, Growth growth, bool measure_dependent) {
  NonlocalField f;
  f.label = std::move(label);
  f.rule = std::move(rule);
  f.rates = std::move(rates);
  f.growth = growth;
  f.measure_dependent = measure_dependent;
  return f;
}

}  // namespace

std::vector<std::string> field_labels() {
  return {"zero", "constant:<c1,...,cd>", "linear_decay", "mean_attraction:<k>", "bounded_kernel", "rotation"};
}

NonlocalField field(const std::string& label, std::size_t dim, double horizon) {
  if (dim == 0) throw ConfigError("field dimension must be >= 1");
  const auto colon = label.find(':');
  const std::string name = label.substr(0, colon);
  const std::string_view arg =
      colon == std::string::npos ? std::string_view{} : std::string_view(label).substr(colon + 1);
  const bool has_arg = colon != std::string::npos;
  auto require_no_arg = [&] {
    if (has_arg) throw ConfigError(fmt::format("field label '{}' takes no parameter", label));
  };

  if (name == "zero") {
    require_no_arg();
    return make(label, [](double, const ParticleCloud&, PointRef x) -> Point { return Point::Zero(x.size()); },
                RateFunctions::constant(horizon, 0, 0, 0), Growth::kLocal, false);
  }
  if (name == "constant") {
    if (!has_arg) throw ConfigError(fmt::format("field label '{}' needs a vector, e.g. constant:1,0", label));
    const std::vector<double> c = parse_list(arg, label);
    if (c.size() != dim) {
      throw ConfigError(fmt::format("field label '{}' has {} components but d = {}", label, c.size(), dim));
    }
    const Point value = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    return make(label, [value](double, const ParticleCloud&, PointRef) -> Point { return value; },
                RateFunctions::constant(horizon, euclidean_norm(value), 0, 0), Growth::kLocal, false);
  }
  if (name == "linear_decay") {
    require_no_arg();
    return make(label, [](double, const ParticleCloud&, PointRef x) -> Point { return -x; },
                RateFunctions::constant(horizon, 1, 1, 0), Growth::kLocal, false);
  }
  if (name == "mean_attraction") {
    if (!has_arg) throw ConfigError(fmt::format("field label '{}' needs a gain, e.g. mean_attraction:1", label));
    const double kappa = parse_number(arg, label);
    if (kappa < 0.0) throw ConfigError(fmt::format("field label '{}': gain must be >= 0", label));
    // |k(mean - x)| <= k (M_1(mu) + |x|); mean is 1-Lipschitz in W_1.
    return make(label,
                [kappa](double, const ParticleCloud& mu, PointRef x) -> Point { return kappa * (mu.mean() - x); },
                RateFunctions::constant(horizon, kappa, kappa, kappa), Growth::kWithMoment, true);
  }
  if (name == "bounded_kernel") {
    require_no_arg();
    // z / (1 + |z|) is bounded by 1 and 1-Lipschitz.
    return make(label,
                [](double, const ParticleCloud& mu, PointRef x) -> Point {
                  Point acc = Point::Zero(x.size());
                  for (std::size_t j = 0; j < mu.size(); ++j) {
                    const Point z = x - mu.point(j);
                    acc -= z / (1.0 + euclidean_norm(z));
                  }
                  return acc / static_cast<double>(mu.size());
                },
                RateFunctions::constant(horizon, 1, 1, 1), Growth::kLocal, true);
  }
  if (name == "rotation") {
    require_no_arg();
    if (dim != 2) throw ConfigError(fmt::format("field 'rotation' needs d = 2 (got d = {})", dim));
    return make(label,
                [](double, const ParticleCloud&, PointRef x) -> Point {
                  Point v(2);
                  v << -x[1], x[0];
                  return v;
                },
                RateFunctions::constant(horizon, 1, 1, 0), Growth::kLocal, false);
  }
  throw ConfigError(fmt::format("unknown field label '{}'", label));
}

ControlledFamily constants_family(const std::vector<Point>& velocities, double horizon) {
  if (velocities.empty()) throw DomainError("constants family needs at least one control");
  ControlledFamily family;
  family.label = "constants";
  double bound = 0.0;
  for (const auto& v : velocities) {
    if (v.size() != velocities.front().size()) throw ShapeError("constant controls must share dimension");
    bound = std::max(bound, euclidean_norm(v));
    std::string name;
    for (Eigen::Index k = 0; k < v.size(); ++k) name += fmt::format("{}{}", k ? "," : "", v[k]);
    family.controls.push_back(std::move(name));
  }
  family.rule = [velocities](double, const ParticleCloud&, std::size_t u, PointRef) -> Point { return velocities[u]; };
  family.rates = RateFunctions::constant(horizon, bound, 0, 0);
  family.convex_images = velocities.size() == 1;
  family.measure_dependent = false;
  family.growth = Growth::kLocal;
  return family;
}

ControlledFamily gain_family(const NonlocalField& base, const std::vector<double>& gains) {
  if (gains.empty()) throw DomainError("gain family needs at least one control");
  ControlledFamily family;
  family.label = "gain(" + base.label + ")";
  double bound = 0.0;
  for (double g : gains) {
    bound = std::max(bound, std::abs(g));
    family.controls.push_back(fmt::format("{}", g));
  }
  family.rule = [rule = base.rule, gains](double t, const ParticleCloud& mu, std::size_t u, PointRef x) -> Point {
    return gains[u] * rule(t, mu, x);
  };
  family.rates = {base.rates.m.scaled(bound), base.rates.l.scaled(bound), base.rates.L.scaled(bound)};
  family.convex_images = gains.size() == 1;
  family.measure_dependent = base.measure_dependent;
  family.growth = base.growth;
  return family;
}

}  // namespace wassinc::catalog

#include "wassinc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "wassinc/bounds.hpp"
#include "wassinc/errors.hpp"
#include "wassinc/rng.hpp"

namespace wassinc {

bool BoundReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [&](const BoundRow& r) { return r.margin() >= -slack * r.bound; });
}

double BoundReport::min_margin() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) out = std::min(out, r.margin());
  return out;
}

double BoundReport::constant(const std::string& name) const {
  for (const auto& [key, value] : constants) {
    if (key == name) return value;
  }
  throw std::out_of_range(fmt::format("report has no constant '{}'", name));
}

namespace {

void check_setup(const SimulationSetup& setup) {
  if (setup.grid.size() < 2) throw ShapeError("verification needs at least one time step");
  if (!(setup.slack >= 0.0)) throw DomainError("slack must be >= 0");
}

// Step integrals of the effective growth rate: m, or m (1 + M) with M the
// largest moment of the curve over [t_k - delay, t_{k+1}] when growth depends
// on the moment.
std::vector<double> effective_rate_steps(const PiecewiseConstant& m, bool with_moment, std::span<const double> grid,
                                         const std::vector<double>& moments, double delay = 0.0) {
  std::vector<double> steps(grid.size() - 1);
  std::size_t first = 0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double base = m.integral(grid[k], grid[k + 1]);
    if (!with_moment) {
      steps[k] = base;
      continue;
    }
    while (first < k && grid[first + 1] <= grid[k] - delay) ++first;
    const double window = *std::max_element(moments.begin() + static_cast<std::ptrdiff_t>(first),
                                            moments.begin() + static_cast<std::ptrdiff_t>(k) + 2);
    steps[k] = base * (1.0 + window);
  }
  return steps;
}

std::vector<double> cumulative(const std::vector<double>& steps) {
  std::vector<double> out(steps.size() + 1, 0.0);
  for (std::size_t k = 0; k < steps.size(); ++k) out[k + 1] = out[k] + steps[k];
  return out;
}

std::vector<double> momentum_bounds(const RateFunctions& rates, Growth growth, double p,
                                    std::span<const double> grid, const std::vector<double>& moments, double delay) {
  const std::vector<double> extra =
      cumulative(effective_rate_steps(rates.m, growth == Growth::kWithMoment, grid, moments, delay));
  std::vector<double> bound(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bound[k] = bounds::momentum_bound(p, moments.front(), extra[k], rates.m.integral(0.0, grid[k]));
  }
  return bound;
}

double ratio(double numerator, double denominator) {
  if (denominator > 0.0) return numerator / denominator;
  return numerator <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

BoundReport momentum_report(const Trajectory& trajectory, const RateFunctions& rates, Growth growth, double p,
                            double slack, double delay) {
  const std::vector<double> moments = trajectory.moments(p);
  const std::vector<double> bound = momentum_bounds(rates, growth, p, trajectory.grid(), moments, delay);
  BoundReport report{"momentum", {}, {}, slack};
  for (std::size_t k = 0; k < trajectory.nodes(); ++k) report.rows.push_back({trajectory.grid()[k], moments[k], bound[k]});
  report.constants = {{"C_p", bounds::transport_constant(p)},
                      {"C_p_prime", bounds::exponent_constant(p)},
                      {"initial_moment", moments.front()},
                      {"m_norm", rates.m.integral(0.0, trajectory.horizon())}};
  return report;
}

BoundReport verify_momentum(const NonlocalField& field, const ParticleCloud& start, const SimulationSetup& setup) {
  check_setup(setup);
  const Trajectory traj = integrate(field, start, setup.grid, setup.method);
  return momentum_report(traj, field.rates, field.growth, setup.p, setup.slack);
}

BoundReport verify_equi_integrability(const NonlocalField& field, const ParticleCloud& start,
                                      const SimulationSetup& setup, std::span<const double> radii) {
  check_setup(setup);
  if (radii.empty()) throw DomainError("equi_integrability needs at least one radius");
  const Trajectory traj = integrate(field, start, setup.grid, setup.method);
  const std::vector<double> moments = traj.moments(setup.p);
  const std::vector<double> m_eff = cumulative(
      effective_rate_steps(field.rates.m, field.growth == Growth::kWithMoment, setup.grid, moments));
  BoundReport report{"equi_integrability", {}, {}, setup.slack};
  for (double R : radii) {
    if (!(R > 0.0)) throw DomainError(fmt::format("equi_integrability radius must be > 0 (got {})", R));
    for (std::size_t k = 0; k < setup.grid.size(); ++k) {
      const double c_t = bounds::path_constant(m_eff[k]);
      const double measured = tail_norm(traj.cloud(k), R, setup.p, false);
      const double bound = c_t * tail_norm(start, R / c_t - 1.0, setup.p, true);
      report.rows.push_back({setup.grid[k], measured, bound});
    }
  }
  report.constants = {{"C_T", bounds::path_constant(m_eff.back())}, {"m_eff_norm", m_eff.back()}};
  return report;
}

BoundReport verify_abs_continuity(const NonlocalField& field, const ParticleCloud& start,
                                  const SimulationSetup& setup) {
  check_setup(setup);
  const Trajectory traj = integrate(field, start, setup.grid, setup.method);
  const std::vector<double> moments = traj.moments(setup.p);
  const std::vector<double> bound = momentum_bounds(field.rates, field.growth, setup.p, setup.grid, moments, 0.0);
  const double B = *std::max_element(bound.begin(), bound.end());
  const double c_p = 1.0 + 2.0 * B;
  BoundReport report{"abs_continuity", {}, {}, setup.slack};
  const auto& grid = setup.grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    BoundRow worst{grid[k], 0.0, 0.0};
    for (std::size_t j = 0; j < k; ++j) {
      const double measured = wasserstein_distance(traj.cloud(j), traj.cloud(k), setup.p);
      const BoundRow row{grid[k], measured, c_p * field.rates.m.integral(grid[j], grid[k])};
      if (j == 0 || row.margin() < worst.margin()) worst = row;
    }
    report.rows.push_back(worst);
  }
  report.constants = {{"c_p", c_p}, {"momentum_bound", B}};
  return report;
}

BoundReport verify_stability(const StabilityInputs& in, const SimulationSetup& setup) {
  check_setup(setup);
  if (in.v == nullptr || in.w == nullptr || in.mu0 == nullptr || in.nu0 == nullptr) {
    throw ShapeError("stability check needs two fields and two initial clouds");
  }
  if (!(in.R > 0.0)) throw DomainError(fmt::format("localisation radius must be > 0 (got {})", in.R));
  const bool local = std::isfinite(in.R);
  const auto& grid = setup.grid;
  const Trajectory mu = integrate(*in.v, *in.mu0, grid, setup.method);
  const Trajectory nu = integrate(*in.w, *in.nu0, grid, setup.method);

  std::vector<double> gap(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ParticleCloud& at = nu.cloud(k);
    for (std::size_t j = 0; j < at.size(); ++j) {
      const auto y = at.point(j);
      if (euclidean_norm(y) > in.R) continue;
      gap[k] = std::max(gap[k], euclidean_distance((*in.v)(grid[k], mu.cloud(k), y), (*in.w)(grid[k], at, y)));
    }
  }
  const std::vector<double> gap_integral = bounds::cumulative_left(grid, gap);

  const bool with_moment = in.v->growth == Growth::kWithMoment || in.w->growth == Growth::kWithMoment;
  const std::vector<double> mu_moments = mu.moments(setup.p);
  const std::vector<double> nu_moments = nu.moments(setup.p);
  std::vector<double> moments(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) moments[k] = std::max(mu_moments[k], nu_moments[k]);
  const PiecewiseConstant m = PiecewiseConstant::max(in.v->rates.m, in.w->rates.m);
  const std::vector<double> m_eff = cumulative(effective_rate_steps(m, with_moment, grid, moments));
  const double c_t = bounds::path_constant(m_eff.back());

  const double Cp = bounds::transport_constant(setup.p);
  const double Cpp = bounds::exponent_constant(setup.p);
  const double w0 = wasserstein_distance(*in.mu0, *in.nu0, setup.p);
  BoundReport report{local ? "gronwall_local" : "gronwall_global", {}, {}, setup.slack};
  double last_error = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double error = 0.0;
    if (local && in.include_error_term) {
      error = bounds::localisation_error(*in.nu0, setup.p, in.R, c_t, m_eff[k]);
    }
    last_error = error;
    const double l_norm = in.v->rates.l.integral(0.0, grid[k]);
    const double additive = w0 + gap_integral[k] + error;
    const double bound = additive == 0.0 ? 0.0 : Cp * additive * std::exp(Cpp * std::pow(l_norm, setup.p));
    report.rows.push_back({grid[k], wasserstein_distance(mu.cloud(k), nu.cloud(k), setup.p), bound});
  }
  report.constants = {{"C_p", Cp}, {"C_p_prime", Cpp}, {"R", in.R}, {"C_T", c_t}, {"error_term_T", last_error}};
  return report;
}

BoundReport verify_hypotheses(std::span<const NonlocalField> members, const ParticleCloud& start,
                              const SimulationSetup& setup, std::size_t samples, std::uint64_t seed) {
  check_setup(setup);
  if (members.empty()) throw ShapeError("hypotheses probe needs at least one field");
  const auto& grid = setup.grid;
  const Trajectory traj = integrate(members.front(), start, grid, setup.method);
  const std::size_t per_time = (std::max<std::size_t>(samples, 1000) + grid.size() - 1) / grid.size();
  const std::size_t d = start.dim();
  const std::size_t n = start.size();

  BoundReport report{"hypotheses_probe", {}, {}, setup.slack};
  double worst_m = 0.0;
  double worst_l = 0.0;
  double worst_L = 0.0;
  std::uint64_t counter = 0;
  auto normal = [&](std::uint64_t stream) { return rng::normal(seed, stream, counter++); };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const ParticleCloud& mu = traj.cloud(k);
    const double scale = 1.0 + mu.max_norm();
    const double moment_mu = moment(mu, setup.p);
    double worst_here = 0.0;
    for (std::size_t s = 0; s < per_time; ++s) {
      const auto atom = static_cast<Eigen::Index>(rng::index(seed, 3, counter++, n));
      Point x = mu.points().col(atom);
      Point y = x;
      for (std::size_t c = 0; c < d; ++c) {
        x[static_cast<Eigen::Index>(c)] += scale * normal(4);
        y[static_cast<Eigen::Index>(c)] = x[static_cast<Eigen::Index>(c)] + 0.1 * scale * normal(5);
      }
      Eigen::MatrixXd shifted = mu.points();
      for (Eigen::Index i = 0; i < shifted.size(); ++i) shifted.data()[i] += 0.1 * scale * normal(6);
      const ParticleCloud nu(std::move(shifted));
      const double w = wasserstein_distance(mu, nu, setup.p);
      for (const NonlocalField& f : members) {
        const Point vx = f(t, mu, x);
        const double growth_scale = f.growth == Growth::kWithMoment ? 1.0 + euclidean_norm(x) + moment_mu
                                                                    : 1.0 + euclidean_norm(x);
        const double r_m = ratio(euclidean_norm(vx), f.rates.m(t) * growth_scale);
        const double r_l = ratio(euclidean_distance(vx, f(t, mu, y)), f.rates.l(t) * euclidean_distance(x, y));
        const double r_L = ratio(euclidean_distance(vx, f(t, nu, x)), f.rates.L(t) * w);
        worst_m = std::max(worst_m, r_m);
        worst_l = std::max(worst_l, r_l);
        worst_L = std::max(worst_L, r_L);
        worst_here = std::max({worst_here, r_m, r_l, r_L});
      }
    }
    report.rows.push_back({t, worst_here, 1.0});
  }
  report.constants = {{"samples", static_cast<double>(per_time * grid.size())},
                      {"max_ratio_m", worst_m},
                      {"max_ratio_l", worst_l},
                      {"max_ratio_L", worst_L}};
  return report;
}

}  // namespace wassinc

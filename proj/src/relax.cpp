#include "wassinc/relax.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "wassinc/bounds.hpp"
#include "wassinc/errors.hpp"

namespace wassinc {

bool ChatteringControl::pure() const {
  return std::count_if(numerators.begin(), numerators.end(), [](std::size_t n) { return n > 0; }) == 1;
}

namespace {

// Compositions of `total` into `parts` nonnegative parts, first part descending.
void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t first = total + 1; first-- > 0;) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

void index_tuples(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (prefix.size() == k) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t i = from; i + (k - prefix.size()) <= n; ++i) {
    prefix.push_back(i);
    index_tuples(n, k, i + 1, prefix, out);
    prefix.pop_back();
  }
}

std::string control_name(const ChatteringControl& c, const std::vector<std::string>& base_names) {
  std::string name;
  for (std::size_t j = 0; j < c.base_indices.size(); ++j) {
    if (c.numerators[j] == 0) continue;
    if (!name.empty()) name += "+";
    name += fmt::format("{}/{}*{}", c.numerators[j], c.steps, base_names[c.base_indices[j]]);
  }
  return name;
}

double tolerance(const std::vector<double>& grid) { return 1e-12 * std::max(1.0, std::abs(grid.back())); }

std::size_t nearest_node(const std::vector<double>& grid, double t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.end()) return grid.size() - 1;
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  if (hi == 0) return 0;
  return (t - grid[hi - 1] <= grid[hi] - t) ? hi - 1 : hi;
}

// Smallest R with tail_norm(start, R / C_T - 1, p, shifted) <= target.
double radius_for_tail(const ParticleCloud& start, double p, double path_const, double target) {
  if (!std::isfinite(path_const)) return std::numeric_limits<double>::infinity();
  std::vector<double> norms(start.size());
  for (std::size_t i = 0; i < start.size(); ++i) norms[i] = euclidean_norm(start.point(i));
  std::sort(norms.begin(), norms.end());
  const double n = static_cast<double>(norms.size());
  std::vector<double> suffix(norms.size() + 1, 0.0);
  for (std::size_t i = norms.size(); i-- > 0;) suffix[i] = suffix[i + 1] + std::pow(1.0 + norms[i], p);
  double threshold = 0.0;
  for (std::size_t k = 0; k <= norms.size(); ++k) {
    if (k > 0 && k < norms.size() && norms[k - 1] == norms[k]) continue;
    if (std::pow(suffix[k] / n, 1.0 / p) <= target) {
      threshold = k == 0 ? 0.0 : std::nextafter(norms[k - 1], std::numeric_limits<double>::infinity());
      break;
    }
  }
  double radius = path_const * (1.0 + threshold);
  for (int guard = 0; guard < 64 && tail_norm(start, radius / path_const - 1.0, p, true) > target; ++guard) {
    radius = std::nextafter(radius, std::numeric_limits<double>::infinity()) * (1.0 + 1e-15);
  }
  return radius;
}

// Particle-wise linear interpolation, exact for Euler paths.
ParticleCloud interpolate(const Trajectory& traj, double t) {
  const std::size_t k = traj.node_at(t);
  if (k + 1 >= traj.nodes() || t <= traj.grid()[k]) return traj.cloud(k);
  const double s = (t - traj.grid()[k]) / (traj.grid()[k + 1] - traj.grid()[k]);
  return ParticleCloud((1.0 - s) * traj.cloud(k).points() + s * traj.cloud(k + 1).points());
}

}  // namespace

ConvexifiedFamily convexify(const ControlledFamily& family, std::size_t q, std::size_t weight_steps) {
  if (q == 0) throw DomainError("convexify needs q >= 1");
  if (weight_steps == 0) throw DomainError("convexify needs weight_steps >= 1");
  if (family.size() == 0) throw DomainError("convexify needs a nonempty family");
  const std::size_t k = std::min(q, family.size());

  std::vector<std::vector<std::size_t>> tuples;
  std::vector<std::size_t> prefix;
  index_tuples(family.size(), k, 0, prefix, tuples);
  std::vector<std::vector<std::size_t>> weights;
  compositions(weight_steps, k, prefix, weights);

  ConvexifiedFamily out;
  out.base_size = family.size();
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  for (const auto& tuple : tuples) {
    for (const auto& w : weights) {
      std::vector<std::pair<std::size_t, std::size_t>> key;
      for (std::size_t j = 0; j < k; ++j) {
        if (w[j] > 0) key.emplace_back(tuple[j], w[j]);
      }
      if (!seen.insert(key).second) continue;
      out.chattering.push_back(ChatteringControl{tuple, w, weight_steps});
    }
  }

  ControlledFamily& f = out.family;
  f.label = fmt::format("co{}x{}({})", k, weight_steps, family.label);
  for (const auto& c : out.chattering) f.controls.push_back(control_name(c, family.controls));
  f.rates = family.rates;
  f.convex_images = true;
  f.measure_dependent = family.measure_dependent;
  f.growth = family.growth;
  f.rule = [base = family.rule, table = out.chattering](double t, const ParticleCloud& measure, std::size_t u,
                                                         PointRef x) -> Point {
    const ChatteringControl& c = table.at(u);
    Point sum;
    bool first = true;
    for (std::size_t j = 0; j < c.base_indices.size(); ++j) {
      if (c.numerators[j] == 0) continue;
      if (c.numerators[j] == c.steps) return base(t, measure, c.base_indices[j], x);
      const Point term = c.weight(j) * base(t, measure, c.base_indices[j], x);
      if (first) {
        sum = term;
        first = false;
      } else {
        sum += term;
      }
    }
    return sum;
  };
  return out;
}

AumannRealization aumann_realize(const ControlSignal& chattering_signal, const ConvexifiedFamily& convexified,
                                 std::span<const double> blocks) {
  chattering_signal.check_against(convexified.family);
  const std::vector<double>& fine = chattering_signal.grid();
  const double eps = tolerance(fine);
  if (blocks.size() < 2) throw ShapeError("aumann_realize needs at least one block");
  if (std::abs(blocks.front() - fine.front()) > eps || std::abs(blocks.back() - fine.back()) > eps) {
    throw ShapeError("blocks must span the signal grid");
  }

  AumannRealization out{chattering_signal, {}, {}, {}, {}};
  std::vector<std::size_t> nodes{0};
  for (std::size_t b = 1; b + 1 < blocks.size(); ++b) {
    const std::size_t node = nearest_node(fine, blocks[b]);
    if (std::abs(fine[node] - blocks[b]) > eps) out.snapped.push_back({blocks[b], fine[node]});
    if (node > nodes.back()) nodes.push_back(node);
  }
  if (fine.size() - 1 > nodes.back()) nodes.push_back(fine.size() - 1);

  std::vector<double> grid{fine.front()};
  std::vector<std::size_t> indices;
  for (std::size_t b = 0; b + 1 < nodes.size(); ++b) {
    const std::size_t lo = nodes[b];
    const std::size_t hi = nodes[b + 1];
    // Majority by time; ties go to the lowest index.
    std::map<std::size_t, double> share;
    for (std::size_t k = lo; k < hi; ++k) share[chattering_signal.indices()[k]] += fine[k + 1] - fine[k];
    std::size_t control = share.begin()->first;
    double longest = share.begin()->second;
    for (const auto& [u, len] : share) {
      if (len > longest) {
        control = u;
        longest = len;
      }
    }
    if (share.size() > 1) out.reblocked.push_back(b);
    out.blocks.push_back(fine[lo]);
    out.block_controls.push_back(control);

    const ChatteringControl& c = convexified.chattering[control];
    const double a = fine[lo];
    const double h = fine[hi] - a;
    std::vector<double> splits;  // interior split points
    std::vector<std::size_t> segment_base;
    std::size_t cumulative = 0;
    for (std::size_t j = 0; j < c.base_indices.size(); ++j) {
      if (c.numerators[j] == 0) continue;
      segment_base.push_back(c.base_indices[j]);
      cumulative += c.numerators[j];
      if (cumulative < c.steps) {
        splits.push_back(a + h * static_cast<double>(cumulative) / static_cast<double>(c.steps));
      }
    }

    std::vector<double> points(fine.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                               fine.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    for (double s : splits) {
      const std::size_t near = nearest_node(fine, s);
      if (std::abs(fine[near] - s) > eps) points.push_back(s);
    }
    std::sort(points.begin(), points.end());
    for (double right : points) {
      const double left = grid.back();
      const double mid = 0.5 * (left + right);
      const auto seg = static_cast<std::size_t>(std::upper_bound(splits.begin(), splits.end(), mid) - splits.begin());
      grid.push_back(right);
      indices.push_back(segment_base[seg]);
    }
  }
  out.blocks.push_back(fine.back());
  out.signal = ControlSignal(std::move(grid), std::move(indices));
  return out;
}

RelaxResult relax_approximate(const ControlledFamily& family, const Trajectory& relaxed_trajectory,
                              const ControlSignal& relaxed_signal, const ConvexifiedFamily& convexified,
                              double delta, const RelaxOptions& options) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError(fmt::format("delta must be > 0 (got {})", delta));
  if (convexified.base_size != family.size()) throw ShapeError("convexified family does not match the base family");
  relaxed_signal.check_against(convexified.family);
  const std::vector<double>& grid = relaxed_signal.grid();
  if (grid != relaxed_trajectory.grid()) throw ShapeError("relaxed trajectory and signal grids differ");

  const double p = options.p;
  const double T = grid.back();
  const RateFunctions& rates = family.rates;
  const double m_norm = rates.m.integral(0.0, T);
  const double l_norm = rates.l.integral(0.0, T);
  const double L_norm = rates.L.integral(0.0, T);
  const double Cp = bounds::transport_constant(p);
  const double Cpp = bounds::exponent_constant(p);
  const double growth = std::exp(Cpp * std::pow(l_norm, p));
  const double chi_bar = Cp * L_norm * growth;
  const double e_chi = std::exp(chi_bar);

  RelaxReport report;
  report.delta = delta;
  report.rescaled_delta = delta / (Cp * ((3.0 + l_norm) * (1.0 + chi_bar * e_chi) + e_chi) * growth);
  report.target = options.rescale ? report.rescaled_delta : delta;

  const ParticleCloud& start = relaxed_trajectory.front();
  if (options.policy == RadiusPolicy::kEmpirical) {
    const std::vector<double> moments = relaxed_trajectory.moments(p);
    report.script_C = *std::max_element(moments.begin(), moments.end());
  } else {
    const double m0 = moment(start, p);
    report.script_C = bounds::uniform_moment_constant(p, m0, m0, m_norm);
  }
  report.script_C_T = bounds::tracking_path_constant(report.script_C, m_norm);
  report.tail_target = report.target / (2.0 * (1.0 + report.script_C) * (1.0 + report.script_C_T) * (1.0 + m_norm));
  report.R_delta = radius_for_tail(start, p, report.script_C_T, report.tail_target);
  report.block_budget = report.target / (2.0 * (1.0 + report.script_C) * (1.0 + report.R_delta));
  if (!(report.block_budget > 0.0)) {
    throw ResolutionError(fmt::format(
        "delta = {}: the radius R_delta = {} leaves no admissible block length; constants C = {}, C_T = {}", delta,
        report.R_delta, report.script_C, report.script_C_T));
  }

  const bool all_pure = std::all_of(relaxed_signal.indices().begin(), relaxed_signal.indices().end(),
                                    [&](std::size_t u) { return convexified.chattering[u].pure(); });
  std::vector<double> blocks{grid.front()};
  std::size_t lo = 0;
  for (std::size_t k = all_pure ? grid.size() : 1; k < grid.size(); ++k) {
    if (rates.m.integral(grid[k - 1], grid[k]) > report.block_budget) {
      throw ResolutionError(fmt::format(
          "delta = {} needs blocks with integral of m <= {}, below the grid step at t = {}; use a finer grid", delta,
          report.block_budget, grid[k - 1]));
    }
    if (rates.m.integral(grid[lo], grid[k]) > report.block_budget) {
      blocks.push_back(grid[k - 1]);
      lo = k - 1;
    }
  }
  blocks.push_back(grid.back());
  report.blocks = blocks.size() - 1;

  AumannRealization realized = aumann_realize(relaxed_signal, convexified, blocks);
  report.reblocked = realized.reblocked;
  report.snapped = realized.snapped;

  // Pure switching against the relaxed measure curve.
  auto relaxed = std::make_shared<const Trajectory>(relaxed_trajectory);
  auto switching = std::make_shared<const ControlSignal>(realized.signal);
  NonlocalField w;
  w.label = family.label + "/realized";
  w.rates = family.rates;
  w.growth = family.growth;
  w.measure_dependent = false;
  w.rule = [rule = family.rule, relaxed, switching](double t, const ParticleCloud&, PointRef x) {
    return rule(t, relaxed->at(t), switching->index_at(t), x);
  };
  const Trajectory realized_curve = integrate(w, start, switching->grid(), Method::kEuler);

  FilippovOptions track;
  track.p = p;
  track.R = std::numeric_limits<double>::infinity();
  track.tol = options.tol;
  track.max_iter = options.max_iter;
  FilippovResult back = filippov_track(family, realized_curve, w, start, track);
  report.filippov_status = back.certificate.status;

  report.grid = back.trajectory.grid();
  for (std::size_t k = 0; k < report.grid.size(); ++k) {
    report.deviation.push_back(
        wasserstein_distance(interpolate(relaxed_trajectory, report.grid[k]), back.trajectory.cloud(k), p));
  }
  report.measured = *std::max_element(report.deviation.begin(), report.deviation.end());
  report.pass = report.measured <= delta;
  return RelaxResult{std::move(back.trajectory), std::move(back.signal), std::move(report)};
}

}  // namespace wassinc

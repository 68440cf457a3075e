#include "wassinc/inclusion.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>

#include "wassinc/errors.hpp"
#include "wassinc/rng.hpp"

namespace wassinc {

NonlocalField ControlledFamily::slice(std::size_t u) const {
  if (u >= size()) throw ShapeError(fmt::format("control index {} outside family of size {}", u, size()));
  NonlocalField out;
  out.label = fmt::format("{}[{}]", label, controls[u]);
  out.rule = [rule = rule, u](double t, const ParticleCloud& mu, PointRef x) { return rule(t, mu, u, x); };
  out.rates = rates;
  out.growth = growth;
  out.measure_dependent = measure_dependent;
  return out;
}

ControlSignal::ControlSignal(std::vector<double> grid, std::vector<std::size_t> indices)
    : grid_(std::move(grid)), indices_(std::move(indices)) {
  if (grid_.size() < 2 || indices_.size() + 1 != grid_.size()) {
    throw ShapeError(fmt::format("control signal needs k+1 grid nodes for k indices (got {} and {})", grid_.size(),
                                 indices_.size()));
  }
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    if (!(grid_[k - 1] < grid_[k])) throw ShapeError("control signal grid must be strictly increasing");
  }
}

std::size_t ControlSignal::interval_at(double t) const {
  const double snap = 1e-12 * std::max(1.0, std::abs(grid_.back()));
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t + snap);
  if (it == grid_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - grid_.begin()) - 1, indices_.size() - 1);
}

void ControlSignal::check_against(const ControlledFamily& family) const {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= family.size()) {
      throw ShapeError(fmt::format("signal interval {} uses control {} but family '{}' has {} controls", k,
                                   indices_[k], family.label, family.size()));
    }
  }
}

NonlocalField signal_field(const ControlledFamily& family, const ControlSignal& signal) {
  signal.check_against(family);
  NonlocalField out;
  out.label = family.label + "|signal";
  out.rule = [rule = family.rule, signal](double t, const ParticleCloud& mu, PointRef x) {
    return rule(t, mu, signal.index_at(t), x);
  };
  out.rates = family.rates;
  out.growth = family.growth;
  out.measure_dependent = family.measure_dependent;
  return out;
}

namespace {

Point zero_like(PointRef x) { return Point::Zero(x.size()); }

std::size_t select_control(const ControlledFamily& family, double t, const ParticleCloud& delayed,
                           const PeanoOptions& options, std::size_t interval) {
  switch (options.strategy.kind) {
    case StrategyKind::kFirst:
      return 0;
    case StrategyKind::kRandom:
      return static_cast<std::size_t>(rng::index(options.strategy.seed, 0, interval, family.size()));
    case StrategyKind::kMinNorm: {
      const ParticleCloud* clouds[] = {&delayed};
      const Eigen::MatrixXd probes = probe_set(clouds, options.probes);
      std::size_t best = 0;
      double best_norm = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < family.size(); ++u) {
        const PointMap member = [&](PointRef x) { return family(t, delayed, u, x); };
        const double norm = dsup_probe(member, zero_like, probes);
        if (norm < best_norm) {
          best_norm = norm;
          best = u;
        }
      }
      return best;
    }
  }
  return 0;
}

}  // namespace

PeanoResult peano_solve(const ControlledFamily& family, const ParticleCloud& start, double horizon,
                        const PeanoOptions& options) {
  if (family.size() == 0) throw DomainError("peano_solve needs a nonempty control family");
  if (options.blocks == 0 || options.substeps == 0) throw DomainError("peano_solve needs n >= 1 and substeps >= 1");
  std::vector<std::string> warnings;
  if (!family.convex_images) {
    warnings.push_back(fmt::format(
        "family '{}' does not declare convex images; the limit of the scheme may leave the inclusion", family.label));
  }
  const std::size_t steps = options.blocks * options.substeps;
  std::vector<double> grid = uniform_grid(horizon, steps);
  const double delay = horizon / static_cast<double>(options.blocks);

  std::vector<ParticleCloud> clouds;
  clouds.reserve(steps + 1);
  clouds.push_back(start);
  std::vector<std::size_t> indices;
  indices.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = grid[k];
    const double h = grid[k + 1] - t;
    // mu(t_k - T/n) is node k - substeps; before the first block it is mu^0.
    const ParticleCloud& delayed = k >= options.substeps ? clouds[k - options.substeps] : clouds.front();
    const std::size_t u = select_control(family, t, delayed, options, k);
    Eigen::MatrixXd next = euler_step(family.slice(u), t, h, clouds[k], delayed);
    if (!next.allFinite()) throw BlowUpError(k + 1, grid[k + 1]);
    clouds.emplace_back(std::move(next));
    indices.push_back(u);
  }
  ControlSignal signal(grid, std::move(indices));
  return PeanoResult{Trajectory(std::move(grid), std::move(clouds)), std::move(signal), delay, std::move(warnings)};
}

RefinementStudy refinement_study(const ControlledFamily& family, const ParticleCloud& start, double horizon,
                                 std::span<const std::size_t> blocks, std::size_t substeps,
                                 const SelectionStrategy& strategy, double p, const ProbePolicy& probes) {
  if (blocks.size() < 2) throw DomainError("refinement study needs at least two values of n");
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (!(blocks[i - 1] < blocks[i])) throw DomainError("refinement study n values must be strictly increasing");
  }
  RefinementStudy study;
  for (std::size_t n : blocks) {
    study.runs.push_back(peano_solve(family, start, horizon, PeanoOptions{n, substeps, strategy, probes}));
  }
  study.common_grid = study.runs.front().trajectory.grid();
  for (std::size_t i = 0; i + 1 < study.runs.size(); ++i) {
    const Trajectory& a = study.runs[i].trajectory;
    const Trajectory& b = study.runs[i + 1].trajectory;
    double sup = 0.0;
    for (double t : study.common_grid) sup = std::max(sup, wasserstein_distance(a.at(t), b.at(t), p));
    study.rows.push_back({blocks[i], blocks[i + 1], sup});
  }
  return study;
}

std::vector<double> inclusion_residual(const Trajectory& trajectory, const ControlSignal& signal,
                                       const ControlledFamily& used, const ControlledFamily& family,
                                       double delay, const ProbePolicy& probes) {
  if (!(delay >= 0.0)) throw DomainError("inclusion residual needs delay >= 0");
  if (family.size() == 0) throw DomainError("inclusion residual needs a nonempty family");
  signal.check_against(used);
  std::vector<double> out;
  out.reserve(signal.intervals());
  for (std::size_t k = 0; k < signal.intervals(); ++k) {
    const double t = signal.grid()[k];
    const ParticleCloud& current = trajectory.at(t);
    const ParticleCloud& delayed = trajectory.at(t - delay);
    const ParticleCloud* clouds[] = {&current, &delayed};
    const Eigen::MatrixXd pts = probe_set(clouds, probes);
    const std::size_t chosen = signal.indices()[k];
    const PointMap selection = [&](PointRef x) { return used(t, delayed, chosen, x); };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < family.size() && best > 0.0; ++u) {
      const PointMap member = [&](PointRef x) { return family(t, delayed, u, x); };
      best = std::min(best, dsup_probe(selection, member, pts));
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> transport_residual(const Trajectory& trajectory, const ControlSignal& signal,
                                       const ControlledFamily& used, double delay) {
  if (signal.grid() != trajectory.grid()) throw ShapeError("transport residual needs matching grids");
  signal.check_against(used);
  std::vector<double> out;
  out.reserve(signal.intervals());
  for (std::size_t k = 0; k < signal.intervals(); ++k) {
    const double t = trajectory.grid()[k];
    const double h = trajectory.grid()[k + 1] - t;
    const ParticleCloud& delayed = trajectory.at(t - delay);
    const ParticleCloud& now = trajectory.cloud(k);
    const ParticleCloud& next = trajectory.cloud(k + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
      const Point fd = (next.point(i) - now.point(i)) / h;
      worst = std::max(worst, euclidean_distance(fd, used(t, delayed, signal.indices()[k], now.point(i))));
    }
    out.push_back(worst);
  }
  return out;
}

}  // namespace wassinc

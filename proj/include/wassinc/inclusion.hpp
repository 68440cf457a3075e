#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wassinc/dynamics.hpp"

namespace wassinc {

// v(t, mu, u, x) for control index u.
using FamilyRule = std::function<Point(double t, const ParticleCloud& measure, std::size_t control, PointRef x)>;

// Finite controlled family V(t, mu) = { v(t, mu, u, .) : u in U }.
struct ControlledFamily {
  std::string label;
  std::vector<std::string> controls;  // ordered control list; names are informational
  FamilyRule rule;
  RateFunctions rates;
  bool convex_images = false;
  bool measure_dependent = true;
  Growth growth = Growth::kWithMoment;

  std::size_t size() const { return controls.size(); }
  Point operator()(double t, const ParticleCloud& measure, std::size_t u, PointRef x) const {
    return rule(t, measure, u, x);
  }
  // The fixed-u member field, sharing the family's rates.
  NonlocalField slice(std::size_t u) const;
};

// Piecewise-constant selection: indices[k] holds on [grid[k], grid[k+1]).
class ControlSignal {
 public:
  ControlSignal(std::vector<double> grid, std::vector<std::size_t> indices);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t intervals() const { return indices_.size(); }
  double horizon() const { return grid_.back(); }

  std::size_t interval_at(double t) const;
  std::size_t index_at(double t) const { return indices_[interval_at(t)]; }

  // Throws ShapeError when an index does not address a member of `family`.
  void check_against(const ControlledFamily& family) const;

 private:
  std::vector<double> grid_;
  std::vector<std::size_t> indices_;
};

// The nonlocal field obtained by following `signal` inside `family`.
NonlocalField signal_field(const ControlledFamily& family, const ControlSignal& signal);

enum class StrategyKind { kFirst, kMinNorm, kRandom };

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::kFirst;
  std::uint64_t seed = 0;
};

struct PeanoOptions {
  std::size_t blocks = 1;    // n: the delay is T / n
  std::size_t substeps = 1;  // euler sub-intervals per block
  SelectionStrategy strategy;
  ProbePolicy probes;
};

struct PeanoResult {
  Trajectory trajectory;
  ControlSignal signal;
  double delay = 0.0;
  std::vector<std::string> warnings;
};

// Delayed semi-discrete Euler construction: on every sub-interval the
// control is chosen against mu(t - T/n) (mu^0 for t < T/n) and particles
// move with that frozen selection.
// Throws DomainError for an empty family or zero blocks/substeps.
PeanoResult peano_solve(const ControlledFamily& family, const ParticleCloud& start, double horizon,
                        const PeanoOptions& options);

struct RefinementRow {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  double sup_distance = 0.0;  // sup over the common grid of W_p
};

struct RefinementStudy {
  std::vector<double> common_grid;
  std::vector<RefinementRow> rows;
  std::vector<PeanoResult> runs;
};

// Runs peano_solve for each n in `blocks` (strictly increasing, length >= 2)
// and compares consecutive runs on the grid of the coarsest one.
RefinementStudy refinement_study(const ControlledFamily& family, const ParticleCloud& start, double horizon,
                                 std::span<const std::size_t> blocks, std::size_t substeps,
                                 const SelectionStrategy& strategy, double p, const ProbePolicy& probes = {});

// Per sub-interval of `signal`: min over u of the probe d_sup between the
// field actually used (signal index inside `used`) and member u of `family`,
// both evaluated against mu(t - delay).  Zero certifies probe-level
// membership of the selection.
std::vector<double> inclusion_residual(const Trajectory& trajectory, const ControlSignal& signal,
                                       const ControlledFamily& used, const ControlledFamily& family,
                                       double delay, const ProbePolicy& probes = {});

inline std::vector<double> inclusion_residual(const Trajectory& trajectory, const ControlSignal& signal,
                                              const ControlledFamily& family, double delay,
                                              const ProbePolicy& probes = {}) {
  return inclusion_residual(trajectory, signal, family, family, delay, probes);
}

// Per interval: max over particles of |finite-difference velocity - used field|,
// i.e. whether the trajectory is the Euler transport of the selection.
// Requires the signal grid to equal the trajectory grid.
std::vector<double> transport_residual(const Trajectory& trajectory, const ControlSignal& signal,
                                       const ControlledFamily& used, double delay);

}  // namespace wassinc

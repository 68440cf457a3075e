#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wassinc/filippov.hpp"

namespace wassinc {

// Convex combination sum_j (numerators[j] / steps) v(., base_indices[j]).
struct ChatteringControl {
  std::vector<std::size_t> base_indices;  // strictly increasing
  std::vector<std::size_t> numerators;    // sum to steps
  std::size_t steps = 1;

  double weight(std::size_t j) const { return static_cast<double>(numerators[j]) / static_cast<double>(steps); }
  bool pure() const;
};

struct ConvexifiedFamily {
  ControlledFamily family;                   // member u is chattering[u]
  std::vector<ChatteringControl> chattering;
  std::size_t base_size = 0;
};

// All chattering controls on min(q, |U|) base indices with weights on the
// grid {0, 1/weight_steps, ..., 1}; combinations inducing the same field
// formally (same positive-weight support and weights) are kept once.
// Rates are inherited unchanged.  Throws DomainError when q or weight_steps is 0.
ConvexifiedFamily convexify(const ControlledFamily& family, std::size_t q = 2, std::size_t weight_steps = 4);

struct SnappedBoundary {
  double requested = 0.0;
  double snapped = 0.0;
};

struct AumannRealization {
  ControlSignal signal;  // over the base family, on the fine grid merged with split points
  std::vector<double> blocks;  // block boundaries actually used
  std::vector<std::size_t> block_controls;  // chattering index per block
  std::vector<std::size_t> reblocked;       // blocks where the majority rule applied
  std::vector<SnappedBoundary> snapped;
};

// Replaces each block's chattering control by consecutive pure sub-segments of
// length lambda_j h in base-index order.  `blocks` must start at 0 and end at
// the signal horizon; interior boundaries off the signal grid are snapped to
// the nearest node.
AumannRealization aumann_realize(const ControlSignal& chattering_signal, const ConvexifiedFamily& convexified,
                                 std::span<const double> blocks);

enum class RadiusPolicy {
  kEmpirical,  // moment constant := sup_t M_p of the relaxed trajectory
  kRecurrence, // moment constant from the recurrent integral estimate
};

struct RelaxOptions {
  double p = 1.0;
  RadiusPolicy policy = RadiusPolicy::kEmpirical;
  bool rescale = true;  // run the construction at the rescaled target delta'
  double tol = 1e-10;
  std::size_t max_iter = 20;
};

struct RelaxReport {
  double delta = 0.0;
  double rescaled_delta = 0.0;
  double target = 0.0;  // delta or rescaled_delta, whichever the construction used
  double script_C = 0.0;
  double script_C_T = 0.0;
  double tail_target = 0.0;
  double R_delta = 0.0;
  double block_budget = 0.0;  // allowed integral of m per block
  std::size_t blocks = 0;
  std::vector<std::size_t> reblocked;
  std::vector<SnappedBoundary> snapped;
  std::string filippov_status;
  std::vector<double> grid;       // grid of the returned trajectory (fine nodes and split points)
  std::vector<double> deviation;  // W_p(relaxed(t), returned(t)), relaxed curve interpolated linearly
  double measured = 0.0;        // sup of deviation
  bool pass = false;            // measured <= delta
};

struct RelaxResult {
  Trajectory trajectory;
  ControlSignal signal;
  RelaxReport report;
};

// Approximates a relaxed solution (a trajectory driven by a signal inside
// convexify(family)) by a solution of the original inclusion.
// Throws DomainError for delta <= 0, ShapeError for an inconsistent relaxed
// pair, ResolutionError when a single grid step exceeds the block budget.
RelaxResult relax_approximate(const ControlledFamily& family, const Trajectory& relaxed_trajectory,
                              const ControlSignal& relaxed_signal, const ConvexifiedFamily& convexified,
                              double delta, const RelaxOptions& options = {});

}  // namespace wassinc

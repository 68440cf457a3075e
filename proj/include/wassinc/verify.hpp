#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wassinc/inclusion.hpp"

namespace wassinc {

struct BoundRow {
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double margin() const { return bound - measured; }
};

struct BoundReport {
  std::string kind;
  std::vector<BoundRow> rows;
  std::vector<std::pair<std::string, double>> constants;
  double slack = 0.05;

  // Every row satisfies margin >= -slack * bound.
  bool pass() const;
  double min_margin() const;
  double constant(const std::string& name) const;  // throws std::out_of_range
};

struct SimulationSetup {
  std::span<const double> grid;
  Method method = Method::kEuler;
  double p = 1.0;
  double slack = 0.05;
};

// M_p(mu(t)) against C_p (M_p(mu0) + int m) exp(C_p' ||m||^p); for fields with
// moment-dependent growth the integral carries the factor (1 + M_p(mu(s))),
// taken as the larger end-point value on each step.
BoundReport verify_momentum(const NonlocalField& field, const ParticleCloud& start, const SimulationSetup& setup);

// The same check on an existing trajectory.  With a positive delay the
// nonlocal argument at t is mu(t - delay), so the moment factor on a step is
// the largest moment over [t - delay, t + h].
BoundReport momentum_report(const Trajectory& trajectory, const RateFunctions& rates, Growth growth, double p,
                            double slack, double delay = 0.0);

// tail_norm(mu(t), R) against C_T tail_norm(mu0, R / C_T - 1, shifted), one
// block of rows per radius.
BoundReport verify_equi_integrability(const NonlocalField& field, const ParticleCloud& start,
                                      const SimulationSetup& setup, std::span<const double> radii);

// For each t_k, the pair (tau, t_k), tau <= t_k on the grid, with the smallest
// margin of W_p(mu(tau), mu(t_k)) <= c_p int_tau^t_k m, c_p = 1 + 2 B where B
// is the momentum bound at T.
BoundReport verify_abs_continuity(const NonlocalField& field, const ParticleCloud& start,
                                  const SimulationSetup& setup);

struct StabilityInputs {
  const NonlocalField* v = nullptr;  // drives mu, supplies l
  const NonlocalField* w = nullptr;  // drives nu
  const ParticleCloud* mu0 = nullptr;
  const ParticleCloud* nu0 = nullptr;
  double R = std::numeric_limits<double>::infinity();  // +inf: global estimate
  bool include_error_term = true;
};

// W_p(mu(t), nu(t)) against the global (R = inf) or localised stability
// estimate; the velocity discrepancy is the max over nu(t)-atoms in B(0, R).
BoundReport verify_stability(const StabilityInputs& inputs, const SimulationSetup& setup);

// Samples (t, cloud, x) triples along the trajectory of members.front() and
// reports, per grid time, the largest ratio of an observed quantity to its
// declared rate (growth m, spatial Lipschitz l, measure Lipschitz L) over all
// members; the bound column is 1.
BoundReport verify_hypotheses(std::span<const NonlocalField> members, const ParticleCloud& start,
                              const SimulationSetup& setup, std::size_t samples, std::uint64_t seed);

}  // namespace wassinc

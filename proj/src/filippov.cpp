#include "wassinc/filippov.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "wassinc/bounds.hpp"
#include "wassinc/errors.hpp"

namespace wassinc {

bool FilippovCertificate::distance_holds(double slack) const {
  for (std::size_t k = 0; k < measured.size(); ++k) {
    if (!(measured[k] <= bound[k] * (1.0 + slack))) return false;
  }
  return true;
}

bool FilippovCertificate::velocity_holds(double slack) const {
  for (std::size_t k = 0; k < velocity_gap.size(); ++k) {
    if (!(velocity_gap[k] <= velocity_bound[k] * (1.0 + slack))) return false;
  }
  return true;
}

namespace {

void check_radius(double R) {
  if (std::isnan(R) || R <= 0.0) throw DomainError(fmt::format("localisation radius must be > 0 (got {})", R));
}

struct Choice {
  double value = 0.0;
  std::size_t index = 0;
};

// argmin over u of the L^inf(B(0,R); nu) distance between `target` and member u.
Choice closest_on_atoms(const ControlledFamily& family, double t, const ParticleCloud& measure,
                        const ParticleCloud& atoms, double R, const PointMap& target) {
  std::vector<std::size_t> inside;
  std::vector<Point> target_values;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (euclidean_norm(atoms.point(j)) <= R) {
      inside.push_back(j);
      target_values.push_back(target(atoms.point(j)));
    }
  }
  Choice best{std::numeric_limits<double>::infinity(), 0};
  if (inside.empty()) return {0.0, 0};
  for (std::size_t u = 0; u < family.size(); ++u) {
    double worst = 0.0;
    for (std::size_t q = 0; q < inside.size() && worst < best.value; ++q) {
      const Point member = family(t, measure, u, atoms.point(inside[q]));
      worst = std::max(worst, euclidean_distance(target_values[q], member));
    }
    if (worst < best.value) best = {worst, u};
  }
  return best;
}

Choice closest_on_probes(const ControlledFamily& family, double t, const ParticleCloud& measure,
                         const Eigen::MatrixXd& probes, const PointMap& target) {
  std::vector<Point> target_values;
  target_values.reserve(static_cast<std::size_t>(probes.cols()));
  for (Eigen::Index i = 0; i < probes.cols(); ++i) target_values.push_back(target(probes.col(i)));
  Choice best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t u = 0; u < family.size(); ++u) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < probes.cols() && worst < best.value; ++i) {
      worst = std::max(worst, euclidean_distance(target_values[static_cast<std::size_t>(i)],
                                                 family(t, measure, u, probes.col(i))));
    }
    if (worst < best.value) best = {worst, u};
  }
  return best;
}

}  // namespace

std::vector<double> mismatch(const ControlledFamily& family, const Trajectory& reference, const NonlocalField& w,
                             double R) {
  check_radius(R);
  if (family.size() == 0) throw DomainError("mismatch needs a nonempty family");
  std::vector<double> out;
  out.reserve(reference.nodes());
  for (std::size_t k = 0; k < reference.nodes(); ++k) {
    const double t = reference.grid()[k];
    const ParticleCloud& nu = reference.cloud(k);
    const PointMap target = w.at_time(t, nu);
    out.push_back(closest_on_atoms(family, t, nu, nu, R, target).value);
  }
  return out;
}

FilippovCertificate compute_bound(const BoundInputs& in) {
  if (in.rates == nullptr || in.reference_start == nullptr) throw ShapeError("compute_bound needs rates and nu(0)");
  if (in.eta.size() != in.grid.size()) throw ShapeError("mismatch series must match the grid");
  check_radius(in.R);
  const RateFunctions& rates = *in.rates;
  FilippovCertificate cert;
  cert.grid.assign(in.grid.begin(), in.grid.end());
  cert.eta.assign(in.eta.begin(), in.eta.end());

  const double horizon = in.grid.back();
  const double m_norm = rates.m.integral(0.0, horizon);
  FilippovConstants& c = cert.constants;
  c.C_p = bounds::transport_constant(in.p);
  c.C_p_prime = bounds::exponent_constant(in.p);
  c.script_C = bounds::uniform_moment_constant(in.p, in.start_moment, in.reference_moment, m_norm);
  c.script_C_T = bounds::tracking_path_constant(c.script_C, m_norm);
  c.R = in.R;

  const std::vector<double> eta_integral = bounds::cumulative_left(in.grid, in.eta);
  for (std::size_t k = 0; k < in.grid.size(); ++k) {
    const double t = in.grid[k];
    const double l_int = rates.l.integral(0.0, t);
    const double growth = std::exp(c.C_p_prime * std::pow(l_int, in.p));
    const double chi = c.C_p * rates.L.integral(0.0, t) * growth;
    const double error =
        bounds::localisation_error(*in.reference_start, in.p, in.R, c.script_C_T, rates.m.integral(0.0, t));
    const double additive = in.initial_distance + eta_integral[k] + error;
    cert.chi.push_back(chi);
    cert.error_term.push_back(error);
    cert.bound.push_back(additive == 0.0 ? 0.0 : c.C_p * additive * growth * std::exp(chi));
  }
  return cert;
}

FilippovResult filippov_track(const ControlledFamily& family, const Trajectory& reference, const NonlocalField& w,
                              const ParticleCloud& start, const FilippovOptions& options) {
  check_radius(options.R);
  if (!(options.tol > 0.0)) throw DomainError("filippov_track needs tol > 0");
  if (options.max_iter < 1) throw DomainError("filippov_track needs max_iter >= 1");
  if (family.size() == 0) throw DomainError("filippov_track needs a nonempty family");
  if (start.dim() != reference.front().dim()) throw ShapeError("start and reference dimensions differ");

  const std::vector<double>& grid = reference.grid();
  if (grid.size() < 2) throw ShapeError("filippov_track needs at least one time step");
  const std::size_t intervals = grid.size() - 1;
  ProbePolicy probes = options.probes;
  if (probes.radius <= 0.0 && std::isfinite(options.R)) probes.radius = options.R;

  // v_1: closest member to w along nu, measured on nu's atoms in B(0, R).
  std::vector<std::size_t> indices(intervals);
  std::vector<double> eta(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ParticleCloud& nu = reference.cloud(k);
    const Choice choice = closest_on_atoms(family, grid[k], nu, nu, options.R, w.at_time(grid[k], nu));
    eta[k] = choice.value;
    if (k < intervals) indices[k] = choice.index;
  }

  ControlSignal signal(grid, indices);
  Trajectory selection_measure = reference;
  Trajectory current = integrate(signal_field(family, signal), start, grid, Method::kEuler, frozen(reference));

  std::vector<double> increments;
  bool converged = false;
  std::size_t iterations = 0;
  while (!converged && iterations < options.max_iter) {
    // v_{k+1}(t): member of V(t, mu_k(t)) closest to v_k(t) in probe d_sup.
    std::vector<std::size_t> next(intervals);
    for (std::size_t k = 0; k < intervals; ++k) {
      const double t = grid[k];
      const ParticleCloud& mu_k = current.cloud(k);
      const ParticleCloud& nu = reference.cloud(k);
      const ParticleCloud* clouds[] = {&mu_k, &nu};
      const Eigen::MatrixXd pts = probe_set(clouds, probes);
      const ParticleCloud& previous_measure = selection_measure.cloud(k);
      const std::size_t previous_index = signal.indices()[k];
      const PointMap previous = [&](PointRef x) { return family(t, previous_measure, previous_index, x); };
      next[k] = closest_on_probes(family, t, mu_k, pts, previous).index;
    }
    ControlSignal next_signal(grid, std::move(next));
    Trajectory next_traj = integrate(signal_field(family, next_signal), start, grid, Method::kEuler, frozen(current));
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sup = std::max(sup, wasserstein_distance(current.cloud(k), next_traj.cloud(k), options.p));
    }
    increments.push_back(sup);
    ++iterations;
    selection_measure = std::move(current);
    current = std::move(next_traj);
    signal = std::move(next_signal);
    converged = sup <= options.tol;
  }

  BoundInputs inputs;
  inputs.initial_distance = wasserstein_distance(start, reference.front(), options.p);
  inputs.grid = grid;
  inputs.eta = eta;
  inputs.rates = &family.rates;
  inputs.p = options.p;
  inputs.R = options.R;
  inputs.reference_start = &reference.front();
  inputs.start_moment = moment(start, options.p);
  inputs.reference_moment = moment(reference.front(), options.p);
  FilippovCertificate cert = compute_bound(inputs);
  cert.increments = std::move(increments);
  cert.iterations = iterations;
  cert.converged = converged;
  cert.status = converged ? "converged" : "iteration_not_converged";

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const ParticleCloud& nu = reference.cloud(k);
    cert.measured.push_back(wasserstein_distance(current.cloud(k), nu, options.p));
    // The selection on the last node is the one of the last interval.
    const std::size_t interval = std::min(k, intervals - 1);
    const ParticleCloud& chosen_measure = current.cloud(k);
    const std::size_t u = signal.indices()[interval];
    double gap = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const auto y = nu.point(j);
      if (euclidean_norm(y) > options.R) continue;
      gap = std::max(gap, euclidean_distance(family(t, chosen_measure, u, y), w(t, nu, y)));
    }
    cert.velocity_gap.push_back(gap);
    cert.velocity_bound.push_back(cert.eta[k] + family.rates.L(t) * cert.bound[k]);
  }
  return FilippovResult{std::move(current), std::move(signal), std::move(selection_measure), std::move(cert)};
}

}  // namespace wassinc

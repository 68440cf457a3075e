#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wassinc/measure.hpp"
#include "wassinc/rates.hpp"

namespace wassinc {

// v(t, mu, x).  Rules must be pure: same inputs, same bits.
using FieldRule = std::function<Point(double t, const ParticleCloud& measure, PointRef x)>;

// A velocity field frozen at one time (and one measure): x -> v(x).
using PointMap = std::function<Point(PointRef x)>;

// Which growth bound the declared m(.) refers to.
enum class Growth {
  kLocal,       // |v(t,mu,x)| <= m(t) (1 + |x|)
  kWithMoment,  // |v(t,mu,x)| <= m(t) (1 + |x| + M_p(mu))
};

struct NonlocalField {
  std::string label;
  FieldRule rule;
  RateFunctions rates;
  Growth growth = Growth::kWithMoment;
  bool measure_dependent = true;

  Point operator()(double t, const ParticleCloud& measure, PointRef x) const { return rule(t, measure, x); }

  // Velocity at every column of `at`, with `measure` as the nonlocal argument.
  Eigen::MatrixXd velocities(double t, const ParticleCloud& measure, const Eigen::MatrixXd& at) const;

  PointMap at_time(double t, const ParticleCloud& measure) const;
};

// Discrete measure curve: clouds[k] is the state at grid[k].  Row i of every
// cloud is the same characteristic curve.
class Trajectory {
 public:
  Trajectory(std::vector<double> grid, std::vector<ParticleCloud> clouds);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<ParticleCloud>& clouds() const { return clouds_; }
  std::size_t nodes() const { return grid_.size(); }
  const ParticleCloud& cloud(std::size_t k) const { return clouds_[k]; }
  const ParticleCloud& front() const { return clouds_.front(); }
  const ParticleCloud& back() const { return clouds_.back(); }
  double horizon() const { return grid_.back(); }

  // Last node at or before t (with a 1e-12 relative snap); times before the
  // first node map to node 0.
  std::size_t node_at(double t) const;
  const ParticleCloud& at(double t) const { return clouds_[node_at(t)]; }

  std::vector<double> moments(double p) const;

 private:
  std::vector<double> grid_;
  std::vector<ParticleCloud> clouds_;
};

enum class Method { kEuler, kRk4 };

// Nonlocal argument taken from the cloud being integrated.
struct SelfMeasure {};

// Nonlocal argument read from a fixed trajectory at t - delay, with the
// trajectory's initial cloud used for t < delay.
struct FrozenMeasure {
  const Trajectory* source = nullptr;
  double delay = 0.0;
};

using MeasureSource = std::variant<SelfMeasure, FrozenMeasure>;

inline MeasureSource frozen(const Trajectory& source, double delay = 0.0) {
  return FrozenMeasure{&source, delay};
}

// Uniform grid 0, T/steps, ..., T.
std::vector<double> uniform_grid(double horizon, std::size_t steps);

// Advance every particle along x' = v(t, M(t), x).  Euler evaluates the
// field on the step's start cloud; each rk4 stage uses its own stage cloud
// (self) or the frozen cloud at the stage time.
// Throws ShapeError on an empty or malformed grid, DomainError on a negative
// delay, BlowUpError when a coordinate becomes non-finite.
Trajectory integrate(const NonlocalField& field, const ParticleCloud& start, std::span<const double> grid,
                     Method method = Method::kEuler, const MeasureSource& source = SelfMeasure{});

// One explicit Euler step of size h from `state`, using `measure` as the
// nonlocal argument.  Shared by the Peano scheme so that both paths perform
// identical arithmetic.
Eigen::MatrixXd euler_step(const NonlocalField& field, double t, double h, const ParticleCloud& state,
                           const ParticleCloud& measure);

// Columns: points of the per_axis^d lattice spanning [-radius, radius]^d that lie in
// the closed ball B(0, radius).  per_axis == 1 yields the origin only.
Eigen::MatrixXd ball_grid(std::size_t dim, double radius, std::size_t per_axis);

// Probe policy for supremum estimates: union of the given clouds' atoms and
// a uniform ball grid.
struct ProbePolicy {
  double radius = 0.0;  // 0 = use max atom norm (at least 1)
  std::size_t per_axis = 0;  // 0 = dimension-dependent default (21 / 11 / 5)
};

Eigen::MatrixXd probe_set(std::span<const ParticleCloud* const> clouds, const ProbePolicy& policy);

// max over probe columns of |f(x) - g(x)|, a lower estimate of d_sup.
// Throws DomainError when probes is empty.
double dsup_probe(const PointMap& f, const PointMap& g, const Eigen::MatrixXd& probes);

struct DccEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // 2^-K truncation
};

// sum_{k=1..K} 2^-k min{1, sup_{B(0,k)} |f - g|}, suprema taken over a cubic
// lattice of `grid_density` points per unit length clipped to each ball.
// Throws DomainError when K < 1 or grid_density <= 0.
DccEstimate dcc_estimate(const PointMap& f, const PointMap& g, std::size_t dim, int K, double grid_density);

}  // namespace wassinc

#include <cmath>
#include <fmt/format.h>

#include "wassinc/dynamics.hpp"
#include "wassinc/errors.hpp"

namespace wassinc {

std::vector<double> uniform_grid(double horizon, std::size_t steps) {
  if (steps == 0) throw ShapeError("uniform grid needs at least one step");
  if (!(horizon > 0.0)) throw DomainError(fmt::format("horizon must be positive (got {})", horizon));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  grid.back() = horizon;
  return grid;
}

Eigen::MatrixXd euler_step(const NonlocalField& field, double t, double h, const ParticleCloud& state,
                           const ParticleCloud& measure) {
  return state.points() + h * field.velocities(t, measure, state.points());
}

namespace {

class StageMeasure {
 public:
  explicit StageMeasure(const MeasureSource& source) : source_(source) {}

  // Cloud to hand to the field at stage time t, given the stage state.
  const ParticleCloud& operator()(double t, const ParticleCloud& stage) const {
    if (const auto* f = std::get_if<FrozenMeasure>(&source_)) {
      const double shifted = t - f->delay;
      if (shifted < 0.0) return f->source->front();
      return f->source->at(shifted);
    }
    return stage;
  }

 private:
  const MeasureSource& source_;
};

ParticleCloud checked(Eigen::MatrixXd pts, std::size_t step, double t) {
  if (!pts.allFinite()) throw BlowUpError(step, t);
  return ParticleCloud(std::move(pts));
}

}  // namespace

Trajectory integrate(const NonlocalField& field, const ParticleCloud& start, std::span<const double> grid,
                     Method method, const MeasureSource& source) {
  if (grid.empty()) throw ShapeError("integration grid is empty");
  if (grid.front() != 0.0) throw ShapeError("integration grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k - 1] < grid[k])) throw ShapeError("integration grid must be strictly increasing");
  }
  if (const auto* f = std::get_if<FrozenMeasure>(&source)) {
    if (f->source == nullptr) throw ShapeError("frozen measure source has no trajectory");
    if (!(f->delay >= 0.0)) throw DomainError("frozen measure delay must be >= 0");
    if (f->source->front().dim() != start.dim()) throw ShapeError("frozen measure dimension mismatch");
  }
  const StageMeasure measure_at(source);

  std::vector<ParticleCloud> clouds;
  clouds.reserve(grid.size());
  clouds.push_back(start);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double h = grid[k + 1] - t;
    const ParticleCloud& x = clouds.back();
    if (method == Method::kEuler) {
      clouds.push_back(checked(euler_step(field, t, h, x, measure_at(t, x)), k + 1, grid[k + 1]));
      continue;
    }
    const double half = 0.5 * h;
    const Eigen::MatrixXd k1 = field.velocities(t, measure_at(t, x), x.points());
    const ParticleCloud x2 = checked(x.points() + half * k1, k + 1, t + half);
    const Eigen::MatrixXd k2 = field.velocities(t + half, measure_at(t + half, x2), x2.points());
    const ParticleCloud x3 = checked(x.points() + half * k2, k + 1, t + half);
    const Eigen::MatrixXd k3 = field.velocities(t + half, measure_at(t + half, x3), x3.points());
    const ParticleCloud x4 = checked(x.points() + h * k3, k + 1, t + h);
    const Eigen::MatrixXd k4 = field.velocities(t + h, measure_at(t + h, x4), x4.points());
    clouds.push_back(checked(x.points() + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k + 1, grid[k + 1]));
  }
  return Trajectory(std::vector<double>(grid.begin(), grid.end()), std::move(clouds));
}

}  // namespace wassinc

#include <algorithm>
#include <fmt/format.h>

#include "wassinc/dynamics.hpp"
#include "wassinc/errors.hpp"

namespace wassinc {

Eigen::MatrixXd NonlocalField::velocities(double t, const ParticleCloud& measure, const Eigen::MatrixXd& at) const {
  Eigen::MatrixXd out(at.rows(), at.cols());
  for (Eigen::Index i = 0; i < at.cols(); ++i) out.col(i) = rule(t, measure, at.col(i));
  return out;
}

PointMap NonlocalField::at_time(double t, const ParticleCloud& measure) const {
  return [rule = rule, t, measure](PointRef x) { return rule(t, measure, x); };
}

Trajectory::Trajectory(std::vector<double> grid, std::vector<ParticleCloud> clouds)
    : grid_(std::move(grid)), clouds_(std::move(clouds)) {
  if (grid_.empty()) throw ShapeError("trajectory needs at least one grid node");
  if (grid_.size() != clouds_.size()) {
    throw ShapeError(fmt::format("trajectory has {} grid nodes but {} clouds", grid_.size(), clouds_.size()));
  }
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    if (!(grid_[k - 1] < grid_[k])) throw ShapeError("trajectory grid must be strictly increasing");
    if (clouds_[k].size() != clouds_[0].size() || clouds_[k].dim() != clouds_[0].dim()) {
      throw ShapeError("trajectory clouds must share N and d");
    }
  }
}

std::size_t Trajectory::node_at(double t) const {
  const double snap = 1e-12 * std::max(1.0, std::abs(grid_.back()));
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t + snap);
  if (it == grid_.begin()) return 0;
  return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

std::vector<double> Trajectory::moments(double p) const {
  std::vector<double> out;
  out.reserve(clouds_.size());
  for (const auto& c : clouds_) out.push_back(moment(c, p));
  return out;
}

}  // namespace wassinc

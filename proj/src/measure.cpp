#include "wassinc/measure.hpp"

#include <cmath>
#include <fmt/format.h>

#include "wassinc/errors.hpp"

namespace wassinc {

double euclidean_distance(PointRef x, PointRef y) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double euclidean_norm(PointRef x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) acc += x[k] * x[k];
  return std::sqrt(acc);
}

ParticleCloud::ParticleCloud(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw ShapeError(fmt::format("particle cloud needs N >= 1 and d >= 1 (got N = {}, d = {})",
                                 points_.cols(), points_.rows()));
  }
  if (!points_.allFinite()) throw DomainError("particle cloud has non-finite coordinates");
  mean_ = points_.rowwise().sum() / static_cast<double>(points_.cols());
}

ParticleCloud ParticleCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeError("particle cloud needs N >= 1 and d >= 1");
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != d) {
      throw ShapeError(fmt::format("particle {} has dimension {}, expected {}", i, rows[i].size(), d));
    }
    for (Eigen::Index k = 0; k < d; ++k) pts(k, static_cast<Eigen::Index>(i)) = rows[i][k];
  }
  return ParticleCloud(std::move(pts));
}

ParticleCloud ParticleCloud::dirac(const Point& x) {
  Eigen::MatrixXd pts(x.size(), 1);
  pts.col(0) = x;
  return ParticleCloud(std::move(pts));
}

double ParticleCloud::max_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, euclidean_norm(point(i)));
  return best;
}

namespace {

void require_order(double p) {
  if (!(p >= 1.0)) throw DomainError(fmt::format("moment order p must be >= 1 (got {})", p));
}

}  // namespace

double moment(const ParticleCloud& cloud, double p) {
  require_order(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) acc += std::pow(euclidean_norm(cloud.point(i)), p);
  return std::pow(acc / static_cast<double>(cloud.size()), 1.0 / p);
}

double tail_norm(const ParticleCloud& cloud, double radius, double p, bool shifted) {
  require_order(p);
  radius = std::max(radius, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r = euclidean_norm(cloud.point(i));
    if (r >= radius) acc += std::pow(shifted ? 1.0 + r : r, p);
  }
  return std::pow(acc / static_cast<double>(cloud.size()), 1.0 / p);
}

double assignment_cost_sum(const ParticleCloud& a, const ParticleCloud& b, double p,
                           std::span<const std::size_t> assignment) {
  double acc = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    acc += std::pow(euclidean_distance(a.point(i), b.point(assignment[i])), p);
  }
  return acc;
}

TransportPlan wasserstein(const ParticleCloud& a, const ParticleCloud& b, double p) {
  require_order(p);
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw ShapeError(fmt::format("wasserstein needs equal shapes (got {}x{} and {}x{})", a.size(),
                                 a.dim(), b.size(), b.dim()));
  }
  const std::size_t n = a.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = std::pow(euclidean_distance(a.point(i), b.point(j)), p);
    }
  }
  TransportPlan plan;
  plan.assignment = assignment::solve(cost, n);
  const double total = assignment_cost_sum(a, b, p, plan.assignment);
  plan.cost = std::pow(total / static_cast<double>(n), 1.0 / p);
  return plan;
}

double wasserstein_distance(const ParticleCloud& a, const ParticleCloud& b, double p) {
  return wasserstein(a, b, p).cost;
}

}  // namespace wassinc

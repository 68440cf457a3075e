#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace wassinc {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

// Euclidean distance accumulated coordinate by coordinate in index order.
// Every transport cost in the library goes through this function so that
// independent re-computations reproduce the same bits.
double euclidean_distance(PointRef x, PointRef y);
double euclidean_norm(PointRef x);

// Uniform-weight empirical measure (1/N) sum_i delta_{x_i} in R^d.
// Points are stored column-wise: points().col(i) is particle i.
class ParticleCloud {
 public:
  // Throws ShapeError when N == 0 or d == 0, DomainError on non-finite input.
  explicit ParticleCloud(Eigen::MatrixXd points);

  // Convenience for small literal clouds: one inner vector per particle.
  static ParticleCloud from_rows(const std::vector<std::vector<double>>& rows);
  static ParticleCloud dirac(const Point& x);

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.rows()); }

  const Eigen::MatrixXd& points() const { return points_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }

  // Barycenter, computed once at construction.
  const Point& mean() const { return mean_; }

  double max_norm() const;

 private:
  Eigen::MatrixXd points_;
  Point mean_;
};

// Optimal coupling between two equal-size clouds.  assignment[i] is the
// index of the target particle receiving source particle i.
struct TransportPlan {
  std::vector<std::size_t> assignment;
  double cost = 0.0;  // W_p
};

// ((1/N) sum_i |x_i|^p)^(1/p).  Throws DomainError when p < 1.
double moment(const ParticleCloud& cloud, double p);

// Exact W_p between equal-size uniform clouds.  Among optimal permutations
// the one with the smallest rounded cost sum is returned, the
// lexicographically smallest on ties (search bounded for large tie sets).
// Throws ShapeError on size/dimension mismatch, DomainError when p < 1.
TransportPlan wasserstein(const ParticleCloud& a, const ParticleCloud& b, double p);

// Shorthand for wasserstein(a, b, p).cost.
double wasserstein_distance(const ParticleCloud& a, const ParticleCloud& b, double p);

// Tail functional over atoms with |x_i| >= radius:
//   shifted = false: ((1/N) sum |x_i|^p)^(1/p)
//   shifted = true:  ((1/N) sum (1 + |x_i|)^p)^(1/p)
// Negative radii are clamped to 0.
double tail_norm(const ParticleCloud& cloud, double radius, double p, bool shifted);

// Cost of a given permutation, summed in source-index order, before the
// 1/N normalisation and the 1/p root.
double assignment_cost_sum(const ParticleCloud& a, const ParticleCloud& b, double p,
                           std::span<const std::size_t> assignment);

namespace assignment {

// Minimum-cost perfect matching on a dense n x n matrix (row-major).
// Returns an optimal row -> column map chosen as in wasserstein().
std::vector<std::size_t> solve(std::span<const double> cost, std::size_t n);

}  // namespace assignment

}  // namespace wassinc

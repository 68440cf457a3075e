#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wassinc/measure.hpp"

namespace oracle {

// Straight re-derivations used as independent references in the tests.

inline double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < x.size(); ++c) acc += (x[c] - y[c]) * (x[c] - y[c]);
  return std::sqrt(acc);
}

// Minimum over all N! permutations, same summation order as the library.
inline double brute_force_wasserstein(const wassinc::ParticleCloud& a, const wassinc::ParticleCloud& b, double p) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double acc = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) acc += std::pow(distance(a.point(i), b.point(perm[i])), p);
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best / static_cast<double>(a.size()), 1.0 / p);
}

inline wassinc::ParticleCloud random_cloud(std::mt19937_64& gen, std::size_t n, std::size_t d, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = u(gen);
  return wassinc::ParticleCloud(std::move(pts));
}

}  // namespace oracle

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "wassinc/dynamics.hpp"
#include "wassinc/errors.hpp"

namespace wassinc {

namespace {

// Visit every point of the lattice {-half..half}^d * spacing.
template <typename Visit>
void for_each_lattice_point(std::size_t dim, long half, double spacing, Visit&& visit) {
  std::vector<long> idx(dim, -half);
  Point x(static_cast<Eigen::Index>(dim));
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) x[static_cast<Eigen::Index>(k)] = static_cast<double>(idx[k]) * spacing;
    visit(x);
    std::size_t k = 0;
    while (k < dim && idx[k] == half) idx[k++] = -half;
    if (k == dim) return;
    ++idx[k];
  }
}

}  // namespace

Eigen::MatrixXd ball_grid(std::size_t dim, double radius, std::size_t per_axis) {
  if (dim == 0) throw ShapeError("ball grid needs d >= 1");
  if (per_axis <= 1 || radius <= 0.0) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), 1);
  const double spacing = 2.0 * radius / static_cast<double>(per_axis - 1);
  // Odd counts are centred on the origin; even counts are shifted by half a cell.
  std::vector<Point> kept;
  const bool odd = per_axis % 2 == 1;
  const long half = static_cast<long>(per_axis / 2);
  const double slack = 1e-12 * radius;
  for_each_lattice_point(dim, half, spacing, [&](const Point& lattice) {
    Point x = lattice;
    if (!odd) {
      // Drop the duplicated extreme layer and shift to cell centres.
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (lattice[k] >= static_cast<double>(half) * spacing - slack) return;
        x[k] += 0.5 * spacing;
      }
    }
    if (euclidean_norm(x) <= radius + slack) kept.push_back(x);
  });
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

Eigen::MatrixXd probe_set(std::span<const ParticleCloud* const> clouds, const ProbePolicy& policy) {
  if (clouds.empty()) throw ShapeError("probe set needs at least one cloud");
  const std::size_t dim = clouds.front()->dim();
  double radius = policy.radius;
  if (radius <= 0.0) {
    radius = 1.0;
    for (const auto* c : clouds) radius = std::max(radius, c->max_norm());
  }
  std::size_t per_axis = policy.per_axis;
  if (per_axis == 0) per_axis = dim == 1 ? 21 : dim == 2 ? 11 : 5;
  const Eigen::MatrixXd lattice = ball_grid(dim, radius, per_axis);
  Eigen::Index total = lattice.cols();
  for (const auto* c : clouds) total += static_cast<Eigen::Index>(c->size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), total);
  Eigen::Index col = 0;
  for (const auto* c : clouds) {
    if (c->dim() != dim) throw ShapeError("probe clouds must share dimension");
    out.middleCols(col, static_cast<Eigen::Index>(c->size())) = c->points();
    col += static_cast<Eigen::Index>(c->size());
  }
  out.middleCols(col, lattice.cols()) = lattice;
  return out;
}

double dsup_probe(const PointMap& f, const PointMap& g, const Eigen::MatrixXd& probes) {
  if (probes.cols() == 0) throw DomainError("dsup probe set is empty");
  double best = 0.0;
  for (Eigen::Index i = 0; i < probes.cols(); ++i) {
    const Point fx = f(probes.col(i));
    const Point gx = g(probes.col(i));
    best = std::max(best, euclidean_distance(fx, gx));
  }
  return best;
}

DccEstimate dcc_estimate(const PointMap& f, const PointMap& g, std::size_t dim, int K, double grid_density) {
  if (K < 1) throw DomainError(fmt::format("d_cc truncation K must be >= 1 (got {})", K));
  if (!(grid_density > 0.0)) throw DomainError("d_cc grid density must be positive");
  const double spacing = 1.0 / grid_density;
  const double slack = 1e-12;
  DccEstimate out;
  out.tail_bound = std::ldexp(1.0, -K);
  double running_sup = 0.0;
  for (int k = 1; k <= K; ++k) {
    if (running_sup < 1.0) {
      // Only the shell k-1 < |x| <= k can raise the supremum over B(0, k).
      const long half = static_cast<long>(std::floor(k / spacing + slack));
      const double inner = static_cast<double>(k - 1);
      for_each_lattice_point(dim, half, spacing, [&](const Point& x) {
        const double r = euclidean_norm(x);
        if (r > k + slack) return;
        if (k > 1 && r <= inner + slack) return;
        running_sup = std::max(running_sup, euclidean_distance(f(x), g(x)));
      });
    }
    out.value += std::ldexp(1.0, -k) * std::min(1.0, running_sup);
  }
  return out;
}

}  // namespace wassinc

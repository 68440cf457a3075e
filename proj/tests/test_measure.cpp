#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wassinc/errors.hpp"
#include "wassinc/measure.hpp"

using namespace wassinc;

TEST_CASE("moment examples") {
  CHECK(moment(ParticleCloud::from_rows({{3, 4}}), 2) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(moment(ParticleCloud::from_rows({{-1}, {1}}), 3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(moment(ParticleCloud::from_rows({{0}, {2}}), 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(moment(ParticleCloud::from_rows({{1}}), 0.5), DomainError);
}

TEST_CASE("moment is absolutely homogeneous") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ParticleCloud c = oracle::random_cloud(gen, 9, 3);
    for (double s : {-2.5, 0.5, 3.0}) {
      const ParticleCloud scaled(s * c.points());
      CHECK(moment(scaled, 1.5) == doctest::Approx(std::abs(s) * moment(c, 1.5)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cloud construction validates input") {
  CHECK_THROWS_AS(ParticleCloud(Eigen::MatrixXd(2, 0)), ShapeError);
  CHECK_THROWS_AS(ParticleCloud(Eigen::MatrixXd(0, 2)), ShapeError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 2);
  bad(0, 1) = NAN;
  CHECK_THROWS_AS(ParticleCloud{bad}, DomainError);
}

TEST_CASE("wasserstein examples") {
  const ParticleCloud a = ParticleCloud::from_rows({{0}, {2}});
  const ParticleCloud b = ParticleCloud::from_rows({{1}, {3}});
  const TransportPlan plan = wasserstein(a, b, 2);
  CHECK(plan.cost == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(plan.assignment == std::vector<std::size_t>{0, 1});

  const TransportPlan self = wasserstein(a, a, 1);
  CHECK(self.cost == 0.0);
  CHECK(self.assignment == std::vector<std::size_t>{0, 1});

  Point x(2), y(2);
  x << 1, 2;
  y << 4, 6;
  CHECK(wasserstein_distance(ParticleCloud::dirac(x), ParticleCloud::dirac(y), 3) == doctest::Approx(5.0));
}

TEST_CASE("wasserstein rejects mismatched shapes and orders") {
  const ParticleCloud a = ParticleCloud::from_rows({{0}, {2}});
  CHECK_THROWS_AS(wasserstein(a, ParticleCloud::from_rows({{0}}), 1), ShapeError);
  CHECK_THROWS_AS(wasserstein(a, ParticleCloud::from_rows({{0, 0}, {1, 1}}), 1), ShapeError);
  CHECK_THROWS_AS(wasserstein(a, a, 0.9), DomainError);
}

TEST_CASE("ties resolve to the lexicographically smallest permutation") {
  // All four points coincide: every permutation is optimal.
  const ParticleCloud a = ParticleCloud::from_rows({{1}, {1}, {1}, {1}});
  CHECK(wasserstein(a, a, 1).assignment == std::vector<std::size_t>{0, 1, 2, 3});
  // Monotone and crossing matchings of {0,1} -> {2,3} cost the same for p = 1.
  const ParticleCloud s = ParticleCloud::from_rows({{0}, {1}});
  const ParticleCloud t = ParticleCloud::from_rows({{3}, {2}});
  CHECK(wasserstein(s, t, 1).assignment == std::vector<std::size_t>{0, 1});
  CHECK(wasserstein(s, t, 2).assignment == std::vector<std::size_t>{1, 0});

  std::vector<double> zero(9, 0.0);
  CHECK(assignment::solve(zero, 3) == std::vector<std::size_t>{0, 1, 2});
  std::vector<double> bad{0, 1, NAN, 0};
  CHECK_THROWS(assignment::solve(bad, 2));
}

TEST_CASE("plan cost matches the stored assignment") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const ParticleCloud a = oracle::random_cloud(gen, 12, 2);
    const ParticleCloud b = oracle::random_cloud(gen, 12, 2);
    const TransportPlan plan = wasserstein(a, b, 2);
    std::vector<bool> hit(12, false);
    for (auto j : plan.assignment) hit.at(j) = true;
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool h) { return h; }));
    CHECK(plan.cost == std::sqrt(assignment_cost_sum(a, b, 2, plan.assignment) / 12.0));
  }
}

TEST_CASE("wasserstein equals exhaustive permutation minimum") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<std::size_t> size(1, 7);
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(gen);
    const std::size_t d = dim(gen);
    const double p = trial % 2 == 0 ? 1.0 : 2.0;
    const ParticleCloud a = oracle::random_cloud(gen, n, d);
    const ParticleCloud b = oracle::random_cloud(gen, n, d);
    CHECK(wasserstein_distance(a, b, p) == oracle::brute_force_wasserstein(a, b, p));
  }
}

TEST_CASE("metric axioms") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> size(1, 16);
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(gen);
    const std::size_t d = dim(gen);
    const double p = 1.0 + (trial % 3) * 0.5;
    const ParticleCloud a = oracle::random_cloud(gen, n, d);
    const ParticleCloud b = oracle::random_cloud(gen, n, d);
    const ParticleCloud c = oracle::random_cloud(gen, n, d);
    const double ab = wasserstein_distance(a, b, p);
    CHECK(std::abs(ab - wasserstein_distance(b, a, p)) <= 1e-9);
    CHECK(wasserstein_distance(a, a, p) <= 1e-9);
    CHECK(ab > 1e-9);
    CHECK(wasserstein_distance(a, c, p) <= ab + wasserstein_distance(b, c, p) + 1e-9);
    // Same multiset in another order is at distance 0.
    Eigen::MatrixXd reversed = a.points().rowwise().reverse();
    CHECK(wasserstein_distance(a, ParticleCloud(reversed), p) <= 1e-9);
  }
}

TEST_CASE("order monotonicity and Kantorovich bound") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ParticleCloud a = oracle::random_cloud(gen, 10, 2);
    const ParticleCloud b = oracle::random_cloud(gen, 10, 2, 3.0);
    const double w1 = wasserstein_distance(a, b, 1);
    const double w2 = wasserstein_distance(a, b, 2);
    CHECK(w1 <= w2 + 1e-12);
    // phi(x) = <g, x> + c has Lipschitz constant |g|.
    Point g(2);
    g << std::cos(trial), std::sin(trial) * 2.0;
    const double gap = g.dot(a.mean()) - g.dot(b.mean());
    CHECK(gap <= g.norm() * w1 + 1e-9);
    CHECK(gap <= g.norm() * w2 + 1e-9);
  }
}

TEST_CASE("tail norm examples") {
  const ParticleCloud c = ParticleCloud::from_rows({{0}, {3}});
  CHECK(tail_norm(c, 2, 1, true) == doctest::Approx(2.0));
  CHECK(tail_norm(c, 4, 1, false) == 0.0);
  CHECK(tail_norm(c, 4, 2, true) == 0.0);
  CHECK(tail_norm(c, 0, 2, false) == moment(c, 2));
  CHECK(tail_norm(c, -1, 2, false) == moment(c, 2));
}

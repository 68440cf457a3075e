#include <doctest.h>

#include <cmath>
#include <limits>

#include "wassinc/catalog.hpp"
#include "wassinc/errors.hpp"
#include "wassinc/rng.hpp"
#include "wassinc/verify.hpp"

using namespace wassinc;

namespace {

NonlocalField from_rule(FieldRule rule, RateFunctions rates, Growth growth = Growth::kLocal) {
  NonlocalField f;
  f.label = "test";
  f.rule = std::move(rule);
  f.rates = std::move(rates);
  f.growth = growth;
  return f;
}

double euler_error(double dt) {
  const NonlocalField f = catalog::field("linear_decay", 1, 1.0);
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / dt));
  const Trajectory traj = integrate(f, ParticleCloud::from_rows({{1}}), uniform_grid(1.0, steps), Method::kEuler);
  return std::abs(traj.back().point(0)[0] - std::exp(-1.0));
}

}  // namespace

TEST_CASE("piecewise-constant rates") {
  const PiecewiseConstant r({0, 1, 3}, {2, 0.5});
  CHECK(r(0.5) == 2.0);
  CHECK(r(1.0) == 0.5);
  CHECK(r(3.0) == 0.5);
  CHECK(r.integral(0, 3) == 3.0);
  CHECK(r.integral(0.5, 2) == doctest::Approx(1.5));
  CHECK(r.integral(0, 0.7) + r.integral(0.7, 2.2) == doctest::Approx(r.integral(0, 2.2)).epsilon(1e-15));
  CHECK(r.sup() == 2.0);
  CHECK(r.scaled(2).integral(0, 3) == 6.0);
  const PiecewiseConstant s({0, 2, 3}, {1, 4});
  const PiecewiseConstant mx = PiecewiseConstant::max(r, s);
  CHECK(mx(0.5) == 2.0);
  CHECK(mx(1.5) == 1.0);
  CHECK(mx(2.5) == 4.0);
  CHECK_THROWS_AS(PiecewiseConstant({0, 1}, {-1}), DomainError);
  CHECK_THROWS_AS(PiecewiseConstant({1, 0}, {1}), DomainError);
  CHECK_THROWS_AS(PiecewiseConstant({0, 1}, {1, 2}), ShapeError);
}

TEST_CASE("zero field keeps the cloud fixed") {
  const ParticleCloud start = ParticleCloud::from_rows({{1, 2}, {-3, 0.5}});
  const Trajectory traj = integrate(catalog::field("zero", 2, 1.0), start, uniform_grid(1.0, 10));
  REQUIRE(traj.nodes() == 11);
  for (const auto& c : traj.clouds()) CHECK(c.points() == start.points());
}

TEST_CASE("linear decay against the closed form") {
  CHECK(euler_error(1e-3) < 2e-4);
  const double e1 = euler_error(1e-2), e2 = euler_error(5e-3), e3 = euler_error(2.5e-3);
  CHECK(e1 / e2 >= 1.8);
  CHECK(e1 / e2 <= 2.2);
  CHECK(e2 / e3 >= 1.8);
  CHECK(e2 / e3 <= 2.2);
  const NonlocalField f = catalog::field("linear_decay", 1, 1.0);
  const Trajectory rk = integrate(f, ParticleCloud::from_rows({{1}}), uniform_grid(1.0, 100), Method::kRk4);
  CHECK(std::abs(rk.back().point(0)[0] - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("mean-field attraction from a symmetric pair") {
  const NonlocalField f = catalog::field("mean_attraction:1", 1, 1.0);
  const ParticleCloud start = ParticleCloud::from_rows({{-1}, {1}});
  const auto grid = uniform_grid(1.0, 100);
  const Trajectory rk = integrate(f, start, grid, Method::kRk4);
  const Trajectory eu = integrate(f, start, uniform_grid(1.0, 1000), Method::kEuler);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(rk.cloud(k).point(0)[0] == doctest::Approx(-std::exp(-grid[k])).epsilon(1e-9));
    CHECK(rk.cloud(k).point(1)[0] == doctest::Approx(std::exp(-grid[k])).epsilon(1e-9));
  }
  CHECK(std::abs(eu.back().point(1)[0] - std::exp(-1.0)) < 2e-4);
}

TEST_CASE("measure-independent fields push forward particle by particle") {
  const NonlocalField f = catalog::field("rotation", 2, 2.0);
  const ParticleCloud start = ParticleCloud::from_rows({{1, 0}, {0.5, -2}, {3, 3}});
  const auto grid = uniform_grid(2.0, 50);
  for (Method m : {Method::kEuler, Method::kRk4}) {
    const Trajectory whole = integrate(f, start, grid, m);
    for (std::size_t i = 0; i < start.size(); ++i) {
      const Trajectory single = integrate(f, ParticleCloud::dirac(start.point(i)), grid, m);
      for (std::size_t k = 0; k < grid.size(); ++k) CHECK(single.cloud(k).point(0) == whole.cloud(k).point(i));
    }
  }
}

TEST_CASE("particle paths obey the superposition bound") {
  for (const std::string label : {"linear_decay", "bounded_kernel", "rotation", "constant:1,-2"}) {
    const NonlocalField f = catalog::field(label, 2, 1.5);
    const ParticleCloud start = ParticleCloud::from_rows({{1, 0}, {0.5, -2}, {3, 3}, {0, 0}});
    const Trajectory traj = integrate(f, start, uniform_grid(1.5, 150));
    const double m_norm = f.rates.m.integral(0, 1.5);
    const double c_t = std::max(1.0, m_norm) * std::exp(m_norm);
    for (std::size_t i = 0; i < start.size(); ++i) {
      double path_max = 0.0;
      for (const auto& c : traj.clouds()) path_max = std::max(path_max, c.point(i).norm());
      CHECK(path_max <= 1.05 * c_t * (1.0 + start.point(i).norm()));
    }
  }
}

TEST_CASE("frozen measure lookup") {
  // v = mean(M(t)) with M frozen at t - delay reads the source's start before delay.
  NonlocalField f = from_rule([](double, const ParticleCloud& mu, PointRef) -> Point { return mu.mean(); },
                              RateFunctions::constant(1.0, 1, 0, 1));
  const auto grid = uniform_grid(1.0, 4);
  std::vector<ParticleCloud> clouds;
  for (double t : grid) clouds.push_back(ParticleCloud::from_rows({{t}}));
  const Trajectory source(grid, clouds);
  const Trajectory out = integrate(f, ParticleCloud::from_rows({{0}}), grid, Method::kEuler, frozen(source, 0.5));
  // Velocities on the four steps: source at -0.5, -0.25, 0, 0.25 -> 0, 0, 0, 0.25.
  CHECK(out.back().point(0)[0] == doctest::Approx(0.25 * 0.25));
  CHECK_THROWS_AS(integrate(f, ParticleCloud::from_rows({{0}}), grid, Method::kEuler, frozen(source, -1)), DomainError);
}

TEST_CASE("integrate rejects malformed grids and reports blow-up") {
  const NonlocalField f = catalog::field("linear_decay", 1, 1.0);
  const ParticleCloud start = ParticleCloud::from_rows({{1}});
  std::vector<double> empty;
  CHECK_THROWS_AS(integrate(f, start, empty), ShapeError);
  std::vector<double> shifted{0.5, 1.0};
  CHECK_THROWS_AS(integrate(f, start, shifted), ShapeError);
  std::vector<double> unordered{0.0, 0.5, 0.5};
  CHECK_THROWS_AS(integrate(f, start, unordered), ShapeError);

  const NonlocalField wild = from_rule([](double, const ParticleCloud&, PointRef x) -> Point { return 1e200 * x; },
                                       RateFunctions::constant(1.0, 1e200, 1e200, 0));
  try {
    integrate(wild, start, uniform_grid(1.0, 10));
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= 10);
  }
}

TEST_CASE("trajectory evaluation is left-constant") {
  const auto grid = uniform_grid(1.0, 4);
  std::vector<ParticleCloud> clouds;
  for (double t : grid) clouds.push_back(ParticleCloud::from_rows({{t}}));
  const Trajectory traj(grid, clouds);
  CHECK(traj.node_at(-1) == 0);
  CHECK(traj.node_at(0.3) == 1);
  CHECK(traj.node_at(0.5) == 2);
  CHECK(traj.node_at(0.5 - 1e-15) == 2);
  CHECK(traj.node_at(7) == 4);
}

TEST_CASE("probe d_sup examples") {
  const PointMap identity = [](PointRef x) -> Point { return x; };
  const PointMap zero = [](PointRef x) -> Point { return Point::Zero(x.size()); };
  const Eigen::MatrixXd probes = ball_grid(1, 2.0, 41);
  CHECK(probes.cols() == 41);
  CHECK(dsup_probe(identity, zero, probes) == 2.0);
  CHECK(dsup_probe(identity, identity, probes) == 0.0);
  Point u1(2), u2(2);
  u1 << 1, 0;
  u2 << -2, 4;
  const PointMap c1 = [&](PointRef) -> Point { return u1; };
  const PointMap c2 = [&](PointRef) -> Point { return u2; };
  CHECK(dsup_probe(c1, c2, ball_grid(2, 1.0, 5)) == 5.0);
  CHECK_THROWS_AS(dsup_probe(c1, c2, Eigen::MatrixXd(2, 0)), DomainError);
}

TEST_CASE("probe sets contain the atoms and a ball grid") {
  const ParticleCloud a = ParticleCloud::from_rows({{5, 0}});
  const ParticleCloud* clouds[] = {&a};
  const Eigen::MatrixXd pts = probe_set(clouds, ProbePolicy{});
  bool has_atom = false;
  double widest = 0.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    has_atom = has_atom || (pts(0, i) == 5.0 && pts(1, i) == 0.0);
    widest = std::max(widest, pts.col(i).norm());
  }
  CHECK(has_atom);
  CHECK(widest == doctest::Approx(5.0));
  CHECK(pts.cols() == 1 + ball_grid(2, 5.0, 11).cols());
}

TEST_CASE("compact-convergence metric examples") {
  const PointMap identity = [](PointRef x) -> Point { return x; };
  const PointMap zero = [](PointRef x) -> Point { return Point::Zero(x.size()); };
  const PointMap three = [](PointRef x) -> Point { return Point::Constant(x.size(), 3.0); };
  const DccEstimate same = dcc_estimate(identity, identity, 1, 10, 4);
  CHECK(same.value == 0.0);
  CHECK(same.tail_bound == std::ldexp(1.0, -10));
  CHECK(dcc_estimate(three, zero, 1, 20, 2).value == doctest::Approx(1.0 - std::ldexp(1.0, -20)).epsilon(1e-15));
  CHECK(dcc_estimate(identity, zero, 1, 2, 10).value == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(dcc_estimate(identity, zero, 1, 0, 10), DomainError);
  CHECK_THROWS_AS(dcc_estimate(identity, zero, 1, 3, 0), DomainError);
}

TEST_CASE("catalog labels") {
  CHECK(catalog::field("constant:1,0", 2, 1.0)(0, ParticleCloud::from_rows({{0, 0}}), Point::Zero(2)) ==
        (Point(2) << 1, 0).finished());
  CHECK_THROWS_AS(catalog::field("constant:1", 2, 1.0), ConfigError);
  CHECK_THROWS_AS(catalog::field("rotation", 3, 1.0), ConfigError);
  CHECK_THROWS_AS(catalog::field("mean_attraction:abc", 1, 1.0), ConfigError);
  try {
    catalog::field("does_not_exist", 1, 1.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("does_not_exist") != std::string::npos);
  }
}

TEST_CASE("catalog fields respect their declared rates") {
  const ParticleCloud start = ParticleCloud::from_rows({{1, 0}, {0.5, -2}, {3, 3}, {-1, 1}, {0, 2}});
  const std::vector<double> grid = uniform_grid(1.0, 20);
  for (const std::string label : {"zero", "constant:1,-2", "linear_decay", "mean_attraction:0.7", "bounded_kernel", "rotation"}) {
    const NonlocalField f = catalog::field(label, 2, 1.0);
    const NonlocalField members[] = {f};
    const BoundReport r = verify_hypotheses(members, start, SimulationSetup{grid, Method::kEuler, 2.0, 0.0}, 1000, 3);
    CHECK(r.constant("samples") >= 1000);
    INFO(label);
    CHECK(r.constant("max_ratio_m") <= 1.0 + 1e-12);
    CHECK(r.constant("max_ratio_l") <= 1.0 + 1e-12);
    CHECK(r.constant("max_ratio_L") <= 1.0 + 1e-12);
  }
}

TEST_CASE("counter-based generator") {
  // Independent evaluation of the documented recipe.
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t z = 42 + 0x9E3779B97F4A7C15ULL * 8 + 0xD1B54A32D192ED03ULL * 3;
  CHECK(rng::bits(42, 2, 7) == mix(mix(z)));
  for (std::uint64_t c = 0; c < 1000; ++c) {
    const double u = rng::uniform(1, 0, c);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng::index(1, 0, c, 7) < 7);
  }
  CHECK(rng::normal(5, 0, 3) == rng::normal(5, 0, 3));
  double mean = 0.0;
  for (std::uint64_t c = 0; c < 20000; ++c) mean += rng::normal(9, 1, c);
  CHECK(std::abs(mean / 20000) < 0.05);
}

TEST_CASE("absolute continuity estimate on catalog fields") {
  const ParticleCloud start = ParticleCloud::from_rows({{1, 0}, {0.5, -2}, {3, 3}, {-1, 1}});
  const std::vector<double> grid = uniform_grid(1.0, 20);
  for (const std::string label : {"linear_decay", "mean_attraction:1", "bounded_kernel", "rotation"}) {
    const BoundReport r =
        verify_abs_continuity(catalog::field(label, 2, 1.0), start, SimulationSetup{grid, Method::kEuler, 2.0, 0.05});
    INFO(label);
    CHECK(r.pass());
    CHECK(r.rows.size() == grid.size());
  }
}

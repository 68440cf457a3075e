#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wassinc/catalog.hpp"
#include "wassinc/errors.hpp"
#include "wassinc/filippov.hpp"

using namespace wassinc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point scalar(double v) { return (Point(1) << v).finished(); }

ControlledFamily bang_bang(double horizon) { return catalog::constants_family({scalar(-1), scalar(1)}, horizon); }

Trajectory still_reference(const ParticleCloud& start, double horizon, std::size_t steps) {
  return integrate(catalog::field("zero", start.dim(), horizon), start, uniform_grid(horizon, steps));
}

FilippovOptions opts(double p, double R) {
  FilippovOptions o;
  o.p = p;
  o.R = R;
  return o;
}

}  // namespace

TEST_CASE("C_p and C_p' constants") {
  const ParticleCloud zero = ParticleCloud::from_rows({{0}});
  const auto grid = uniform_grid(1.0, 4);
  const std::vector<double> eta(grid.size(), 0.0);
  const RateFunctions rates = RateFunctions::constant(1.0, 1.0, 0.0, 0.0);
  BoundInputs in{0.0, grid, eta, &rates, 1.0, kInf, &zero, 0.0, 0.0};
  FilippovCertificate c = compute_bound(in);
  CHECK(c.constants.C_p == 1.0);
  CHECK(c.constants.C_p_prime == 1.0);
  in.p = 2.0;
  c = compute_bound(in);
  CHECK(c.constants.C_p == std::sqrt(2.0));
  CHECK(c.constants.C_p_prime == 1.0);
  in.p = 3.0;
  c = compute_bound(in);
  CHECK(c.constants.C_p == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-15));
  CHECK(c.constants.C_p_prime == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mismatch examples") {
  const ControlledFamily family = bang_bang(1.0);
  const Trajectory nu = still_reference(ParticleCloud::from_rows({{0}}), 1.0, 10);
  const NonlocalField zero = catalog::field("zero", 1, 1.0);
  for (double e : mismatch(family, nu, zero, kInf)) CHECK(e == 1.0);
  for (double e : mismatch(family, nu, zero, 0.5)) CHECK(e == 1.0);

  const NonlocalField member = family.slice(1);
  const Trajectory moving = integrate(member, ParticleCloud::from_rows({{0}, {2}}), uniform_grid(1.0, 10));
  for (double e : mismatch(family, moving, member, kInf)) CHECK(e == 0.0);

  const Trajectory far = still_reference(ParticleCloud::from_rows({{2}, {-3}}), 1.0, 5);
  for (double e : mismatch(family, far, zero, 1.0)) CHECK(e == 0.0);

  CHECK_THROWS_AS(mismatch(family, nu, zero, 0.0), DomainError);
  CHECK_THROWS_AS(mismatch(family, nu, zero, -1.0), DomainError);
}

TEST_CASE("constant controls track a resting reference tightly") {
  const ControlledFamily family = bang_bang(1.0);
  const ParticleCloud origin = ParticleCloud::from_rows({{0}});
  const Trajectory nu = still_reference(origin, 1.0, 1000);
  const FilippovResult r = filippov_track(family, nu, catalog::field("zero", 1, 1.0), origin, opts(1.0, kInf));
  const FilippovCertificate& c = r.certificate;
  CHECK(c.converged);
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    const double t = c.grid[k];
    CHECK(r.trajectory.cloud(k).point(0)[0] == doctest::Approx(-t).epsilon(1e-12));
    CHECK(std::abs(c.measured[k] - t) <= 1e-6);
    CHECK(std::abs(c.bound[k] - t) <= 1e-6);
    CHECK(c.chi[k] == 0.0);
    CHECK(c.error_term[k] == 0.0);
  }
  CHECK(c.distance_holds(0.0));
  CHECK(c.velocity_holds(0.05));
}

TEST_CASE("linear decay tracked from a displaced start") {
  ControlledFamily family = catalog::gain_family(catalog::field("linear_decay", 1, 1.0), {1.0});
  family.rates = RateFunctions::constant(1.0, 1.0, 1.0, 0.0);
  const NonlocalField w = family.slice(0);
  const auto grid = uniform_grid(1.0, 1000);
  const Trajectory nu = integrate(w, ParticleCloud::from_rows({{0}}), grid);
  const FilippovResult r = filippov_track(family, nu, w, ParticleCloud::from_rows({{1}}), opts(1.0, kInf));
  const FilippovCertificate& c = r.certificate;
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    const double t = c.grid[k];
    CHECK(c.eta[k] == 0.0);
    CHECK(c.measured[k] == doctest::Approx(std::exp(-t)).epsilon(1e-3));
    CHECK(c.bound[k] == doctest::Approx(std::exp(t)).epsilon(1e-12));
  }
  CHECK(c.distance_holds(0.0));
  CHECK(c.velocity_holds(0.05));
}

TEST_CASE("member reference converges after one increment") {
  const ControlledFamily family =
      catalog::gain_family(catalog::field("mean_attraction:1", 2, 1.0), {0.5, 1.0, 2.0});
  const NonlocalField w = family.slice(1);
  const ParticleCloud start = ParticleCloud::from_rows({{1, 0}, {0, 2}, {-1, -1}});
  const Trajectory nu = integrate(w, start, uniform_grid(1.0, 20), Method::kEuler);
  const FilippovResult r = filippov_track(family, nu, w, start, opts(2.0, kInf));
  CHECK(r.certificate.converged);
  CHECK(r.certificate.iterations == 1);
  CHECK(r.certificate.status == "converged");
  for (double m : r.certificate.measured) CHECK(m <= 1e-12);
  for (auto u : r.signal.indices()) CHECK(u == 1);
}

TEST_CASE("iteration budget exhaustion is reported") {
  const ControlledFamily family =
      catalog::gain_family(catalog::field("mean_attraction:1", 2, 1.0), {0.5, 1.0, 2.0});
  const NonlocalField w = family.slice(1);
  const Trajectory nu = integrate(w, ParticleCloud::from_rows({{1, 0}, {0, 2}}), uniform_grid(1.0, 20));
  FilippovOptions o = opts(1.0, kInf);
  o.max_iter = 1;
  const FilippovResult r = filippov_track(family, nu, w, ParticleCloud::from_rows({{3, 3}, {-2, 1}}), o);
  CHECK_FALSE(r.certificate.converged);
  CHECK(r.certificate.status == "iteration_not_converged");
  CHECK(r.certificate.iterations == 1);
  CHECK(r.certificate.increments.size() == 1);

  o.tol = 0.0;
  CHECK_THROWS_AS(filippov_track(family, nu, w, ParticleCloud::from_rows({{3, 3}, {-2, 1}}), o), DomainError);
  o.tol = 1e-10;
  o.max_iter = 0;
  CHECK_THROWS_AS(filippov_track(family, nu, w, ParticleCloud::from_rows({{3, 3}, {-2, 1}}), o), DomainError);
}

TEST_CASE("certified bound and iterate contraction on a measure-dependent family") {
  const ControlledFamily family =
      catalog::gain_family(catalog::field("mean_attraction:1", 2, 1.0), {0.5, 1.0, 2.0});
  const NonlocalField w = catalog::field("mean_attraction:1.5", 2, 1.0);
  const Trajectory nu = integrate(w, ParticleCloud::from_rows({{1, 0}, {0, 2}, {-1, 1}}), uniform_grid(1.0, 50));
  const ParticleCloud start = ParticleCloud::from_rows({{1.5, 0}, {0, 2.5}, {-1, 0.5}});
  for (double p : {1.0, 2.0}) {
    const FilippovResult r = filippov_track(family, nu, w, start, opts(p, kInf));
    const FilippovCertificate& c = r.certificate;
    CHECK(c.converged);
    CHECK(c.distance_holds(0.05));
    CHECK(c.velocity_holds(0.05));
    for (std::size_t k = 1; k < c.bound.size(); ++k) CHECK(c.bound[k] >= c.bound[k - 1]);
    CHECK(c.increments.size() >= 2);
    const double chi_bar = *std::max_element(c.chi.begin(), c.chi.end());
    for (std::size_t k = 1; k < c.increments.size(); ++k) {
      if (c.increments[k - 1] == 0.0) continue;
      const double n = static_cast<double>(k + 1);
      CHECK(c.increments[k] / c.increments[k - 1] <= 2.0 * chi_bar / n);
    }
  }
}

TEST_CASE("bound vanishes when every term does") {
  const ParticleCloud nu0 = ParticleCloud::from_rows({{0.5}, {-0.25}});
  const auto grid = uniform_grid(1.0, 8);
  const std::vector<double> eta(grid.size(), 0.0);
  const RateFunctions rates = RateFunctions::constant(1.0, 0.01, 0.5, 0.5);
  const BoundInputs in{0.0, grid, eta, &rates, 1.0, 1e4, &nu0, moment(nu0, 1.0), moment(nu0, 1.0)};
  const FilippovCertificate c = compute_bound(in);
  CHECK(c.constants.R / c.constants.script_C_T - 1.0 > 0.5);
  for (double b : c.bound) CHECK(b == 0.0);
  for (double e : c.error_term) CHECK(e == 0.0);
}

TEST_CASE("bound is nondecreasing with positive mismatch and finite radius") {
  const ParticleCloud nu0 = ParticleCloud::from_rows({{0.5}, {3.0}, {-8.0}});
  const auto grid = uniform_grid(2.0, 40);
  std::vector<double> eta;
  for (double t : grid) eta.push_back(0.5 + 0.5 * std::sin(5.0 * t));
  const RateFunctions rates{PiecewiseConstant({0.0, 1.0, 2.0}, {0.2, 0.4}), PiecewiseConstant({0.0, 2.0}, {0.3}),
                            PiecewiseConstant({0.0, 0.5, 2.0}, {0.1, 0.0})};
  for (double R : {2.0, 50.0, kInf}) {
    const BoundInputs in{0.3, grid, eta, &rates, 2.0, R, &nu0, 1.0, moment(nu0, 2.0)};
    const FilippovCertificate c = compute_bound(in);
    for (std::size_t k = 1; k < c.bound.size(); ++k) {
      CHECK(c.bound[k] >= c.bound[k - 1]);
      CHECK(c.chi[k] >= c.chi[k - 1]);
    }
    CHECK(c.bound.front() == doctest::Approx(std::sqrt(2.0) * 0.3).epsilon(1e-12));
  }
}

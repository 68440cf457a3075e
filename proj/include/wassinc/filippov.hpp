#pragma once

#include <string>
#include <vector>

#include "wassinc/inclusion.hpp"

namespace wassinc {

struct FilippovConstants {
  double C_p = 1.0;
  double C_p_prime = 1.0;
  double script_C = 0.0;    // uniform moment constant
  double script_C_T = 1.0;  // path-growth constant built from script_C
  double R = 0.0;           // localisation radius (may be +inf)
};

struct FilippovCertificate {
  std::vector<double> grid;
  std::vector<double> eta;            // mismatch eta_R(t)
  std::vector<double> bound;          // D_p(t)
  std::vector<double> chi;            // chi_p(t)
  std::vector<double> error_term;     // E_nu(t, R)
  std::vector<double> measured;       // W_p(mu(t), nu(t))
  std::vector<double> velocity_gap;   // max over nu(t)-atoms in B(0,R) of |v - w|
  std::vector<double> velocity_bound; // eta_R(t) + L(t) D_p(t)
  std::vector<double> increments;     // sup_t W_p(mu_k, mu_{k+1}) per iterate
  FilippovConstants constants;
  std::size_t iterations = 0;
  bool converged = true;
  std::string status = "converged";  // or "iteration_not_converged"

  // measured(t) <= D_p(t) (1 + slack) at every grid time.
  bool distance_holds(double slack) const;
  bool velocity_holds(double slack) const;
};

// At each grid time: min over u of max over atoms y of nu(t) with |y| <= R
// of |w(t, nu(t), y) - v(t, nu(t), u, y)| (0 when the ball holds no atom).
// R = +inf gives the global mismatch.  Throws DomainError when R <= 0.
std::vector<double> mismatch(const ControlledFamily& family, const Trajectory& reference, const NonlocalField& w,
                             double R);

struct BoundInputs {
  double initial_distance = 0.0;  // W_p(mu^0, nu(0))
  std::span<const double> grid;
  std::span<const double> eta;
  const RateFunctions* rates = nullptr;
  double p = 1.0;
  double R = 0.0;
  const ParticleCloud* reference_start = nullptr;
  double start_moment = 0.0;      // M_p(mu^0)
  double reference_moment = 0.0;  // M_p(nu(0))
};

// Fills grid, eta, chi, error_term, bound and constants of a certificate.
FilippovCertificate compute_bound(const BoundInputs& inputs);

struct FilippovResult {
  Trajectory trajectory;
  ControlSignal signal;
  // The cloud series each selection was chosen against (the previous iterate).
  Trajectory selection_measure;
  FilippovCertificate certificate;
};

struct FilippovOptions {
  double p = 1.0;
  double R = 0.0;
  double tol = 1e-10;
  std::size_t max_iter = 20;
  ProbePolicy probes;  // radius 0: R when finite, else the default policy
};

// Picard-style tracking of the reference curve nu (driven by w) inside the
// family, starting from `start`.  Non-convergence is reported in the
// certificate rather than thrown.
FilippovResult filippov_track(const ControlledFamily& family, const Trajectory& reference, const NonlocalField& w,
                              const ParticleCloud& start, const FilippovOptions& options);

}  // namespace wassinc

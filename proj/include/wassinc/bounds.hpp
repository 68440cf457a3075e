#pragma once

#include <span>
#include <vector>

#include "wassinc/measure.hpp"
#include "wassinc/rates.hpp"

namespace wassinc::bounds {

// C_p = 2^((p-1)/p) and C_p' = 2^(p-1) / p.
double transport_constant(double p);
double exponent_constant(double p);

// C_p (M_p(mu^0) + int_0^t m(1 + M(s)) ds) exp(C_p' ||m||^p), where `extra`
// integrates the a-priori moment M(.) of the nonlocal growth bound
// (pass 0 for fields with local growth).  `m_norm` is the L^1 norm entering
// the exponent.
double momentum_bound(double p, double initial_moment, double m_integral_with_extra, double m_norm);

// C_T = max{1, ||m||_1} exp(||m||_1), the path-growth constant of the
// equi-integrability and localised stability estimates.
double path_constant(double m_norm);

// Uniform moment constant assembled from the recurrent integral estimate:
//   f0    = C_p (M_p(nu0) + ||m||) exp(C_p' ||m||^p)
//   alpha = C_p (1 + M_p(mu0) + ||m|| (1 + f0)) exp(C_p' ||m||^p)
//   C     = (alpha + f0) exp(alpha ||m||)
double uniform_moment_constant(double p, double start_moment, double reference_moment, double m_norm);

// C_T = max{1, (1 + C) ||m||} exp((1 + C) ||m||).
double tracking_path_constant(double moment_constant, double m_norm);

// 2 ||m||_{[0,t]} (1 + C_T) * tail_norm(nu0, R / C_T - 1, p, shifted).  An
// empty tail contributes exactly 0 even when C_T overflows; R = +inf gives 0.
double localisation_error(const ParticleCloud& reference_start, double p, double radius, double path_const,
                          double m_integral);

// Left-endpoint cumulative integral of samples on `grid`: out[k] = sum_{j<k} f_j (t_{j+1} - t_j).
std::vector<double> cumulative_left(std::span<const double> grid, std::span<const double> samples);

}  // namespace wassinc::bounds

#include "wassinc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wassinc/errors.hpp"

namespace wassinc::bounds {

double transport_constant(double p) { return std::pow(2.0, (p - 1.0) / p); }

double exponent_constant(double p) { return std::pow(2.0, p - 1.0) / p; }

double momentum_bound(double p, double initial_moment, double m_integral_with_extra, double m_norm) {
  return transport_constant(p) * (initial_moment + m_integral_with_extra) *
         std::exp(exponent_constant(p) * std::pow(m_norm, p));
}

double path_constant(double m_norm) { return std::max(1.0, m_norm) * std::exp(m_norm); }

double uniform_moment_constant(double p, double start_moment, double reference_moment, double m_norm) {
  const double cp = transport_constant(p);
  const double growth = std::exp(exponent_constant(p) * std::pow(m_norm, p));
  const double f0 = cp * (reference_moment + m_norm) * growth;
  const double alpha = cp * (1.0 + start_moment + m_norm * (1.0 + f0)) * growth;
  return (alpha + f0) * std::exp(alpha * m_norm);
}

double tracking_path_constant(double moment_constant, double m_norm) {
  const double rate = (1.0 + moment_constant) * m_norm;
  return std::max(1.0, rate) * std::exp(rate);
}

double localisation_error(const ParticleCloud& reference_start, double p, double radius, double path_const,
                          double m_integral) {
  if (std::isinf(radius)) return 0.0;
  if (!(radius > 0.0)) throw DomainError("localisation radius must be positive");
  const double tail = tail_norm(reference_start, radius / path_const - 1.0, p, true);
  if (tail == 0.0 || m_integral == 0.0) return 0.0;
  return 2.0 * m_integral * (1.0 + path_const) * tail;
}

std::vector<double> cumulative_left(std::span<const double> grid, std::span<const double> samples) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    out[k] = out[k - 1] + samples[k - 1] * (grid[k] - grid[k - 1]);
  }
  return out;
}

}  // namespace wassinc::bounds

#pragma once

#include <vector>

namespace wassinc {

// Nonnegative piecewise-constant function on [breakpoints.front(), breakpoints.back()].
// values[i] holds on [breakpoints[i], breakpoints[i+1]); the last value also
// holds at the right end point.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values);

  static PiecewiseConstant constant(double horizon, double value);

  double operator()(double t) const;

  // Exact integral over [a, b] intersected with the support; additive in (a, b).
  double integral(double a, double b) const;
  double norm1() const { return integral(start(), end()); }
  double sup() const;

  double start() const { return breakpoints_.front(); }
  double end() const { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

  // Pointwise maximum / scaling, on the union of breakpoints.
  static PiecewiseConstant max(const PiecewiseConstant& a, const PiecewiseConstant& b);
  PiecewiseConstant scaled(double factor) const;

 private:
  std::vector<double> breakpoints_{0.0, 1.0};
  std::vector<double> values_{0.0};
};

// Integrable rates of the sublinearity (m), spatial Lipschitz (l) and
// measure Lipschitz (L) hypotheses.
struct RateFunctions {
  PiecewiseConstant m;
  PiecewiseConstant l;
  PiecewiseConstant L;

  static RateFunctions constant(double horizon, double m, double l, double L);
  double horizon() const { return m.end(); }
};

}  // namespace wassinc

#include "wassinc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "wassinc/errors.hpp"

namespace wassinc {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
    throw ShapeError(fmt::format("piecewise-constant rate needs k+1 breakpoints for k values (got {} and {})",
                                 breakpoints_.size(), values_.size()));
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw DomainError("rate breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("rate values must be finite and nonnegative");
  }
}

PiecewiseConstant PiecewiseConstant::constant(double horizon, double value) {
  return PiecewiseConstant({0.0, horizon}, {value});
}

double PiecewiseConstant::operator()(double t) const {
  if (t <= breakpoints_.front()) return values_.front();
  if (t >= breakpoints_.back()) return values_.back();
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double PiecewiseConstant::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double lo = std::max(a, breakpoints_[i]);
    const double hi = std::min(b, breakpoints_[i + 1]);
    if (hi > lo) acc += values_[i] * (hi - lo);
  }
  return acc;
}

double PiecewiseConstant::sup() const { return *std::max_element(values_.begin(), values_.end()); }

PiecewiseConstant PiecewiseConstant::max(const PiecewiseConstant& a, const PiecewiseConstant& b) {
  std::vector<double> knots = a.breakpoints_;
  knots.insert(knots.end(), b.breakpoints_.begin(), b.breakpoints_.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> values;
  values.reserve(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    values.push_back(std::max(a(mid), b(mid)));
  }
  return PiecewiseConstant(std::move(knots), std::move(values));
}

PiecewiseConstant PiecewiseConstant::scaled(double factor) const {
  std::vector<double> values = values_;
  for (double& v : values) v *= factor;
  return PiecewiseConstant(breakpoints_, std::move(values));
}

RateFunctions RateFunctions::constant(double horizon, double m, double l, double L) {
  return {PiecewiseConstant::constant(horizon, m), PiecewiseConstant::constant(horizon, l),
          PiecewiseConstant::constant(horizon, L)};
}

}  // namespace wassinc

#pragma once

#include <string>
#include <vector>

#include "wassinc/inclusion.hpp"

namespace wassinc::catalog {

// Built-in fields, referenced by label:
//   zero                  v = 0
//   constant:<c1,..,cd>   v = c
//   linear_decay          v = -x
//   mean_attraction:<k>   v = k (mean(mu) - x)
//   bounded_kernel        v = (1/N) sum_j -(x - y_j) / (1 + |x - y_j|)
//   rotation              v = (-x2, x1), d = 2 only
// Rates are the catalog defaults on [0, horizon]; callers may replace them.
// Throws ConfigError for unknown labels or malformed parameters.
NonlocalField field(const std::string& label, std::size_t dim, double horizon);

std::vector<std::string> field_labels();

// v(t, mu, u, x) = u (constant velocity); m = max |u|, l = L = 0.
ControlledFamily constants_family(const std::vector<Point>& velocities, double horizon);

// v(t, mu, u, x) = g_u * base(t, mu, x); base rates scaled by max |g_u|.
ControlledFamily gain_family(const NonlocalField& base, const std::vector<double>& gains);

}  // namespace wassinc::catalog

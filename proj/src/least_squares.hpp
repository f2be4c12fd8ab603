#pragma once

// Thin adapter over Eigen's MINPACK-style Levenberg-Marquardt with a
// forward-difference Jacobian. Internal to the library.

#include <functional>
#include <span>
#include <vector>

namespace agni::detail {

using ResidualFn = std::function<void(std::span<const double> x, std::span<double> r)>;

struct LsqResult {
  std::vector<double> x;
  std::vector<double> residuals;
  bool converged = false;
  int status = 0;
  int evaluations = 0;
};

/// Minimizes sum(r_i(x)^2) from x0. Requires num_residuals >= x0.size().
LsqResult least_squares(const ResidualFn& fn, std::vector<double> x0, std::size_t num_residuals,
                        int max_evaluations = 2000);

}  // namespace agni::detail

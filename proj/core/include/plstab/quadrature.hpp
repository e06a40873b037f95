#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace plstab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of per-interval Richardson estimates
  std::size_t evaluations = 0;
  bool converged = true;
};

inline constexpr std::size_t kDefaultEvalBudget = 4'000'000;

// Adaptive Simpson with Richardson correction on [a, b], a < b finite.
// Intervals are processed in a fixed depth-first order so the result is
// reproducible bit for bit.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, std::size_t max_evals = kDefaultEvalBudget,
                                  int min_depth = 4);

}  // namespace plstab

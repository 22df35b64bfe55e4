#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "dualopt/kernel.hpp"

namespace dualopt {

// Abstract cost side of the optimization: kappa(c) is the expected cost of
// one unit of payoff received on the top (1-c) fraction of ranked states.
// The solver only sees this interface, so closed-form kernel costs and
// Monte Carlo rank-based costs share one engine.
//
// tail_cost_near_one evaluates kappa(1 - eps) parametrized by eps directly;
// the tail probe needs eps far below machine epsilon, where forming 1 - eps
// would round to 1.
struct CostProfile {
  std::function<double(double)> tail_cost;           // kappa(c), c in [0,1)
  std::function<double(double)> tail_cost_near_one;  // kappa(1-eps), eps in (0,1]
  double total_cost = 0.0;                           // delta = kappa(0)
  double lower_bound_hint = 0.0;  // limiting per-unit cost of the deepest tail slice
  bool strictly_decreasing = true;
};

inline CostProfile cost_profile_from_kernel(const KernelModel& kernel) {
  CostProfile p;
  p.tail_cost = [kernel](double c) { return kernel.partial_expectation(c); };
  p.tail_cost_near_one = [kernel](double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw std::domain_error("tail_cost_near_one: eps must lie in (0,1]");
    }
    return kernel.lower_partial_mean(eps);
  };
  p.total_cost = kernel.mean();
  p.lower_bound_hint = kernel.essinf();
  p.strictly_decreasing = true;
  return p;
}

// Contract check used by tests and by Monte Carlo profile construction:
// kappa(0) = delta within 1e-10 and positivity / monotonicity on a grid.
// Returns an empty string when the profile conforms.
inline std::string check_cost_profile(const CostProfile& p, int grid = 64) {
  const double k0 = p.tail_cost(0.0);
  if (std::abs(k0 - p.total_cost) > 1e-10 * std::max(1.0, std::abs(p.total_cost))) {
    return "tail_cost(0) = " + std::to_string(k0) + " does not match total_cost = " +
           std::to_string(p.total_cost);
  }
  double prev = k0;
  for (int i = 1; i <= grid; ++i) {
    const double c = static_cast<double>(i) / (grid + 1);
    const double k = p.tail_cost(c);
    if (!(k > 0.0)) return "tail_cost not positive at c = " + std::to_string(c);
    if (p.strictly_decreasing && !(k < prev)) {
      return "tail_cost not strictly decreasing at c = " + std::to_string(c);
    }
    prev = k;
  }
  return "";
}

}  // namespace dualopt

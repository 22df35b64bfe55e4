#pragma once

#include <cmath>
#include <utility>

namespace dualopt {

// Golden-section maximization on [a, b].  Returns the best point evaluated,
// including the endpoints, so a maximum attained at b is not lost.
template <class F>
std::pair<double, double> golden_max(const F& f, double a, double b,
                                     double x_tol = 1e-12, int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double best_x = a, best_f = f(a);
  const double fb = f(b);
  if (fb > best_f) { best_x = b; best_f = fb; }

  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    if (fc > best_f) { best_x = c; best_f = fc; }
    if (fd > best_f) { best_x = d; best_f = fd; }
  }
  return {best_x, best_f};
}

}  // namespace dualopt

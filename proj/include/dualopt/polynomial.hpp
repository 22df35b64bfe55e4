#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dualopt {

// Helpers for low-degree polynomials stored as ascending coefficient
// vectors: p(z) = c[0] + c[1] z + ... + c[n] z^n.
namespace poly {

inline double eval(const std::vector<double>& c, double z) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

// Definite integral of p over [a, b].
inline double integrate(const std::vector<double>& c, double a, double b) {
  double acc = 0.0;
  double pa = 1.0, pb = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    pa *= a;  // a^{i+1}
    pb *= b;
    acc += c[i] / static_cast<double>(i + 1) * (pb - pa);
  }
  return acc;
}

// Coefficients of q(w) = p(1 - w).  Used to integrate stably on intervals
// abutting z = 1, where evaluating antiderivative differences cancels.
inline std::vector<double> reflect_about_one(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  // binomial expansion of (1 - w)^i
  for (std::size_t i = 0; i < n; ++i) {
    double binom = 1.0;
    double sign = 1.0;
    for (std::size_t j = 0; j <= i; ++j) {
      out[j] += c[i] * binom * sign;
      sign = -sign;
      binom = binom * static_cast<double>(i - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

// First derivative coefficients.
inline std::vector<double> derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

// Minimum of p on [a, b] together with its location.  Exact for degree <= 3:
// candidates are the endpoints and the real roots of p' inside (a, b).
inline std::pair<double, double> min_on_interval(const std::vector<double>& c,
                                                 double a, double b) {
  double best = eval(c, a);
  double arg = a;
  auto consider = [&](double z) {
    const double v = eval(c, z);
    if (v < best) { best = v; arg = z; }
  };
  consider(b);
  std::vector<double> d = derivative(c);
  while (!d.empty() && d.back() == 0.0) d.pop_back();
  if (d.size() == 2) {  // linear derivative
    const double root = -d[0] / d[1];
    if (root > a && root < b) consider(root);
  } else if (d.size() == 3) {  // quadratic derivative
    const double disc = d[1] * d[1] - 4.0 * d[2] * d[0];
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double root : {(-d[1] + s) / (2.0 * d[2]), (-d[1] - s) / (2.0 * d[2])}) {
        if (root > a && root < b) consider(root);
      }
    }
  }
  return {best, arg};
}

}  // namespace poly
}  // namespace dualopt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dualopt {

// Adaptive Gauss-Kronrod quadrature (7-15 pair) with interval bisection.
// Intervals are split until the Kronrod error estimate meets the absolute
// tolerance budget, worst interval first.
namespace quad {

namespace detail {

// 15-point Kronrod abscissae on [0,1] side (symmetric) and weights;
// the embedded 7-point Gauss rule uses the odd-indexed nodes.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;
  double error;
};

template <class F>
Interval evaluate(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(mid - half * kKronrodNodes[i]);
    fv[14 - i] = f(mid + half * kKronrodNodes[i]);
  }
  fv[7] = f(mid);
  double kronrod = 0.0;
  for (int i = 0; i < 7; ++i) kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
  kronrod += kKronrodWeights[7] * fv[7];
  double gauss = kGaussWeights[3] * fv[7];
  for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  kronrod *= half;
  gauss *= half;
  const double diff = std::abs(kronrod - gauss);
  // QUADPACK-style sharpened error estimate
  const double err = diff * std::min(1.0, std::pow(200.0 * diff / std::max(std::abs(kronrod), 1e-300), 1.5));
  return {a, b, kronrod, std::max(err, diff * 1e-6)};
}

}  // namespace detail

// Integrate f over [a, b] to absolute tolerance abs_tol.  Throws if the
// subdivision budget is exhausted before the tolerance is met.
template <class F>
double adaptive(const F& f, double a, double b, double abs_tol = 1e-10,
                int max_intervals = 4000) {
  if (a == b) return 0.0;
  std::vector<detail::Interval> heap;
  heap.push_back(detail::evaluate(f, a, b));
  auto cmp = [](const detail::Interval& x, const detail::Interval& y) {
    return x.error < y.error;
  };
  double total_error = heap.front().error;
  while (total_error > abs_tol) {
    if (static_cast<int>(heap.size()) >= max_intervals) {
      throw std::runtime_error("quad::adaptive: tolerance not reached within interval budget");
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const detail::Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Interval left = detail::evaluate(f, worst.a, mid);
    detail::Interval right = detail::evaluate(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  double sum = 0.0;
  for (const auto& iv : heap) sum += iv.value;
  return sum;
}

}  // namespace quad
}  // namespace dualopt

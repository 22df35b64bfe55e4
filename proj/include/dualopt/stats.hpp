#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dualopt {

// Kolmogorov-Smirnov distance between a sample and the uniform law on [0,1].
inline double ks_uniform_statistic(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_uniform_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double z = sample[i];
    d = std::max(d, (i + 1.0) / n - z);
    d = std::max(d, z - static_cast<double>(i) / n);
  }
  return d;
}

// Large-sample 1% critical value for the KS statistic.
inline double ks_critical_1pct(std::size_t n) {
  return 1.62762 / std::sqrt(static_cast<double>(n));
}

// Streaming mean and standard error.
class MeanAccumulator {
 public:
  void add(double v) {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderror() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace dualopt

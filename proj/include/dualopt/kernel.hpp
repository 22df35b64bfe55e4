#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualopt/normal.hpp"

namespace dualopt {

enum class KernelFamily { lognormal, uniform, shifted_exponential };

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::lognormal: return "lognormal";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::shifted_exponential: return "shifted-exponential";
  }
  return "?";
}

// Parametric model of the positive, atomless cost variable.  Quantiles,
// partial expectations and sampling are all closed-form.
class KernelModel {
 public:
  static KernelModel lognormal(double mu, double sigma) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("lognormal: need finite mu and sigma > 0");
    }
    return KernelModel(KernelFamily::lognormal, mu, sigma);
  }

  static KernelModel uniform(double a, double b) {
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
      throw std::invalid_argument("uniform: need 0 <= a < b");
    }
    return KernelModel(KernelFamily::uniform, a, b);
  }

  static KernelModel shifted_exponential(double shift, double rate) {
    if (!(shift >= 0.0) || !std::isfinite(shift) || !(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("shifted_exponential: need shift >= 0 and rate > 0");
    }
    return KernelModel(KernelFamily::shifted_exponential, shift, rate);
  }

  KernelFamily family() const { return family_; }
  double param1() const { return p1_; }  // mu | a | shift
  double param2() const { return p2_; }  // sigma | b | rate

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("quantile: p must lie in (0,1)");
    }
    switch (family_) {
      case KernelFamily::lognormal:
        return std::exp(p1_ + p2_ * normal_quantile(p));
      case KernelFamily::uniform:
        return p1_ + (p2_ - p1_) * p;
      case KernelFamily::shifted_exponential:
        return p1_ - std::log1p(-p) / p2_;
    }
    return 0.0;
  }

  double cdf(double t) const {
    switch (family_) {
      case KernelFamily::lognormal:
        return t <= 0.0 ? 0.0 : normal_cdf((std::log(t) - p1_) / p2_);
      case KernelFamily::uniform: {
        if (t <= p1_) return 0.0;
        if (t >= p2_) return 1.0;
        return (t - p1_) / (p2_ - p1_);
      }
      case KernelFamily::shifted_exponential:
        return t <= p1_ ? 0.0 : -std::expm1(-p2_ * (t - p1_));
    }
    return 0.0;
  }

  double mean() const {
    switch (family_) {
      case KernelFamily::lognormal:
        return std::exp(p1_ + 0.5 * p2_ * p2_);
      case KernelFamily::uniform:
        return 0.5 * (p1_ + p2_);
      case KernelFamily::shifted_exponential:
        return p1_ + 1.0 / p2_;
    }
    return 0.0;
  }

  double essinf() const {
    switch (family_) {
      case KernelFamily::lognormal: return 0.0;
      case KernelFamily::uniform: return p1_;
      case KernelFamily::shifted_exponential: return p1_;
    }
    return 0.0;
  }

  // E[rho 1{rho <= quantile(p)}], the mean restricted to the lowest-cost
  // p-fraction of states.  Stable down to p near the underflow threshold,
  // which is what keeps deep-tail evaluation of the cost profile honest.
  double lower_partial_mean(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::domain_error("lower_partial_mean: p must lie in [0,1]");
    }
    if (p == 0.0) return 0.0;
    if (p == 1.0) return mean();
    switch (family_) {
      case KernelFamily::lognormal:
        return mean() * normal_cdf(normal_quantile(p) - p2_);
      case KernelFamily::uniform:
        return p1_ * p + 0.5 * (p2_ - p1_) * p * p;
      case KernelFamily::shifted_exponential: {
        // integral of the quantile: s p + (1/rate) * (p + (1-p) log(1-p)).
        // The bracket is O(p^2) so the direct form cancels badly for small
        // p; switch to its power series sum_{j>=1} p^{j+1}/(j(j+1)).
        double bracket;
        if (p < 0.5) {
          bracket = 0.0;
          double pj = p * p;
          for (int j = 1; j < 1080; ++j) {
            const double term = pj / (static_cast<double>(j) * (j + 1.0));
            bracket += term;
            pj *= p;
            if (term < 1e-18 * bracket) break;
          }
        } else {
          bracket = p + (1.0 - p) * std::log1p(-p);
        }
        return p1_ * p + bracket / p2_;
      }
    }
    return 0.0;
  }

  // kappa(c) = E[rho 1{rho <= quantile(1-c)}] = integral of quantile(1-z)
  // over [c,1].  Strictly decreasing, kappa(0) = mean.
  double partial_expectation(double c) const {
    if (!(c >= 0.0 && c < 1.0)) {
      throw std::domain_error("partial_expectation: c must lie in [0,1)");
    }
    return lower_partial_mean(1.0 - c);
  }

  // Inverse-CDF sampling; identical output for identical seeds.
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(quantile(uniform_open(gen)));
    }
    return out;
  }

  // One uniform draw strictly inside (0,1): 53 random bits centered in the
  // unit interval, so inverse-CDF transforms never see 0 or 1.
  static double uniform_open(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

 private:
  KernelModel(KernelFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  KernelFamily family_;
  double p1_;
  double p2_;
};

}  // namespace dualopt

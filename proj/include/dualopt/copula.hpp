#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dualopt/cost_profile.hpp"
#include "dualopt/kernel.hpp"
#include "dualopt/measure.hpp"
#include "dualopt/normal.hpp"
#include "dualopt/quadrature.hpp"
#include "dualopt/solver.hpp"

namespace dualopt {

// P(Z1 <= h, Z2 <= k) for standard bivariate normal (Z1, Z2) with
// correlation r, via the single-integral reduction: the derivative of the
// cdf in r is the bivariate density, so integrating it from 0 picks up the
// dependence correction on top of the independent product.
inline double bivariate_normal_cdf(double h, double k, double r) {
  if (!(r > -1.0 && r < 1.0)) {
    throw std::domain_error("bivariate_normal_cdf: r must lie in (-1,1)");
  }
  const double base = normal_cdf(h) * normal_cdf(k);
  if (r == 0.0) return base;
  auto density_in_r = [h, k](double t) {
    const double s = 1.0 - t * t;
    return std::exp(-0.5 * (h * h - 2.0 * h * k * t + k * k) / s) / std::sqrt(s);
  };
  const double correction = r > 0.0 ? quad::adaptive(density_in_r, 0.0, r, 1e-13)
                                    : -quad::adaptive(density_in_r, r, 0.0, 1e-13);
  return base + correction / (2.0 * std::numbers::pi);
}

enum class CopulaFamily { independence, gaussian };

inline std::string to_string(CopulaFamily f) {
  return f == CopulaFamily::independence ? "independence" : "gaussian";
}

// Dependence structure between the payoff rank and the benchmark rank.
// Conditional cdf and its inverse are closed-form for both families.
class CopulaModel {
 public:
  static CopulaModel independence() { return CopulaModel(CopulaFamily::independence, 0.0); }

  static CopulaModel gaussian(double r) {
    if (!(r > -1.0 && r < 1.0)) {
      throw std::invalid_argument("gaussian copula: r must lie in (-1,1)");
    }
    return CopulaModel(CopulaFamily::gaussian, r);
  }

  CopulaFamily family() const { return family_; }
  double r() const { return r_; }

  // C(u, v): joint probability that both ranks fall below (u, v).
  double cdf(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("copula cdf: arguments must lie in [0,1]");
    }
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    if (r_ == 0.0) return u * v;
    return bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), r_);
  }

  // C_{1|2}(u, v) = P(U <= u | V = v).
  double conditional_cdf(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw std::domain_error("conditional_cdf: u must lie in [0,1]");
    }
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error("conditional_cdf: v must lie in (0,1)");
    }
    if (u == 0.0 || u == 1.0 || r_ == 0.0) return u;
    return normal_cdf((normal_quantile(u) - r_ * normal_quantile(v)) / std::sqrt(1.0 - r_ * r_));
  }

  // Right-continuous inverse of C_{1|2}(., v).
  double conditional_quantile(double t, double v) const {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::domain_error("conditional_quantile: t must lie in [0,1]");
    }
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error("conditional_quantile: v must lie in (0,1)");
    }
    if (t == 0.0 || t == 1.0 || r_ == 0.0) return t;
    return normal_cdf(r_ * normal_quantile(v) + std::sqrt(1.0 - r_ * r_) * normal_quantile(t));
  }

 private:
  CopulaModel(CopulaFamily f, double r) : family_(f), r_(r) {}

  CopulaFamily family_;
  double r_;
};

// Joint law of the cost variable rho and the benchmark A:
//   rho = exp(mu_rho + sigma_rho W1), A = exp(mu_a + sigma_a W2),
// with (W1, W2) standard bivariate normal, corr(W1, W2) = corr.  Both
// marginals and the conditional law of rho given A stay closed-form.
class JointMarketModel {
 public:
  JointMarketModel(double mu_rho, double sigma_rho, double mu_a, double sigma_a, double corr)
      : mu_rho_(mu_rho), sigma_rho_(sigma_rho), mu_a_(mu_a), sigma_a_(sigma_a), corr_(corr) {
    if (!std::isfinite(mu_rho) || !std::isfinite(mu_a) || !(sigma_rho > 0.0) ||
        !(sigma_a > 0.0)) {
      throw std::invalid_argument("joint model: need finite locations and positive scales");
    }
    if (!(corr > -1.0 && corr < 1.0)) {
      throw std::invalid_argument("joint model: corr must lie in (-1,1)");
    }
  }

  double mu_rho() const { return mu_rho_; }
  double sigma_rho() const { return sigma_rho_; }
  double mu_a() const { return mu_a_; }
  double sigma_a() const { return sigma_a_; }
  double corr() const { return corr_; }

  KernelModel kernel() const { return KernelModel::lognormal(mu_rho_, sigma_rho_); }

  double benchmark_cdf(double a) const {
    return a <= 0.0 ? 0.0 : normal_cdf((std::log(a) - mu_a_) / sigma_a_);
  }

  // F_{rho|A}(t, a): lognormal with conditionally shifted location.
  double conditional_kernel_cdf(double t, double a) const {
    if (!(a > 0.0)) throw std::domain_error("conditional_kernel_cdf: a must be positive");
    if (t <= 0.0) return 0.0;
    const double w2 = (std::log(a) - mu_a_) / sigma_a_;
    const double z = ((std::log(t) - mu_rho_) / sigma_rho_ - corr_ * w2) /
                     std::sqrt(1.0 - corr_ * corr_);
    return normal_cdf(z);
  }

  // Deterministic paired draws of (rho, a).
  std::vector<std::pair<double, double>> sample_pairs(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample_pairs: n must be >= 1");
    std::mt19937_64 gen(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    const double tail = std::sqrt(1.0 - corr_ * corr_);
    for (std::size_t i = 0; i < n; ++i) {
      const double e1 = normal_quantile(KernelModel::uniform_open(gen));
      const double w2 = normal_quantile(KernelModel::uniform_open(gen));
      const double w1 = corr_ * w2 + tail * e1;
      out.emplace_back(std::exp(mu_rho_ + sigma_rho_ * w1), std::exp(mu_a_ + sigma_a_ * w2));
    }
    return out;
  }

 private:
  double mu_rho_;
  double sigma_rho_;
  double mu_a_;
  double sigma_a_;
  double corr_;
};

namespace detail {

// Rank arguments must stay strictly inside (0,1) for the normal quantile;
// the clamp bites only when a cdf under- or overflows in double.
inline double clamp_unit_open(double p) {
  constexpr double lo = 1e-300;
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::min(std::max(p, lo), hi);
}

}  // namespace detail

// Uniform dependence rank of a joint draw: high Z means a state favorable
// to the payoff (low conditional cost rank), coupled to the benchmark rank
// through the copula's conditional inverse.
inline double z_transform(const JointMarketModel& joint, const CopulaModel& copula, double rho,
                          double a) {
  if (!(rho > 0.0) || !(a > 0.0)) {
    throw std::domain_error("z_transform: (rho, a) must be in the joint support");
  }
  const double w2 = (std::log(a) - joint.mu_a()) / joint.sigma_a();
  const double e1 = ((std::log(rho) - joint.mu_rho()) / joint.sigma_rho() - joint.corr() * w2) /
                    std::sqrt(1.0 - joint.corr() * joint.corr());
  // 1 - F_{rho|A}(rho, a) without cancellation
  const double t = detail::clamp_unit_open(normal_cdf(-e1));
  const double v = detail::clamp_unit_open(normal_cdf(w2));
  return copula.conditional_quantile(t, v);
}

struct McConfig {
  std::size_t n = 1000000;
  int bins = 0;  // 0: ceil(n^(1/3))
  std::uint64_t seed = 42;
};

inline int default_bin_count(std::size_t n) {
  return static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
}

// Binned estimate of the conditional cost curve phi(z) = E[rho | Z = z].
struct PhiEstimate {
  std::vector<double> phi;        // bin means of rho, scaled to integrate exactly
  std::vector<std::size_t> counts;
  std::vector<double> stderrs;    // per-bin standard error of the mean
  double sample_mean = 0.0;       // of rho; equals the integral of phi
  std::size_t n = 0;
};

inline PhiEstimate phi_estimate_detail(const JointMarketModel& joint, const CopulaModel& copula,
                                       std::size_t n_samples, int n_bins, std::uint64_t seed) {
  if (n_samples < 10000) {
    throw std::invalid_argument("phi_estimate: need at least 10^4 samples");
  }
  if (n_bins < 10 || static_cast<std::size_t>(n_bins) > n_samples / 100) {
    throw std::invalid_argument("phi_estimate: bins must lie in [10, n/100]");
  }
  const auto pairs = joint.sample_pairs(n_samples, seed);
  const std::size_t b = static_cast<std::size_t>(n_bins);
  std::vector<double> sums(b, 0.0), sumsq(b, 0.0);
  std::vector<std::size_t> counts(b, 0);
  for (const auto& [rho, a] : pairs) {
    const double z = z_transform(joint, copula, rho, a);
    std::size_t j = static_cast<std::size_t>(z * n_bins);
    if (j >= b) j = b - 1;
    sums[j] += rho;
    sumsq[j] += rho * rho;
    ++counts[j];
  }
  PhiEstimate est;
  est.n = n_samples;
  est.phi.resize(b);
  est.stderrs.resize(b);
  est.counts = counts;
  double total = 0.0;
  for (std::size_t j = 0; j < b; ++j) {
    if (counts[j] == 0) {
      throw std::runtime_error("phi_estimate: empty bin " + std::to_string(j) +
                               "; use fewer bins for this sample size");
    }
    total += sums[j];
    // scale by bins/n rather than the bin count, so the piecewise-constant
    // curve integrates to the sample mean exactly
    est.phi[j] = sums[j] * (static_cast<double>(n_bins) / static_cast<double>(n_samples));
    const double cnt = static_cast<double>(counts[j]);
    const double mean_j = sums[j] / cnt;
    const double var_j = std::max(0.0, sumsq[j] / cnt - mean_j * mean_j);
    est.stderrs[j] = std::sqrt(var_j / cnt);
  }
  est.sample_mean = total / static_cast<double>(n_samples);
  return est;
}

// Limiting per-unit cost of the top-rank slice implied by the model: the
// conditional mean cost at rank z -> 1 is driven by the sign of the
// correlation between the cost factor and the rank's normal score.
inline double top_rank_cost_limit(const JointMarketModel& joint, const CopulaModel& copula,
                                  double delta) {
  const double r = copula.family() == CopulaFamily::independence ? 0.0 : copula.r();
  const double rm = joint.corr();
  const double c = r * rm - std::sqrt((1.0 - r * r) * (1.0 - rm * rm));
  if (c < 0.0) return 0.0;
  if (c == 0.0) return delta;
  return std::numeric_limits<double>::infinity();
}

// Cost profile backed by the binned phi estimate: kappa(c) integrates the
// piecewise-constant curve over [c,1] via suffix sums.  Monotonicity is not
// promised (the true phi need not be monotone), so the profile is marked
// relaxed; the divergence hint carries model knowledge that the binned
// values cannot resolve.
inline CostProfile profile_from_phi(const PhiEstimate& est, double lower_bound_hint) {
  const std::vector<double> phi = est.phi;
  const std::size_t b = phi.size();
  std::vector<double> suffix(b + 1, 0.0);  // integral of phi over [j/b, 1]
  for (std::size_t j = b; j-- > 0;) {
    suffix[j] = suffix[j + 1] + phi[j] / static_cast<double>(b);
  }
  const double total = suffix[0];

  CostProfile p;
  p.tail_cost = [phi, suffix, b](double c) {
    if (!(c >= 0.0 && c < 1.0)) {
      throw std::domain_error("tail_cost: c must lie in [0,1)");
    }
    std::size_t j = static_cast<std::size_t>(c * static_cast<double>(b));
    if (j >= b) j = b - 1;
    const double frac = c * static_cast<double>(b) - static_cast<double>(j);
    return suffix[j + 1] + phi[j] * (1.0 - frac) / static_cast<double>(b);
  };
  p.tail_cost_near_one = [phi, suffix, b](double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw std::domain_error("tail_cost_near_one: eps must lie in (0,1]");
    }
    if (eps * static_cast<double>(b) <= 1.0) return phi[b - 1] * eps;
    std::size_t j = static_cast<std::size_t>((1.0 - eps) * static_cast<double>(b));
    if (j >= b) j = b - 1;
    const double frac = (1.0 - eps) * static_cast<double>(b) - static_cast<double>(j);
    return suffix[j + 1] + phi[j] * (1.0 - frac) / static_cast<double>(b);
  };
  p.total_cost = total;
  p.lower_bound_hint = lower_bound_hint;
  p.strictly_decreasing = false;
  return p;
}

inline CostProfile phi_estimate(const JointMarketModel& joint, const CopulaModel& copula,
                                std::size_t n_samples, int n_bins, std::uint64_t seed) {
  const PhiEstimate est = phi_estimate_detail(joint, copula, n_samples, n_bins, seed);
  CostProfile p = profile_from_phi(est, 0.0);
  p.lower_bound_hint = top_rank_cost_limit(joint, copula, p.total_cost);
  return p;
}

// Solve with the dependence-constrained cost: the engine runs on the
// estimated profile and digital optima are indexed by the rank Z.
inline Solution solve_with_copula(const MixedMeasure& m, const JointMarketModel& joint,
                                  const CopulaModel& copula, double x, const McConfig& mc,
                                  const SearchConfig& cfg = {}) {
  const int bins = mc.bins > 0 ? mc.bins : default_bin_count(mc.n);
  const CostProfile profile = phi_estimate(joint, copula, mc.n, bins, mc.seed);
  return solve_with_cost(m, profile, x, PayoffForm::digital_rank, cfg);
}

// Comparison of the empirical joint law of paired uniform ranks against a
// copula on a g x g grid.
struct DependenceDiagnostic {
  double max_abs_z = 0.0;      // worst cell-count z-score
  double sup_distance = 0.0;   // max |empirical C - C| over grid nodes
  bool pass = false;           // max_abs_z <= 3
  std::vector<double> cell_z;  // row-major g x g
};

inline DependenceDiagnostic verify_dependence(const std::vector<double>& z_sample,
                                              const std::vector<double>& v_sample,
                                              const CopulaModel& copula, int grid = 10) {
  if (z_sample.size() != v_sample.size() || z_sample.empty()) {
    throw std::invalid_argument("verify_dependence: need nonempty paired samples");
  }
  if (grid < 2) throw std::invalid_argument("verify_dependence: grid must be >= 2");
  const std::size_t g = static_cast<std::size_t>(grid);
  const double n = static_cast<double>(z_sample.size());

  std::vector<double> counts(g * g, 0.0);
  for (std::size_t i = 0; i < z_sample.size(); ++i) {
    std::size_t a = static_cast<std::size_t>(z_sample[i] * static_cast<double>(g));
    std::size_t b = static_cast<std::size_t>(v_sample[i] * static_cast<double>(g));
    if (a >= g) a = g - 1;
    if (b >= g) b = g - 1;
    counts[a * g + b] += 1.0;
  }

  // cdf values at the grid nodes (i/g, j/g), i,j = 0..g
  auto node = [&](std::size_t i, std::size_t j) {
    return copula.cdf(static_cast<double>(i) / static_cast<double>(g),
                      static_cast<double>(j) / static_cast<double>(g));
  };
  std::vector<double> model_cdf((g + 1) * (g + 1));
  for (std::size_t i = 0; i <= g; ++i) {
    for (std::size_t j = 0; j <= g; ++j) model_cdf[i * (g + 1) + j] = node(i, j);
  }

  DependenceDiagnostic d;
  d.cell_z.resize(g * g, 0.0);
  std::vector<double> cum(g * g, 0.0);  // cumulative counts up to cell (i,j)
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      const double p = model_cdf[(i + 1) * (g + 1) + j + 1] - model_cdf[i * (g + 1) + j + 1] -
                       model_cdf[(i + 1) * (g + 1) + j] + model_cdf[i * (g + 1) + j];
      const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
      const double zscore = (counts[i * g + j] / n - p) / se;
      d.cell_z[i * g + j] = zscore;
      d.max_abs_z = std::max(d.max_abs_z, std::abs(zscore));

      cum[i * g + j] = counts[i * g + j] + (i > 0 ? cum[(i - 1) * g + j] : 0.0) +
                       (j > 0 ? cum[i * g + j - 1] : 0.0) -
                       (i > 0 && j > 0 ? cum[(i - 1) * g + j - 1] : 0.0);
      const double emp = cum[i * g + j] / n;
      d.sup_distance =
          std::max(d.sup_distance, std::abs(emp - model_cdf[(i + 1) * (g + 1) + j + 1]));
    }
  }
  d.pass = d.max_abs_z <= 3.0;
  return d;
}

}  // namespace dualopt

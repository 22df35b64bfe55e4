#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dualopt/cost_profile.hpp"
#include "dualopt/golden.hpp"
#include "dualopt/kernel.hpp"
#include "dualopt/measure.hpp"

namespace dualopt {

// Classification of the optimum:
//   infinite   - value unbounded; only an approximating sequence exists
//   riskfree   - constant payoff x/delta is optimal
//   digital    - two-point payoff k* on the favorable event, 0 otherwise
//   unattained - finite supremum approached but not achieved
enum class CaseTag { infinite, riskfree, digital, unattained };

inline std::string to_string(CaseTag t) {
  switch (t) {
    case CaseTag::infinite: return "infinite";
    case CaseTag::riskfree: return "riskfree";
    case CaseTag::digital: return "digital";
    case CaseTag::unattained: return "unattained";
  }
  return "?";
}

// How the payoff is indexed: by the cost realization itself (threshold
// beta*) or by the uniform dependence rank Z (threshold c*).
enum class PayoffForm { constant, digital_kernel, digital_rank };

inline std::string to_string(PayoffForm f) {
  switch (f) {
    case PayoffForm::constant: return "constant";
    case PayoffForm::digital_kernel: return "digital-kernel";
    case PayoffForm::digital_rank: return "digital-rank";
  }
  return "?";
}

struct SearchConfig {
  int grid_points = 10000;              // Chebyshev-spaced interior candidates
  int tail_probe_levels = 60;           // probe c = 1 - 2^-k, k = 1..levels
  double divergence_cap_factor = 1e12;  // cap on zeta, in units of 1/total_cost
  double attain_rel_tol = 1e-9;         // interior-vs-limit attainability margin
  double boundary_band = 1e-9;          // |gamma* delta - 1| flagged inconclusive
  double tail_zone = 1e-6;              // grid keeps c <= 1 - tail_zone
  double golden_tol = 1e-12;
  int sequence_length = 24;             // points emitted for infinite/unattained
  int plot_points = 257;                // diagnostic (c, zeta) grid size
};

struct SequencePoint {
  int index;     // n
  double c;      // c_n = 1 - 2^-n
  double beta;   // cost threshold quantile(2^-n); NaN for rank-indexed payoffs
  double k;      // payout level making the budget bind exactly
  double value;  // achieved preference value x * zeta(c_n)
};

struct GammaStarResult {
  double value = 0.0;  // +infinity when zeta diverges
  bool attained = false;
  std::optional<double> c_star;
  std::optional<double> tail_eps;  // 1 - c_star when the maximizer came from the tail search
  bool divergent = false;
};

// Raised when the search cannot separate a diverging ratio from a finite
// supremum within its probe budget; carries the best bounds seen.
class SolverInconclusive : public std::runtime_error {
 public:
  SolverInconclusive(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lower_bound(lo), upper_bound(hi) {}
  double lower_bound;
  double upper_bound;
};

struct Solution {
  CaseTag case_tag = CaseTag::riskfree;
  PayoffForm payoff_form = PayoffForm::constant;
  double x = 0.0;
  double delta = 0.0;          // total cost of one unit paid in every state
  double gamma_star = 0.0;     // +infinity in the divergent case
  double optimal_value = 0.0;  // max(1/delta, gamma_star) * x
  bool attained = true;
  bool inconclusive = false;
  std::optional<CaseTag> alternative_case;  // set when inconclusive
  std::optional<double> c_star;
  std::optional<double> beta_star;  // digital_kernel payoffs only
  std::optional<double> k_star;
  std::optional<double> tail_eps;  // exact 1 - c_star for deep-tail maximizers
  std::vector<SequencePoint> sequence;
  std::vector<std::pair<double, double>> ratio_grid;  // (c, zeta(c)) diagnostics
};

// zeta(c) = m([c,1]) / kappa(c): preference mass bought per unit cost by a
// digital payoff paid on the top (1-c) fraction of states.
inline double zeta(const MixedMeasure& m, const CostProfile& cost, double c) {
  if (!(c > 0.0 && c < 1.0)) throw std::domain_error("zeta: c must lie in (0,1)");
  return m.tail_mass(c) / cost.tail_cost(c);
}

namespace detail {

// zeta(1 - eps) evaluated in eps space so the deep tail stays representable.
inline double zeta_near_one(const MixedMeasure& m, const CostProfile& cost, double eps) {
  return m.tail_mass_near_one(eps) / cost.tail_cost_near_one(eps);
}

}  // namespace detail

// Supremum of zeta over (0,1).
//
// Candidates: every interior atom of m (exact: between atoms the tail mass
// is constant and the cost decreasing, so zeta rises into each atom), a
// Chebyshev grid kept away from the right end, golden-section refinement of
// the leading grid maxima, and a geometric deep-tail probe eps = 2^-k that
// classifies the c -> 1 behavior (divergence, a hidden tail maximum, or a
// finite unattained limit).
inline GammaStarResult gamma_star(const MixedMeasure& m, const CostProfile& cost,
                                  const SearchConfig& cfg = {}) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  GammaStarResult out;

  if (m.mass_at_one() > 0.0) {
    // tail mass stays bounded below while the tail cost vanishes
    out.value = inf;
    out.divergent = true;
    return out;
  }
  if (cost.lower_bound_hint == 0.0 && m.density_at_one() > 0.0) {
    // zeta(1-eps) ~ density(1) * eps / kappa(1-eps) and the per-unit tail
    // cost kappa(1-eps)/eps falls to the hint, so the ratio is unbounded
    // even when the probe below cannot reach the cap
    out.value = inf;
    out.divergent = true;
    return out;
  }

  struct Cand {
    double c;
    double v;
    std::optional<double> eps;
  };
  Cand best{1.0, -1.0, std::nullopt};
  // Exact candidates (atoms, grid) may win a near-tie with a smaller c;
  // refined candidates (golden section output) must improve strictly, so a
  // refinement converging to just below an atom cannot displace the atom.
  auto offer = [&best](double c, double v, std::optional<double> eps) {
    if (best.v < 0.0) {
      best = {c, v, eps};
      return;
    }
    const double tie = 1e-12 * std::max(1.0, best.v);
    if (v > best.v + tie) {
      best = {c, v, eps};
    } else if (v >= best.v - tie && c < best.c) {
      best = {c, std::max(v, best.v), eps};
    }
  };
  auto offer_strict = [&best](double c, double v, std::optional<double> eps) {
    if (best.v < 0.0 || v > best.v + 1e-12 * std::max(1.0, best.v)) best = {c, v, eps};
  };

  // exact candidates first: atoms carry zeta's one-sided local maxima
  for (double a : m.atom_locations()) offer(a, zeta(m, cost, a), std::nullopt);

  std::vector<std::pair<double, double>> grid;  // (c, zeta(c)) in increasing c
  grid.reserve(static_cast<std::size_t>(cfg.grid_points));
  for (int j = cfg.grid_points; j >= 1; --j) {
    const double c =
        0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * j - 1.0) / (2.0 * cfg.grid_points)));
    if (c > 0.0 && c <= 1.0 - cfg.tail_zone) grid.emplace_back(c, zeta(m, cost, c));
  }
  for (const auto& [c, v] : grid) offer(c, v, std::nullopt);

  // golden refinement around the strongest grid maxima; atoms need none
  // (their values are exact) and anything found here only raises the max
  if (grid.size() >= 3) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      if (grid[i].second >= grid[i - 1].second && grid[i].second >= grid[i + 1].second) {
        peaks.push_back(i);
      }
    }
    std::sort(peaks.begin(), peaks.end(), [&grid](std::size_t a, std::size_t b) {
      return grid[a].second > grid[b].second;
    });
    if (peaks.size() > 3) peaks.resize(3);
    for (std::size_t i : peaks) {
      const auto [c_ref, v_ref] =
          golden_max([&](double c) { return zeta(m, cost, c); }, grid[i - 1].first,
                     grid[i + 1].first, cfg.golden_tol);
      offer_strict(c_ref, v_ref, std::nullopt);
    }
  }

  // deep-tail probe
  const double cap = cfg.divergence_cap_factor / cost.total_cost;
  std::vector<double> probe_eps, probe_val;
  probe_eps.reserve(static_cast<std::size_t>(cfg.tail_probe_levels));
  probe_val.reserve(static_cast<std::size_t>(cfg.tail_probe_levels));
  {
    double eps = 0.5;
    for (int k = 1; k <= cfg.tail_probe_levels; ++k, eps *= 0.5) {
      const double v = detail::zeta_near_one(m, cost, eps);
      probe_eps.push_back(eps);
      probe_val.push_back(v);
      if (v > cap) {
        out.value = inf;
        out.divergent = true;
        return out;
      }
    }
  }

  std::size_t k_best = 0;
  for (std::size_t k = 1; k < probe_val.size(); ++k) {
    if (probe_val[k] > probe_val[k_best]) k_best = k;
  }

  if (probe_val[k_best] <= 0.0) {
    // no preference mass in the tail: the interior candidates are exhaustive
    if (best.v <= 0.0) {
      out.value = 0.0;
      out.attained = true;
      return out;
    }
    out.value = best.v;
    out.attained = true;
    out.c_star = best.c;
    out.tail_eps = best.eps;
    return out;
  }

  const double probe_max = probe_val[k_best];
  const double probe_last = probe_val.back();
  if (probe_max <= probe_last * (1.0 + 1e-12)) {
    // rising into the limit, or flat once the values saturate in floating
    // point: the supremum sits at the right end; the deepest probes carry
    // its value
    if (probe_last > 2.0 * probe_val[probe_val.size() - 2]) {
      throw SolverInconclusive(
          "tail ratio still rising steeply at the probe floor; cannot separate a "
          "divergent ratio from a finite supremum",
          probe_last, inf);
    }
    const double gamma = std::max(best.v, probe_max);
    if (best.v >= gamma * (1.0 - cfg.attain_rel_tol)) {
      out.value = best.v;
      out.attained = true;
      out.c_star = best.c;
      out.tail_eps = best.eps;
      return out;
    }
    out.value = gamma;
    out.attained = false;
    return out;
  }

  {
    // the probe rose then fell measurably: a genuine maximum hides between
    // probes; refine in log-eps space over the bracketing octaves
    const std::size_t lo_i = std::min(k_best + 1, probe_val.size() - 1);
    const std::size_t hi_i = k_best > 0 ? k_best - 1 : 0;
    const double t_lo = std::log(probe_eps[lo_i]);
    const double t_hi = std::log(probe_eps[hi_i]);
    const auto [t_ref, v_ref] = golden_max(
        [&](double t) { return detail::zeta_near_one(m, cost, std::exp(t)); }, t_lo, t_hi,
        cfg.golden_tol);
    const double eps_ref = std::exp(t_ref);
    offer_strict(1.0 - eps_ref, v_ref, eps_ref);
  }

  if (best.v < 0.0) {
    // degenerate configuration with no interior candidates at all
    out.value = probe_val[k_best];
    out.attained = false;
    return out;
  }
  out.value = best.v;
  out.attained = true;
  out.c_star = best.c;
  out.tail_eps = best.eps;
  return out;
}

namespace detail {

inline std::vector<std::pair<double, double>> build_ratio_grid(const MixedMeasure& m,
                                                               const CostProfile& cost,
                                                               const SearchConfig& cfg) {
  std::vector<double> cs;
  cs.reserve(static_cast<std::size_t>(cfg.plot_points) + m.atoms().size());
  for (int j = 1; j <= cfg.plot_points; ++j) {
    cs.push_back(static_cast<double>(j) / (cfg.plot_points + 1.0));
  }
  for (double a : m.atom_locations()) cs.push_back(a);
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(cs.size());
  for (double c : cs) out.emplace_back(c, zeta(m, cost, c));
  return out;
}

inline std::vector<SequencePoint> build_sequence(const MixedMeasure& m, const CostProfile& cost,
                                                 double x, const SearchConfig& cfg) {
  std::vector<SequencePoint> seq;
  seq.reserve(static_cast<std::size_t>(cfg.sequence_length));
  double eps = 0.5;
  for (int n = 1; n <= cfg.sequence_length; ++n, eps *= 0.5) {
    const double kappa = cost.tail_cost_near_one(eps);
    SequencePoint p;
    p.index = n;
    p.c = 1.0 - eps;
    p.beta = std::numeric_limits<double>::quiet_NaN();
    p.k = x / kappa;
    p.value = x * (m.tail_mass_near_one(eps) / kappa);
    seq.push_back(p);
  }
  return seq;
}

}  // namespace detail

// Shared classification engine over an abstract cost profile.  digital_form
// says how a two-point optimum is indexed (cost threshold vs rank threshold).
inline Solution solve_with_cost(const MixedMeasure& m, const CostProfile& cost, double x,
                                PayoffForm digital_form, const SearchConfig& cfg = {}) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("solve: wealth x must be positive and finite");
  }
  Solution s;
  s.x = x;
  s.delta = cost.total_cost;
  s.ratio_grid = detail::build_ratio_grid(m, cost, cfg);

  const GammaStarResult g = gamma_star(m, cost, cfg);
  s.gamma_star = g.value;

  if (g.divergent) {
    s.case_tag = CaseTag::infinite;
    s.payoff_form = digital_form;
    s.optimal_value = std::numeric_limits<double>::infinity();
    s.attained = false;
    s.sequence = detail::build_sequence(m, cost, x, cfg);
    return s;
  }

  const double margin = g.value * s.delta - 1.0;
  if (std::abs(margin) < cfg.boundary_band) {
    // numerically on the fence between the constant payoff and a digital
    // one; both give value x/delta up to the band, so report the constant
    // classification but flag it
    s.case_tag = CaseTag::riskfree;
    s.payoff_form = PayoffForm::constant;
    s.optimal_value = x / s.delta;
    s.attained = true;
    s.inconclusive = true;
    s.alternative_case = g.attained ? CaseTag::digital : CaseTag::unattained;
    return s;
  }

  if (margin < 0.0) {
    s.case_tag = CaseTag::riskfree;
    s.payoff_form = PayoffForm::constant;
    s.optimal_value = x / s.delta;
    s.attained = true;
    return s;
  }

  if (g.attained) {
    s.case_tag = CaseTag::digital;
    s.payoff_form = digital_form;
    s.optimal_value = g.value * x;
    s.attained = true;
    s.c_star = g.c_star;
    s.tail_eps = g.tail_eps;
    const double kappa =
        g.tail_eps ? cost.tail_cost_near_one(*g.tail_eps) : cost.tail_cost(*g.c_star);
    s.k_star = x / kappa;
    return s;
  }

  s.case_tag = CaseTag::unattained;
  s.payoff_form = digital_form;
  s.optimal_value = g.value * x;
  s.attained = false;
  s.sequence = detail::build_sequence(m, cost, x, cfg);
  return s;
}

// Classify and solve for a parametric cost model; digital optima and
// sequence points are indexed by the cost threshold beta = quantile(1 - c).
inline Solution solve(const MixedMeasure& m, const KernelModel& kernel, double x,
                      const SearchConfig& cfg = {}) {
  Solution s = solve_with_cost(m, cost_profile_from_kernel(kernel), x,
                               PayoffForm::digital_kernel, cfg);
  if (s.c_star) {
    s.beta_star = kernel.quantile(s.tail_eps ? *s.tail_eps : 1.0 - *s.c_star);
  }
  for (auto& p : s.sequence) p.beta = kernel.quantile(std::exp2(-p.index));
  return s;
}

// Payoff of a solved instance at a realization of the cost variable.
inline double payoff_value(const Solution& s, double rho) {
  switch (s.case_tag) {
    case CaseTag::riskfree:
      return s.x / s.delta;
    case CaseTag::digital:
      if (s.payoff_form != PayoffForm::digital_kernel || !s.beta_star || !s.k_star) {
        throw std::logic_error(
            "payoff_value: payoff is indexed by rank, use payoff_value_at_rank");
      }
      return rho <= *s.beta_star ? *s.k_star : 0.0;
    default:
      throw std::logic_error("payoff_value: no optimal payoff exists for case " +
                             to_string(s.case_tag));
  }
}

// Payoff at a realization of the uniform rank Z.  Also valid for kernel
// payoffs, where Z >= c* holds exactly when the cost is at or below beta*.
inline double payoff_value_at_rank(const Solution& s, double z) {
  switch (s.case_tag) {
    case CaseTag::riskfree:
      return s.x / s.delta;
    case CaseTag::digital:
      if (!s.c_star || !s.k_star) throw std::logic_error("payoff_value_at_rank: missing optimum");
      return z >= *s.c_star ? *s.k_star : 0.0;
    default:
      throw std::logic_error("payoff_value_at_rank: no optimal payoff exists for case " +
                             to_string(s.case_tag));
  }
}

// Closed form for a point-mass preference at alpha: always a digital
// optimum with c* = alpha, beta* = quantile(1 - alpha), k* = x/kappa(alpha).
inline Solution corollary_quantile(double alpha, const KernelModel& kernel, double x,
                                   const SearchConfig& cfg = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("corollary_quantile: alpha must lie in (0,1)");
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("corollary_quantile: x must be positive and finite");
  }
  const double kappa = kernel.partial_expectation(alpha);
  Solution s;
  s.case_tag = CaseTag::digital;
  s.payoff_form = PayoffForm::digital_kernel;
  s.x = x;
  s.delta = kernel.mean();
  s.gamma_star = 1.0 / kappa;
  s.optimal_value = x / kappa;
  s.attained = true;
  s.c_star = alpha;
  s.beta_star = kernel.quantile(1.0 - alpha);
  s.k_star = x / kappa;
  s.ratio_grid =
      detail::build_ratio_grid(MixedMeasure::dirac(alpha), cost_profile_from_kernel(kernel), cfg);
  return s;
}

}  // namespace dualopt

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dualopt/copula.hpp"
#include "dualopt/kernel.hpp"
#include "dualopt/measure.hpp"
#include "dualopt/solver.hpp"
#include "dualopt/verify.hpp"

#include "json.hpp"

namespace dualopt {

using Json = nlohmann::json;

namespace detail {

inline const Json& need(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: " + path + " must be an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument("config: missing field " + path + "." + key);
  }
  return *it;
}

inline double num(const Json& j, const char* key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number()) {
    throw std::invalid_argument("config: field " + path + "." + key + " must be a number");
  }
  return v.get<double>();
}

inline double num_or(const Json& j, const char* key, const std::string& path, double dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return num(j, key, path);
}

inline std::string str(const Json& j, const char* key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_string()) {
    throw std::invalid_argument("config: field " + path + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

// infinities are not valid JSON numbers; encode them as strings
inline Json extended(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double extended_num(const Json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("config: field " + path + " must be a number or \"inf\"");
}

}  // namespace detail

inline Json measure_to_json(const MixedMeasure& m) {
  Json atoms = Json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({{"loc", a.location}, {"mass", a.mass}});
  Json density = Json::array();
  for (const DensityPiece& p : m.pieces()) {
    density.push_back({{"lo", p.lower}, {"hi", p.upper}, {"coef", p.coefficients}});
  }
  return Json{{"atoms", atoms}, {"density", density}};
}

inline MixedMeasure measure_from_json(const Json& j, const std::string& path = "measure") {
  if (!j.is_object()) throw std::invalid_argument("config: " + path + " must be an object");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const Json& arr = j.at("atoms");
    if (!arr.is_array()) {
      throw std::invalid_argument("config: field " + path + ".atoms must be an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".atoms[" + std::to_string(i) + "]";
      atoms.push_back({detail::num(arr[i], "loc", p), detail::num(arr[i], "mass", p)});
    }
  }
  std::vector<DensityPiece> pieces;
  if (j.contains("density")) {
    const Json& arr = j.at("density");
    if (!arr.is_array()) {
      throw std::invalid_argument("config: field " + path + ".density must be an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".density[" + std::to_string(i) + "]";
      const Json& coef = detail::need(arr[i], "coef", p);
      if (!coef.is_array() || coef.empty()) {
        throw std::invalid_argument("config: field " + p + ".coef must be a nonempty array");
      }
      pieces.push_back({detail::num(arr[i], "lo", p), detail::num(arr[i], "hi", p),
                        coef.get<std::vector<double>>()});
    }
  }
  MixedMeasure m(std::move(atoms), std::move(pieces));
  const auto problems = validate(m);
  if (!problems.empty()) {
    std::string msg = "config: " + path + " invalid:";
    for (const std::string& p : problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
  }
  return m;
}

inline Json kernel_to_json(const KernelModel& k) {
  switch (k.family()) {
    case KernelFamily::lognormal:
      return Json{{"family", "lognormal"}, {"mu", k.param1()}, {"sigma", k.param2()}};
    case KernelFamily::uniform:
      return Json{{"family", "uniform"}, {"a", k.param1()}, {"b", k.param2()}};
    default:
      return Json{{"family", "shifted-exponential"}, {"shift", k.param1()},
                  {"rate", k.param2()}};
  }
}

inline KernelModel kernel_from_json(const Json& j, const std::string& path = "kernel") {
  const std::string family = detail::str(j, "family", path);
  if (family == "lognormal") {
    return KernelModel::lognormal(detail::num(j, "mu", path), detail::num(j, "sigma", path));
  }
  if (family == "uniform") {
    return KernelModel::uniform(detail::num(j, "a", path), detail::num(j, "b", path));
  }
  if (family == "shifted-exponential") {
    return KernelModel::shifted_exponential(detail::num(j, "shift", path),
                                            detail::num(j, "rate", path));
  }
  throw std::invalid_argument("config: unknown kernel family \"" + family + "\" at " + path);
}

inline CopulaModel copula_from_json(const Json& j, const std::string& path = "copula") {
  const std::string family = detail::str(j, "family", path);
  if (family == "independence") return CopulaModel::independence();
  if (family == "gaussian") return CopulaModel::gaussian(detail::num(j, "r", path));
  throw std::invalid_argument("config: unknown copula family \"" + family + "\" at " + path);
}

inline Json copula_to_json(const CopulaModel& c) {
  if (c.family() == CopulaFamily::independence) return Json{{"family", "independence"}};
  return Json{{"family", "gaussian"}, {"r", c.r()}};
}

inline McConfig mc_from_json(const Json& j, const std::string& path = "mc") {
  McConfig mc;
  mc.n = static_cast<std::size_t>(detail::num_or(j, "n", path, double(mc.n)));
  mc.bins = static_cast<int>(detail::num_or(j, "bins", path, double(mc.bins)));
  mc.seed = static_cast<std::uint64_t>(detail::num_or(j, "seed", path, double(mc.seed)));
  return mc;
}

inline SearchConfig search_from_json(const Json& j, const std::string& path = "search") {
  SearchConfig s;
  s.grid_points = static_cast<int>(detail::num_or(j, "grid_points", path, s.grid_points));
  s.tail_probe_levels =
      static_cast<int>(detail::num_or(j, "tail_probe_levels", path, s.tail_probe_levels));
  s.divergence_cap_factor =
      detail::num_or(j, "divergence_cap_factor", path, s.divergence_cap_factor);
  s.attain_rel_tol = detail::num_or(j, "attain_rel_tol", path, s.attain_rel_tol);
  s.boundary_band = detail::num_or(j, "boundary_band", path, s.boundary_band);
  s.tail_zone = detail::num_or(j, "tail_zone", path, s.tail_zone);
  s.golden_tol = detail::num_or(j, "golden_tol", path, s.golden_tol);
  s.sequence_length =
      static_cast<int>(detail::num_or(j, "sequence_length", path, s.sequence_length));
  s.plot_points = static_cast<int>(detail::num_or(j, "plot_points", path, s.plot_points));
  return s;
}

// A full problem instance: preference mass, cost kernel, budget, and the
// optional dependence extension (copula + benchmark marginal + joint
// correlation + Monte Carlo settings).
struct InstanceConfig {
  MixedMeasure measure;
  KernelModel kernel;
  double x = 1.0;
  std::optional<CopulaModel> copula;
  double benchmark_mu = 0.0;
  double benchmark_sigma = 1.0;
  double joint_corr = 0.0;
  McConfig mc{};
  SearchConfig search{};
  Json solution_override;  // replaces solved fields before certification

  JointMarketModel joint() const {
    return JointMarketModel(kernel.param1(), kernel.param2(), benchmark_mu, benchmark_sigma,
                            joint_corr);
  }
};

inline InstanceConfig instance_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  InstanceConfig cfg{measure_from_json(detail::need(j, "measure", "$")),
                     kernel_from_json(detail::need(j, "kernel", "$")),
                     detail::num(j, "x", "$"),
                     std::nullopt,
                     0.0,
                     1.0,
                     0.0,
                     {},
                     {},
                     Json()};
  if (!(cfg.x > 0.0) || !std::isfinite(cfg.x)) {
    throw std::invalid_argument("config: field $.x must be positive and finite");
  }
  if (j.contains("copula")) {
    cfg.copula = copula_from_json(j.at("copula"));
    if (cfg.kernel.family() != KernelFamily::lognormal) {
      throw std::invalid_argument(
          "config: the dependence extension requires a lognormal kernel");
    }
    const Json& bench = detail::need(j, "benchmark", "$");
    cfg.benchmark_mu = detail::num(bench, "mu", "benchmark");
    cfg.benchmark_sigma = detail::num(bench, "sigma", "benchmark");
    cfg.joint_corr = detail::num(j, "joint_corr", "$");
  }
  if (j.contains("mc")) cfg.mc = mc_from_json(j.at("mc"));
  if (j.contains("search")) cfg.search = search_from_json(j.at("search"));
  if (j.contains("solution_override")) cfg.solution_override = j.at("solution_override");
  return cfg;
}

inline std::string case_to_string(CaseTag t) { return to_string(t); }

inline CaseTag case_from_string(const std::string& s) {
  if (s == "infinite") return CaseTag::infinite;
  if (s == "riskfree") return CaseTag::riskfree;
  if (s == "digital") return CaseTag::digital;
  if (s == "unattained") return CaseTag::unattained;
  throw std::invalid_argument("config: unknown case tag \"" + s + "\"");
}

inline PayoffForm payoff_form_from_string(const std::string& s) {
  if (s == "constant") return PayoffForm::constant;
  if (s == "digital-kernel") return PayoffForm::digital_kernel;
  if (s == "digital-rank") return PayoffForm::digital_rank;
  throw std::invalid_argument("config: unknown payoff form \"" + s + "\"");
}

inline Json solution_to_json(const Solution& s) {
  Json j{{"case", to_string(s.case_tag)},
         {"payoff_form", to_string(s.payoff_form)},
         {"x", s.x},
         {"delta", s.delta},
         {"gamma_star", detail::extended(s.gamma_star)},
         {"optimal_value", detail::extended(s.optimal_value)},
         {"attained", s.attained},
         {"inconclusive", s.inconclusive}};
  if (s.alternative_case) j["alternative_case"] = to_string(*s.alternative_case);
  if (s.c_star) j["c_star"] = *s.c_star;
  if (s.beta_star) j["beta_star"] = *s.beta_star;
  if (s.k_star) j["k_star"] = *s.k_star;
  if (s.tail_eps) j["tail_eps"] = *s.tail_eps;
  Json seq = Json::array();
  for (const SequencePoint& p : s.sequence) {
    Json e{{"n", p.index}, {"c", p.c}, {"k", p.k}, {"value", p.value}};
    if (std::isfinite(p.beta)) e["beta"] = p.beta;
    seq.push_back(std::move(e));
  }
  j["sequence"] = std::move(seq);
  Json grid = Json::array();
  for (const auto& [c, z] : s.ratio_grid) grid.push_back({c, z});
  j["ratio_grid"] = std::move(grid);
  return j;
}

inline Solution solution_from_json(const Json& j) {
  Solution s;
  s.case_tag = case_from_string(detail::str(j, "case", "solution"));
  s.payoff_form = payoff_form_from_string(detail::str(j, "payoff_form", "solution"));
  s.x = detail::num(j, "x", "solution");
  s.delta = detail::num(j, "delta", "solution");
  s.gamma_star = detail::extended_num(detail::need(j, "gamma_star", "solution"),
                                      "solution.gamma_star");
  s.optimal_value = detail::extended_num(detail::need(j, "optimal_value", "solution"),
                                         "solution.optimal_value");
  s.attained = detail::need(j, "attained", "solution").get<bool>();
  s.inconclusive = detail::need(j, "inconclusive", "solution").get<bool>();
  if (j.contains("alternative_case")) {
    s.alternative_case = case_from_string(j.at("alternative_case").get<std::string>());
  }
  if (j.contains("c_star")) s.c_star = detail::num(j, "c_star", "solution");
  if (j.contains("beta_star")) s.beta_star = detail::num(j, "beta_star", "solution");
  if (j.contains("k_star")) s.k_star = detail::num(j, "k_star", "solution");
  if (j.contains("tail_eps")) s.tail_eps = detail::num(j, "tail_eps", "solution");
  if (j.contains("sequence")) {
    for (const Json& e : j.at("sequence")) {
      SequencePoint p{};
      p.index = static_cast<int>(detail::num(e, "n", "solution.sequence[]"));
      p.c = detail::num(e, "c", "solution.sequence[]");
      p.k = detail::num(e, "k", "solution.sequence[]");
      p.value = detail::num(e, "value", "solution.sequence[]");
      p.beta = e.contains("beta") ? e.at("beta").get<double>()
                                  : std::numeric_limits<double>::quiet_NaN();
      s.sequence.push_back(p);
    }
  }
  if (j.contains("ratio_grid")) {
    for (const Json& e : j.at("ratio_grid")) {
      s.ratio_grid.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return s;
}

inline Json report_to_json(const CertifyReport& rep) {
  Json checks = Json::array();
  for (const CheckResult& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"observed", detail::extended(c.observed)},
                      {"expected", detail::extended(c.expected)},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  return Json{{"pass", rep.pass}, {"checks", std::move(checks)}};
}

inline Json diagnostic_to_json(const DependenceDiagnostic& d) {
  return Json{{"pass", d.pass},
              {"max_abs_z", d.max_abs_z},
              {"sup_distance", d.sup_distance},
              {"cell_z", d.cell_z}};
}

}  // namespace dualopt

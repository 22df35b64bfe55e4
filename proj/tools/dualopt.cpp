// Command-line front end: solve / certify / sweep over JSON instance configs.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dualopt/dualopt.hpp"

namespace {

using dualopt::CaseTag;
using dualopt::InstanceConfig;
using dualopt::Json;
using dualopt::KernelFamily;
using dualopt::KernelModel;
using dualopt::MixedMeasure;
using dualopt::PayoffForm;
using dualopt::Solution;

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return Json::parse(in);
}

// precedence: --seed flag, then DUALOPT_SEED, then the config value
void apply_overrides(InstanceConfig& cfg, const std::optional<long long>& n,
                     const std::optional<long long>& seed) {
  if (n) cfg.mc.n = static_cast<std::size_t>(*n);
  if (seed) {
    cfg.mc.seed = static_cast<std::uint64_t>(*seed);
  } else if (const char* env = std::getenv("DUALOPT_SEED")) {
    cfg.mc.seed = static_cast<std::uint64_t>(std::stoull(env));
  }
}

Solution run_solve(const InstanceConfig& cfg) {
  if (cfg.copula) {
    return dualopt::solve_with_copula(cfg.measure, cfg.joint(), *cfg.copula, cfg.x, cfg.mc,
                                      cfg.search);
  }
  return dualopt::solve(cfg.measure, cfg.kernel, cfg.x, cfg.search);
}

dualopt::CertifyReport run_certify(const InstanceConfig& cfg, const Solution& sol) {
  dualopt::CertifyConfig cc;
  cc.mc_n = cfg.mc.n;
  // offset so feasibility probes draw independently of the profile sample
  cc.seed = cfg.mc.seed + 1000;
  if (cfg.copula) {
    return dualopt::certify_copula(sol, cfg.measure, cfg.joint(), *cfg.copula, cfg.x, cfg.mc, cc);
  }
  return dualopt::certify(sol, cfg.measure, cfg.kernel, cfg.x, cc);
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// payoff as a function of the plotted abscissa, valid in every case; the
// unattained/divergent cases plot the deepest element of the sequence
double plot_payoff(const Solution& s, double abscissa, bool rank_axis) {
  if (s.case_tag == CaseTag::digital || s.case_tag == CaseTag::riskfree) {
    return rank_axis ? dualopt::payoff_value_at_rank(s, abscissa)
                     : dualopt::payoff_value(s, abscissa);
  }
  if (s.sequence.empty()) return 0.0;
  const auto& p = s.sequence.back();
  if (rank_axis) return abscissa >= p.c ? p.k : 0.0;
  return abscissa <= p.beta ? p.k : 0.0;
}

void emit_plots(const Solution& sol, const InstanceConfig& cfg, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/zeta.csv");
    out << "c,zeta\n";
    for (const auto& [c, z] : sol.ratio_grid) out << fmt(c) << "," << fmt(z) << "\n";
  }
  {
    std::ofstream out(dir + "/payoff.csv");
    const bool rank_axis = cfg.copula.has_value();
    const int points = cfg.search.plot_points;
    out << (rank_axis ? "z" : "rho") << ",payoff\n";
    for (int j = 0; j < points; ++j) {
      const double u =
          std::min(1.0 - 1e-6, std::max(1e-6, static_cast<double>(j) / (points - 1)));
      const double a = rank_axis ? u : cfg.kernel.quantile(u);
      out << fmt(a) << "," << fmt(plot_payoff(sol, a, rank_axis)) << "\n";
    }
  }
}

int cmd_solve(const std::string& path, const std::optional<long long>& n,
              const std::optional<long long>& seed, const std::string& plot_dir) {
  InstanceConfig cfg = dualopt::instance_from_json(load_json(path));
  apply_overrides(cfg, n, seed);
  try {
    const Solution sol = run_solve(cfg);
    std::cout << dualopt::solution_to_json(sol).dump(2) << "\n";
    if (!plot_dir.empty()) emit_plots(sol, cfg, plot_dir);
    return sol.inconclusive ? 3 : 0;
  } catch (const dualopt::SolverInconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << " (bounds " << fmt(e.lower_bound) << ", "
              << fmt(e.upper_bound) << ")\n";
    return 3;
  }
}

int cmd_certify(const std::string& path, const std::optional<long long>& n,
                const std::optional<long long>& seed, const std::string& solution_path) {
  InstanceConfig cfg = dualopt::instance_from_json(load_json(path));
  apply_overrides(cfg, n, seed);
  Json sol_json;
  if (!solution_path.empty()) {
    sol_json = load_json(solution_path);
  } else {
    try {
      sol_json = dualopt::solution_to_json(run_solve(cfg));
    } catch (const dualopt::SolverInconclusive& e) {
      std::cerr << "inconclusive: " << e.what() << "\n";
      return 3;
    }
  }
  // field-level overrides from the config let a run check a tampered or
  // externally produced optimum
  if (cfg.solution_override.is_object()) {
    for (const auto& [key, value] : cfg.solution_override.items()) sol_json[key] = value;
  }
  const Solution sol = dualopt::solution_from_json(sol_json);
  const auto report = run_certify(cfg, sol);
  std::cout << dualopt::report_to_json(report).dump(2) << "\n";
  return report.pass ? 0 : 1;
}

InstanceConfig with_param(InstanceConfig cfg, const std::string& param, double v) {
  const KernelModel& k = cfg.kernel;
  if (param == "x") {
    if (!(v > 0.0)) throw std::invalid_argument("sweep: x values must be positive");
    cfg.x = v;
  } else if (param == "alpha") {
    cfg.measure = MixedMeasure::dirac(v);
  } else if (param == "kernel.mu" || param == "kernel.sigma") {
    if (k.family() != KernelFamily::lognormal) {
      throw std::invalid_argument("sweep: " + param + " requires a lognormal kernel");
    }
    cfg.kernel = param == "kernel.mu" ? KernelModel::lognormal(v, k.param2())
                                      : KernelModel::lognormal(k.param1(), v);
  } else if (param == "kernel.a" || param == "kernel.b") {
    if (k.family() != KernelFamily::uniform) {
      throw std::invalid_argument("sweep: " + param + " requires a uniform kernel");
    }
    cfg.kernel = param == "kernel.a" ? KernelModel::uniform(v, k.param2())
                                     : KernelModel::uniform(k.param1(), v);
  } else if (param == "kernel.shift" || param == "kernel.rate") {
    if (k.family() != KernelFamily::shifted_exponential) {
      throw std::invalid_argument("sweep: " + param + " requires a shifted-exponential kernel");
    }
    cfg.kernel = param == "kernel.shift" ? KernelModel::shifted_exponential(v, k.param2())
                                         : KernelModel::shifted_exponential(k.param1(), v);
  } else if (param == "copula.r") {
    if (!cfg.copula) throw std::invalid_argument("sweep: copula.r requires a copula block");
    cfg.copula = dualopt::CopulaModel::gaussian(v);
  }
  return cfg;
}

bool known_param(const std::string& p) {
  static const std::vector<std::string> names = {"x",        "alpha",        "kernel.mu",
                                                 "kernel.sigma", "kernel.a", "kernel.b",
                                                 "kernel.shift", "kernel.rate", "copula.r"};
  for (const auto& n : names) {
    if (n == p) return true;
  }
  return false;
}

int cmd_sweep(const std::string& path, const std::optional<long long>& n,
              const std::optional<long long>& seed, const std::string& param,
              const std::vector<double>& values) {
  if (!known_param(param)) {
    std::cerr << "unknown sweep parameter: " << param << "\n";
    return 2;
  }
  InstanceConfig base = dualopt::instance_from_json(load_json(path));
  apply_overrides(base, n, seed);
  std::cout << "parameter,case,gamma_star,value,beta_star,k_star\n";
  for (double v : values) {
    const InstanceConfig cfg = with_param(base, param, v);
    std::cout << fmt(v) << ",";
    try {
      const Solution sol = run_solve(cfg);
      std::cout << to_string(sol.case_tag) << "," << fmt(sol.gamma_star) << ","
                << fmt(sol.optimal_value) << "," << (sol.beta_star ? fmt(*sol.beta_star) : "")
                << "," << (sol.k_star ? fmt(*sol.k_star) : "") << "\n";
    } catch (const dualopt::SolverInconclusive&) {
      std::cout << "inconclusive,,,,\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal digital payoffs under quantile-weighted preferences"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<long long> n_override;
  std::optional<long long> seed_override;
  std::string plot_dir;
  std::string solution_path;
  std::string param;
  std::vector<double> values;
  double from = 0.0, to = 0.0;
  int count = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "instance config (JSON)")->required();
    cmd->add_option("--n", n_override, "override Monte Carlo sample count");
    cmd->add_option("--seed", seed_override, "override random seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "classify and solve an instance");
  add_common(solve);
  solve->add_option("--emit-plots", plot_dir, "write zeta.csv and payoff.csv to this directory");

  CLI::App* certify = app.add_subcommand("certify", "solve then verify against oracles");
  add_common(certify);
  certify->add_option("--solution", solution_path, "certify this solution file instead");

  CLI::App* sweep = app.add_subcommand("sweep", "re-solve across a parameter grid (CSV)");
  add_common(sweep);
  sweep->add_option("--param", param, "parameter to vary")->required();
  sweep->add_option("--values", values, "explicit grid values")->delimiter(',');
  sweep->add_option("--from", from, "grid start");
  sweep->add_option("--to", to, "grid end");
  sweep->add_option("--count", count, "grid size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, n_override, seed_override, plot_dir);
    if (certify->parsed()) return cmd_certify(config_path, n_override, seed_override, solution_path);
    if (values.empty() && count > 0) {
      for (int j = 0; j < count; ++j) {
        values.push_back(count == 1 ? from : from + (to - from) * j / (count - 1));
      }
    }
    return cmd_sweep(config_path, n_override, seed_override, param, values);
  } catch (const Json::parse_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dualopt/verify.hpp"

using namespace dualopt;

namespace {

const KernelModel kU0515 = KernelModel::uniform(0.5, 1.5);
const KernelModel kU12 = KernelModel::uniform(1.0, 2.0);
const KernelModel kLn01 = KernelModel::lognormal(0.0, 1.0);

CheckResult find_check(const CertifyReport& rep, const std::string& name) {
  for (const CheckResult& c : rep.checks) {
    if (c.name == name) return c;
  }
  FAIL("missing check " + name);
  return {};
}

std::vector<double> digital_sample(double zero_fraction, double k, std::size_t n) {
  std::vector<double> s(n, k);
  std::fill_n(s.begin(), static_cast<std::size_t>(zero_fraction * n), 0.0);
  return s;
}

}  // namespace

TEST_CASE("evaluate_V handles constants, digitals, and mixtures") {
  const std::vector<double> fives{5.0, 5.0, 5.0};
  CHECK(evaluate_V(fives, MixedMeasure::dirac(0.5)) == 5.0);
  CHECK_THAT(evaluate_V(fives, MixedMeasure::uniform_density()),
             Catch::Matchers::WithinRel(5.0, 1e-12));

  // a median above / inside the zero mass
  CHECK(evaluate_V(digital_sample(0.4, 3.0, 1000), MixedMeasure::dirac(0.5)) == 3.0);
  CHECK(evaluate_V(digital_sample(0.6, 3.0, 1000), MixedMeasure::dirac(0.5)) == 0.0);

  // hand-computed mixture on the sample {1,2,3,4}
  const MixedMeasure m({{0.2, 0.3}, {0.9, 0.2}}, {{0.0, 1.0, {0.5}}});
  CHECK_THAT(evaluate_V({4.0, 2.0, 1.0, 3.0}, m), Catch::Matchers::WithinRel(2.35, 1e-13));

  // endpoint conventions: atoms at 0 and 1 read off min and max
  const MixedMeasure ends({{0.0, 0.5}, {1.0, 0.5}}, {});
  CHECK(evaluate_V({4.0, 2.0, 1.0, 3.0}, ends) == 2.5);

  CHECK_THROWS_AS(evaluate_V({}, MixedMeasure::dirac(0.5)), std::invalid_argument);
}

TEST_CASE("evaluate_V is monotone in the sample") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const MixedMeasure ms[] = {MixedMeasure::dirac(0.3), MixedMeasure::uniform_density(),
                             MixedMeasure({{0.2, 0.3}, {0.9, 0.2}}, {{0.0, 1.0, {0.5}}})};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(200), b(200);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = 10.0 * unif(gen) - 3.0;
      b[i] = a[i] + 2.0 * unif(gen);
    }
    for (const MixedMeasure& m : ms) CHECK(evaluate_V(b, m) >= evaluate_V(a, m));
  }
}

TEST_CASE("evaluate_V converges to the digital closed form") {
  // X = k 1{rho <= beta} with in-the-money probability 0.7
  const double beta = kU0515.quantile(0.7);
  const double k = 3.0;
  const MixedMeasure m({{0.5, 0.6}}, {{0.0, 1.0, {0.4}}});
  std::vector<double> payoff;
  const std::size_t n = 1000000;
  payoff.reserve(n);
  for (double rho : kU0515.sample(n, 31)) payoff.push_back(rho <= beta ? k : 0.0);
  // V = k * m([0.3, 1]) since the quantile jumps at the miss probability
  const double truth = k * (0.6 + 0.4 * 0.7);
  CHECK_THAT(evaluate_V(payoff, m), Catch::Matchers::WithinRel(truth, 0.02));
}

TEST_CASE("brute force oracle recovers the digital atom optimum") {
  const auto cost = cost_profile_from_kernel(kU0515);
  const auto res = brute_force_oracle(MixedMeasure::dirac(0.5), cost, 1.0);
  CHECK(res.a == 0.0);
  CHECK(res.c == 0.5);
  CHECK_THAT(res.value, Catch::Matchers::WithinRel(8.0 / 3.0, 1e-12));
  CHECK_THAT(res.k, Catch::Matchers::WithinRel(8.0 / 3.0, 1e-12));
  CHECK(res.a * cost.total_cost + res.k * cost.tail_cost(res.c) <= 1.0 + 1e-12);
  CHECK(res.c_grid == 10000);
  CHECK(res.a_grid == 11);
}

TEST_CASE("brute force oracle falls back to the riskfree bond") {
  const auto cost = cost_profile_from_kernel(kU0515);
  const auto res = brute_force_oracle(MixedMeasure::dirac(0.0), cost, 1.0);
  CHECK_THAT(res.value, Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK(res.k == 0.0);
  CHECK(res.a == 1.0 / cost.total_cost);
}

TEST_CASE("brute force oracle approaches an unattained supremum from below") {
  const auto cost = cost_profile_from_kernel(kU12);
  const auto m = MixedMeasure::uniform_density();
  const auto res = brute_force_oracle(m, cost, 1.0);
  CHECK(res.value < 1.0);
  CHECK(res.value > 0.999);

  // doubling the c-grid never decreases the value and shrinks the gap
  const auto fine = brute_force_oracle(m, cost, 1.0, OracleConfig{20000, 11});
  CHECK(fine.value >= res.value);
  CHECK(1.0 - fine.value < 1.0 - res.value);
}

TEST_CASE("oracle never beats the solver on random instances") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const KernelModel kernels[] = {kU0515, kU12, kLn01, KernelModel::shifted_exponential(1.0, 2.0)};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Atom> atoms;
    const int n_atoms = 1 + int(unif(gen) * 3.0);
    double mass_left = 1.0;
    for (int i = 0; i < n_atoms; ++i) {
      const double mass = i + 1 == n_atoms ? mass_left : mass_left * unif(gen);
      atoms.push_back({0.05 + 0.9 * unif(gen), mass});
      mass_left -= mass;
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      if (atoms[i].location <= atoms[i - 1].location) {
        atoms[i].location = atoms[i - 1].location + 1e-4;
      }
    }
    const MixedMeasure m(atoms, {});
    const KernelModel& kernel = kernels[trial % 4];
    const double x = 0.1 + 9.9 * unif(gen);
    const auto sol = solve(m, kernel, x);
    const auto res = brute_force_oracle(m, cost_profile_from_kernel(kernel), x,
                                        OracleConfig{1000, 5});
    CHECK(res.value <= sol.optimal_value + 1e-9 * x);
    CHECK(res.a * sol.delta + res.k * cost_profile_from_kernel(kernel).tail_cost(res.c) <=
          x + 1e-12);
  }
}

TEST_CASE("mc feasibility confirms binding budgets and flags violations") {
  // riskfree position: cost identity holds in expectation
  const double level = 2.0 / kLn01.mean();
  auto riskfree = mc_feasibility([level](double) { return level; }, kLn01, 2.0, 100000, 3);
  CHECK(riskfree.within);
  CHECK(std::abs(riskfree.estimate - 2.0) <= 4.0 * riskfree.std_error);

  // canonical digital instance, binding at n = 10^6
  const auto sol = solve(MixedMeasure::dirac(0.5), kU0515, 1.0);
  auto digital = mc_feasibility([&sol](double rho) { return payoff_value(sol, rho); }, kU0515,
                                1.0, 1000000, 4);
  CHECK(std::abs(digital.estimate - 1.0) <= 4.0 * digital.std_error);
  CHECK(digital.n == 1000000);

  // zero payoff costs exactly nothing
  auto zero = mc_feasibility([](double) { return 0.0; }, kU0515, 1.0, 10000, 5);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.within);

  // inflating the notional by 10% breaks the budget
  auto inflated = mc_feasibility(
      [&sol](double rho) { return 1.1 * payoff_value(sol, rho); }, kU0515, 1.0, 100000, 6);
  CHECK_FALSE(inflated.within);
  CHECK(inflated.estimate > 1.05);

  CHECK_THROWS_AS(mc_feasibility([](double) { return 0.0; }, kU0515, 1.0, 9999, 1),
                  std::invalid_argument);

  // rank-indexed payoff under independence: Z >= 1/2 means rho below median
  const JointMarketModel joint(0.0, 1.0, 0.0, 1.0, 0.0);
  const double k = 1.0 / kLn01.lower_partial_mean(0.5);
  auto rank = mc_feasibility([k](double z) { return z >= 0.5 ? k : 0.0; }, joint,
                             CopulaModel::independence(), 1.0, 200000, 8);
  CHECK(std::abs(rank.estimate - 1.0) <= 4.0 * rank.std_error);
}

TEST_CASE("certify passes the canonical digital instance") {
  const auto m = MixedMeasure::dirac(0.5);
  const auto sol = solve(m, kU0515, 1.0);
  const auto rep = certify(sol, m, kU0515, 1.0);
  for (const CheckResult& c : rep.checks) {
    INFO(c.name << ": " << c.detail << " observed=" << c.observed);
    CHECK(c.pass);
  }
  CHECK(rep.pass);
  CHECK(rep.checks.size() == 6);
}

TEST_CASE("certify rejects an inflated notional") {
  const auto m = MixedMeasure::dirac(0.5);
  auto sol = solve(m, kU0515, 1.0);
  *sol.k_star *= 1.1;
  const auto rep = certify(sol, m, kU0515, 1.0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(find_check(rep, "budget-binding").pass);
  CHECK_FALSE(find_check(rep, "mc-feasibility").pass);
}

TEST_CASE("certify rejects a shifted threshold") {
  const auto m = MixedMeasure::dirac(0.5);
  auto sol = solve(m, kU0515, 1.0);
  // keep the position feasible so only the value checks can object
  sol.c_star = 0.3;
  sol.beta_star = kU0515.quantile(0.7);
  sol.k_star = 1.0 / kU0515.partial_expectation(0.3);
  const auto rep = certify(sol, m, kU0515, 1.0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(find_check(rep, "preference-value").pass);
  CHECK(find_check(rep, "budget-binding").pass);
}

TEST_CASE("certify passes the riskfree and limit cases") {
  {
    const auto m = MixedMeasure::dirac(0.0);
    const auto rep = certify(solve(m, kU0515, 1.0), m, kU0515, 1.0);
    INFO("riskfree");
    CHECK(rep.pass);
  }
  {
    const auto m = MixedMeasure::uniform_density();
    const auto sol = solve(m, kU12, 1.0);
    REQUIRE(sol.case_tag == CaseTag::unattained);
    const auto rep = certify(sol, m, kU12, 1.0);
    for (const CheckResult& c : rep.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.pass);
    }
    const auto seq = find_check(rep, "sequence-increasing");
    CHECK(seq.pass);
  }
  {
    const auto m = MixedMeasure::uniform_density();
    const auto sol = solve(m, kLn01, 1.0);
    REQUIRE(sol.case_tag == CaseTag::infinite);
    const auto rep = certify(sol, m, kLn01, 1.0);
    for (const CheckResult& c : rep.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("certify validates a copula solution end to end") {
  const JointMarketModel joint(0.0, 1.0, 0.0, 1.0, 0.0);
  const auto cop = CopulaModel::independence();
  const McConfig mc{200000, 50, 11};
  const auto m = MixedMeasure::dirac(0.5);
  const auto sol = solve_with_copula(m, joint, cop, 1.0, mc);
  REQUIRE(sol.case_tag == CaseTag::digital);
  const auto rep = certify_copula(sol, m, joint, cop, 1.0, mc);
  for (const CheckResult& c : rep.checks) {
    INFO(c.name << ": " << c.detail << " observed=" << c.observed);
    CHECK(c.pass);
  }
  CHECK(rep.pass);

  auto bad = sol;
  *bad.k_star *= 1.2;
  CHECK_FALSE(certify_copula(bad, m, joint, cop, 1.0, mc).pass);
}

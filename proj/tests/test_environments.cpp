#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fgtsva/diagnostics.hpp"
#include "fgtsva/environments.hpp"

using namespace fgtsva;

TEST_CASE("theta_star sampling") {
  SUBCASE("d = 1 gives +-1") {
    int plus = 0;
    for (int k = 0; k < 200; ++k) {
      RngStream rng(1, k, 0, 0);
      const auto v = sample_theta_star(rng, 1);
      CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-12);
      if (v[0] > 0) ++plus;
    }
    CHECK(plus > 50);
    CHECK(plus < 150);
  }
  SUBCASE("unit norm at d = 5, deterministic under a fixed stream") {
    RngStream rng(7, 3, 0, 0);
    const auto v = sample_theta_star(rng, 5);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    RngStream rng2(7, 3, 0, 0);
    CHECK((sample_theta_star(rng2, 5) - v).norm() == 0.0);
  }
  SUBCASE("Monte-Carlo symmetry: coordinate means vanish") {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    const int n = 10000;
    RngStream rng(11, 0, 0, 0);
    for (int k = 0; k < n; ++k) mean += sample_theta_star(rng, 3);
    mean /= n;
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mean[j]) < 0.05);
  }
}

TEST_CASE("noise schedules") {
  RngStream rng(3, 0, 0, 1);
  SUBCASE("deterministic is always zero") {
    const auto sched = NoiseSchedule::deterministic();
    for (int k = 0; k < 100; ++k) CHECK(sched.draw_sigma_sq(rng) == 0.0);
  }
  SUBCASE("constant returns v") {
    const auto sched = NoiseSchedule::constant(1.0);
    CHECK(sched.draw_sigma_sq(rng) == 1.0);
  }
  SUBCASE("sparse hits p = 0.1 within 0.01 over 1e5 draws") {
    const auto sched = NoiseSchedule::sparse(0.1);
    int ones = 0;
    for (int k = 0; k < 100000; ++k)
      if (sched.draw_sigma_sq(rng) == 1.0) ++ones;
    CHECK(std::abs(ones / 1e5 - 0.1) < 0.01);
  }
  SUBCASE("dense chi-square(1) has mean about 1") {
    const auto sched = NoiseSchedule::dense();
    double sum = 0.0;
    for (int k = 0; k < 100000; ++k) sum += sched.draw_sigma_sq(rng);
    CHECK(std::abs(sum / 1e5 - 1.0) < 0.03);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(NoiseSchedule::sparse(1.5), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule::constant(-1.0), std::invalid_argument);
  }
}

namespace {

LinearEnv fixed_env(NoiseSchedule noise, int T, std::uint64_t seed, std::uint64_t run) {
  return LinearEnv(Eigen::VectorXd::Unit(2, 0), ActionSet::hypercube(2), noise, T, seed, run);
}

}  // namespace

TEST_CASE("env round protocol") {
  SUBCASE("zero noise gives the exact reward") {
    auto env = fixed_env(NoiseSchedule::deterministic(), 3, 1, 0);
    const auto start = env.begin_round(1);
    CHECK(start.sigma_sq == 0.0);
    ActionChoice best = argmax_action(env.f_star(), env.actions());
    CHECK(env.step(1, best) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
  SUBCASE("out-of-order rounds are rejected") {
    auto env = fixed_env(NoiseSchedule::deterministic(), 3, 1, 0);
    CHECK_THROWS_AS(env.begin_round(2), std::logic_error);
    env.begin_round(1);
    CHECK_THROWS_AS(env.begin_round(1), std::logic_error);
    ActionChoice best = argmax_action(env.f_star(), env.actions());
    CHECK_THROWS_AS(env.step(2, best), std::logic_error);
    env.step(1, best);
    CHECK_THROWS_AS(env.step(1, best), std::logic_error);
  }
  SUBCASE("noise is zero-mean with the revealed variance") {
    // 1e5 independent realizations of round 1 via the run key
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    ActionChoice plus;
    plus.id = 0;
    plus.feature = ActionSet::hypercube(2).feature(0);
    const double f_value = plus.feature[0];  // <e1, phi>
    for (int k = 0; k < n; ++k) {
      auto env = fixed_env(NoiseSchedule::constant(1.0), 1, 5, k);
      env.begin_round(1);
      const double eps = env.step(1, plus) - f_value;
      sum += eps;
      sumsq += eps * eps;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(sumsq / n - mean * mean - 1.0) < 0.05);
  }
  SUBCASE("noise draws are independent across rounds (lag-1 autocorrelation)") {
    const int T = 100000;
    auto env = fixed_env(NoiseSchedule::constant(1.0), T, 17, 0);
    ActionChoice plus;
    plus.id = 0;
    plus.feature = ActionSet::hypercube(2).feature(0);
    const double f_value = plus.feature[0];
    std::vector<double> eps(T);
    for (int t = 1; t <= T; ++t) {
      env.begin_round(t);
      eps[static_cast<std::size_t>(t - 1)] = env.step(t, plus) - f_value;
    }
    double mean = 0.0;
    for (double e : eps) mean += e;
    mean /= T;
    double num = 0.0, den = 0.0;
    for (int t = 0; t + 1 < T; ++t) num += (eps[t] - mean) * (eps[t + 1] - mean);
    for (double e : eps) den += (e - mean) * (e - mean);
    CHECK(std::abs(num / den) < 0.02);
  }
}

TEST_CASE("fixed keys reproduce the full noise path bit for bit") {
  for (int run = 0; run < 3; ++run) {
    auto env1 = LinearEnv::make(4, NoiseSchedule::sparse(0.3), 50, 99, run);
    auto env2 = LinearEnv::make(4, NoiseSchedule::sparse(0.3), 50, 99, run);
    CHECK((env1.theta_star() - env2.theta_star()).norm() == 0.0);
    ActionChoice a = argmax_action(env1.f_star(), env1.actions());
    for (int t = 1; t <= 50; ++t) {
      const auto s1 = env1.begin_round(t);
      const auto s2 = env2.begin_round(t);
      CHECK(s1.sigma_sq == s2.sigma_sq);
      CHECK(env1.step(t, a) == env2.step(t, a));
    }
  }
}

TEST_CASE("every shipped schedule passes the subgaussian MGF check") {
  const std::vector<double> grid = {-1.0, -0.5, 0.5, 1.0};
  const int n = 100000;
  SUBCASE("deterministic: zero noise under any bound") {
    auto gen = []() { return 0.0; };
    CHECK(empirical_mgf_check(gen, 0.0, grid, n, MgfConvention::EighthBound).holds);
  }
  SUBCASE("constant(1): declared norm 4 under the /8 convention") {
    auto rng = std::make_shared<RngStream>(21, 0, 0, 2);
    auto gen = [rng]() { return rng->next_gaussian(); };
    CHECK(empirical_mgf_check(gen, 4.0, grid, n, MgfConvention::EighthBound).holds);
  }
  SUBCASE("constant(1): declared norm 1 under the conventional /2 bound") {
    auto rng = std::make_shared<RngStream>(22, 0, 0, 2);
    auto gen = [rng]() { return rng->next_gaussian(); };
    CHECK(empirical_mgf_check(gen, 1.0, grid, n, MgfConvention::HalfBound).holds);
  }
  SUBCASE("sparse(0.1): unconditional noise at the max variance") {
    auto rng = std::make_shared<RngStream>(23, 0, 0, 2);
    const auto sched = NoiseSchedule::sparse(0.1);
    auto gen = [rng, sched]() {
      const double s2 = sched.draw_sigma_sq(*rng);
      return s2 > 0.0 ? std::sqrt(s2) * rng->next_gaussian() : 0.0;
    };
    CHECK(empirical_mgf_check(gen, 4.0, grid, n, MgfConvention::EighthBound).holds);
  }
  SUBCASE("dense: standardized conditional noise is standard normal") {
    auto rng = std::make_shared<RngStream>(24, 0, 0, 2);
    const auto sched = NoiseSchedule::dense();
    auto gen = [rng, sched]() {
      double s2 = 0.0;
      do {
        s2 = sched.draw_sigma_sq(*rng);
      } while (s2 == 0.0);
      return std::sqrt(s2) * rng->next_gaussian() / std::sqrt(s2);
    };
    CHECK(empirical_mgf_check(gen, 4.0, grid, n, MgfConvention::EighthBound).holds);
  }
}

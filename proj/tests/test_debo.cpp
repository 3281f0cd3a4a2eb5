#include "offload/debo.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_util.hpp"

using namespace offload;
using namespace offload::testutil;

namespace {

double binomial(int n, int k) {
  double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Exact per-slot probability that a user's random-offloading draw on server j
// ends processed, summing over the collision patterns of the other users.
double ro_success_probability(int num_users, int m_total, int m_j) {
  const double q = static_cast<double>(m_j) / m_total;
  const double p_unit = 1.0 / m_j;
  double total = 0;
  for (int x = 0; x <= num_users - 1; ++x) {
    const double p_x =
        binomial(num_users - 1, x) * std::pow(q, x) * std::pow(1 - q, num_users - 1 - x);
    double win = 1.0;
    if (x + 1 > m_j) {
      win = 0.0;
      for (int y = 0; y <= x; ++y) {
        win += binomial(x, y) * std::pow(p_unit, y) * std::pow(1 - p_unit, x - y) / (1.0 + y);
      }
    }
    total += p_x * win;
  }
  return q * total;
}

Matrix well_separated_mu() { return Matrix::from_rows({{2.0, 1.0}, {1.2, 2.2}}); }

}  // namespace

TEST_CASE("gap-aware parameter formulas", "[debo]") {
  GapSummary gaps;
  gaps.delta_min = 2.0;
  gaps.delta_user_min = 1.0;
  const auto p = gap_aware_params(gaps, 2, 2, 1, 2, 1.0, 0.0);
  CHECK(p.t1 == 162);  // max{ceil(1024/36), 162}
  CHECK(p.epsilon == Catch::Approx(0.2));
  CHECK(p.t2 == 24);  // ceil(4 + 4/0.2)
}

TEST_CASE("t1 cap truncates the exploration length", "[debo]") {
  GapSummary gaps;
  gaps.delta_min = 0.001;
  gaps.delta_user_min = 0.01;
  const auto p = gap_aware_params(gaps, 10, 12, 2, 3, 3.8, 0.3, 500);
  CHECK(p.t1 == 500);
}

TEST_CASE("random offloading with no contention fills the estimator", "[debo]") {
  Matrix mu = Matrix::from_rows({{1.0, 2.0}});
  Environment env = matrix_env(mu, {1, 1});
  Rng rng(1);
  const auto est = run_ro(EstimatorState(1, 2), env, 500, rng);
  double total = 0;
  for (int j = 0; j < 2; ++j) total += est.success_counts()(0, j);
  CHECK(total == 500.0);
}

TEST_CASE("single unit arbitration admits exactly one user per slot", "[debo]") {
  Matrix mu = Matrix::from_rows({{1.0}, {1.5}});
  Environment env = matrix_env(mu, {1});
  Rng rng(2);
  const auto est = run_ro(EstimatorState(2, 1), env, 400, rng);
  CHECK(est.success_counts()(0, 0) + est.success_counts()(1, 0) == 400.0);
  // Both users win a fair share of the contested unit.
  CHECK(est.success_counts()(0, 0) / 400.0 == Catch::Approx(0.5).margin(0.1));
}

TEST_CASE("RO empirical success rate matches the combinatorial value", "[debo][slow]") {
  Rng instance_rng(99);
  PaperInstance inst = paper_instance(instance_rng, 10, 3);
  inst.servers[0].task_capacity = 4;
  inst.servers[1].task_capacity = 3;
  inst.servers[2].task_capacity = 5;
  Environment env =
      Environment::from_profiles(inst.users, inst.servers, 0.3, 0.3, 3.8,
                                 CapacityModel::homogeneous);

  Rng rng(7);
  const long long t1 = 10000;
  const auto est = run_ro(EstimatorState(10, 3), env, t1, rng);
  const int m_total = 12;
  const int caps[3] = {4, 3, 5};
  for (int j = 0; j < 3; ++j) {
    const double expect = ro_success_probability(10, m_total, caps[j]);
    for (int i = 0; i < 10; ++i) {
      REQUIRE(est.success_counts()(i, j) / static_cast<double>(t1) ==
              Catch::Approx(expect).margin(0.02));
    }
  }
}

TEST_CASE("estimates stay within the observation bounds", "[debo][property]") {
  Rng instance_rng(55);
  Environment env = paper_env(instance_rng, 6, 3);
  Rng rng(56);
  const auto est = run_ro(EstimatorState(6, 3), env, 2000, rng);
  const auto r = est.estimates(env.reward_model().reward_lower);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      REQUIRE(r(i, j) >= env.reward_model().reward_lower - 1e-9);
      REQUIRE(r(i, j) <= env.reward_model().reward_upper + 1e-9);
    }
  }
}

TEST_CASE("horizon below t1 yields a pure exploration trace", "[debo]") {
  Environment env = matrix_env(well_separated_mu(), {1, 1});
  Rng rng(3);
  EpochParams params{0.2, 100, 50};
  const auto trace = run_debo(env, 40, params, rng);
  REQUIRE(trace.slots() == 40);
  REQUIRE(trace.epochs.size() == 1);
  CHECK(trace.epochs[0].explore_slots == 40);
  CHECK(trace.epochs[0].match_slots == 0);
  CHECK(trace.epochs[0].exploit_slots == 0);
}

TEST_CASE("debo converges to the oracle assignment on a separated instance", "[debo]") {
  const Matrix mu = well_separated_mu();
  Environment env = matrix_env(mu, {1, 1});
  const auto gaps = compute_gaps(mu, {1, 1});
  const auto params = gap_aware_params(gaps, 2, 2, 1, 2, env.reward_model().reward_upper,
                                      env.reward_model().reward_lower);
  const auto oracle = solve_oap(mu, {1, 1});
  Rng rng(4);
  const auto trace = run_debo(env, 1 << 13, params, rng);
  const auto* final_epoch = trace.last_exploited_epoch();
  REQUIRE(final_epoch != nullptr);
  CHECK(final_epoch->assignment == oracle.assignment);
  CHECK_FALSE(trace.any_budget_exhausted);
}

TEST_CASE("epoch count respects the log bound", "[debo][property]") {
  Environment env = matrix_env(well_separated_mu(), {1, 1});
  for (const long long horizon : {64LL, 1024LL, 1LL << 14}) {
    Rng rng(5);
    EpochParams params{0.2, 10, 50};
    const auto trace = run_debo(env, horizon, params, rng);
    REQUIRE(trace.slots() == horizon);
    CHECK(static_cast<double>(trace.epochs.size()) <=
          std::log2(static_cast<double>(horizon) + 2.0));
  }
}

TEST_CASE("unexplored pairs fall back to the reward floor and are flagged", "[debo]") {
  // One exploration slot for two users cannot cover four pairs.
  Environment env = matrix_env(well_separated_mu(), {1, 1});
  Rng rng(6);
  EpochParams params{0.2, 1, 50};
  const auto trace = run_debo(env, 200, params, rng);
  REQUIRE_FALSE(trace.epochs.empty());
  CHECK(trace.epochs[0].estimate_holes >= 2);
}

TEST_CASE("matching slots earn rewards without touching the estimator", "[debo]") {
  const Matrix mu = well_separated_mu();
  Environment env = matrix_env(mu, {1, 1});
  Rng rng(8);
  TraceBuilder trace(2, 1000);
  EpochEngine engine(env, 1000, trace, rng);
  EstimatorState est(2, 2);
  engine.explore(50, est, 1);
  const Matrix before_v = est.success_counts();
  const Matrix before_s = est.reward_sums();

  const auto values = est.estimates(env.reward_model().reward_lower);
  const auto result = engine.match(values, 100, 0.05, 1);
  CHECK_FALSE(result.budget_exhausted);

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(est.success_counts()(i, j) == before_v(i, j));
      CHECK(est.reward_sums()(i, j) == before_s(i, j));
    }
  }
  // The matching slots themselves earned observable reward.
  const auto finished = trace.finish();
  double match_reward = 0;
  for (long long t = 50; t < 50 + result.rounds_used; ++t) {
    match_reward += finished.slot_sampled[t];
  }
  CHECK(match_reward > 0);
}

TEST_CASE("estimator error is small by epoch three on a separated instance",
          "[debo][property]") {
  const Matrix mu = well_separated_mu();
  const auto gaps = compute_gaps(mu, {1, 1});
  Environment env = matrix_env(mu, {1, 1});
  const auto params = gap_aware_params(gaps, 2, 2, 1, 2, env.reward_model().reward_upper,
                                      env.reward_model().reward_lower);
  const double threshold = 3 * gaps.delta_min / (8 * 2);
  const double bound = std::min(1.0, 3.0 * 2 * 2 * std::exp(-3.0));

  int failures = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(1000 + s);
    EstimatorState est(2, 2);
    for (int epoch = 1; epoch <= 3; ++epoch) est = run_ro(std::move(est), env, params.t1, rng);
    const auto r = est.estimates(env.reward_model().reward_lower);
    double max_err = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) max_err = std::max(max_err, std::abs(r(i, j) - mu(i, j)));
    }
    if (max_err > threshold) ++failures;
  }
  CHECK(failures <= static_cast<int>(bound * seeds));
}

TEST_CASE("every epoch assignment respects server capacity", "[debo][property]") {
  Rng instance_rng(123);
  Environment env = paper_env(instance_rng, 8, 3);
  while (env.total_task_capacity() < 8) env = paper_env(instance_rng, 8, 3);
  const auto gaps = compute_gaps(env.mu(), env.task_capacities());
  const auto caps = env.task_capacities();
  const auto params =
      gap_aware_params(gaps, 8, env.total_task_capacity(),
                      *std::min_element(caps.begin(), caps.end()), 3,
                      env.reward_model().reward_upper, env.reward_model().reward_lower, 200);
  Rng rng(9);
  const auto trace = run_debo(env, 1 << 12, params, rng);
  for (const auto& epoch : trace.epochs) {
    std::vector<int> count(3, 0);
    for (int a : epoch.assignment) {
      if (a > 0) count[a - 1] += 1;
    }
    for (int j = 0; j < 3; ++j) REQUIRE(count[j] <= caps[j]);
  }
}

#include "offload/hdebo.hpp"

#include <algorithm>
#include <cmath>

namespace offload {

HeteroParams HeteroParams::from_instance(const std::vector<double>& demands,
                                         const std::vector<double>& capacities, int num_users) {
  HeteroParams p;
  const double max_demand = *std::max_element(demands.begin(), demands.end());
  const double min_capacity = *std::min_element(capacities.begin(), capacities.end());
  const double max_capacity = *std::max_element(capacities.begin(), capacities.end());
  const double min_demand = *std::min_element(demands.begin(), demands.end());
  if (max_demand > min_capacity + 1e-12) {
    throw ConfigError("hdebo: max demand exceeds min server capacity");
  }
  p.m_bar_min = static_cast<int>(std::floor(min_capacity / max_demand + 1e-12));
  p.m_bar_max = max_capacity / min_demand;
  p.n_groups = (num_users + p.m_bar_min - 1) / p.m_bar_min;
  return p;
}

long long hetero_exploration_length(double delta_prime_min, double m_bar_max, int num_servers, int num_users,
                      int n_groups, double reward_upper, double reward_lower,
                      std::optional<long long> t1_cap) {
  if (!(delta_prime_min > 0)) {
    throw ConfigError("hdebo: delta_prime_min must be positive");
  }
  const double range = reward_upper - reward_lower;
  double base = 25 * m_bar_max * m_bar_max * range * range /
                (2 * delta_prime_min * delta_prime_min);
  if (!std::isfinite(base)) base = 0;  // infinite gap: any exploration length works
  const double factor = n_groups <= num_servers ? num_servers : num_servers + num_users;
  long long t1 = static_cast<long long>(std::ceil(base * factor));
  if (t1_cap) t1 = std::min(t1, *t1_cap);
  return std::max(t1, 1LL);
}

int explore_target(long long t, int group, int num_servers, int n_groups) {
  const int k = num_servers;
  int rel = group;
  if (n_groups > k) {
    // Blocks of K groups share the rotation; the tail block wraps from the
    // last full block boundary.
    const int full_blocks = n_groups / k;
    if (group > full_blocks * k) {
      rel = group - full_blocks * k;
    } else {
      rel = group - ((group - 1) / k) * k;
    }
  }
  // Cycling the offset over K+1 values covers every server and one idle slot
  // per period for every group.
  return static_cast<int>(((t - 1) % (k + 1) + rel) % (k + 1));
}

void run_hdebo_exploration(EstimatorState& est, const Environment& env,
                           const HeteroParams& params, long long t1, Rng& rng) {
  const int n = env.num_users();
  std::vector<int> choices(n, 0);
  for (long long t = 1; t <= t1; ++t) {
    for (int i = 0; i < n; ++i) {
      const int g = group_of_user(i + 1, params.m_bar_min);
      choices[i] = explore_target(t, g, env.num_servers(), params.n_groups);
    }
    const auto outcomes = env.step_heterogeneous(choices, rng);
    for (int i = 0; i < n; ++i) {
      if (outcomes[i].processed) est.record(i, choices[i] - 1, outcomes[i].observed_reward);
    }
  }
}

Assignment run_hdebo_matching(const Matrix& estimates, const std::vector<double>& demands,
                              const std::vector<double>& capacities) {
  return solve_gap_2approx(estimates, demands, capacities).assignment;
}

RunTrace run_hdebo(const Environment& env, long long horizon, const HDeboOptions& options,
                   Rng& rng, std::ostream* slot_sink) {
  const auto demands = env.demands();
  const auto capacities = env.resource_capacities();
  HeteroParams params = HeteroParams::from_instance(demands, capacities, env.num_users());
  GapSummary gaps = compute_user_gaps(env.mu());
  const double delta_prime =
      options.delta_prime_override ? *options.delta_prime_override : gaps.delta_prime_min;
  params.t1 = hetero_exploration_length(delta_prime, params.m_bar_max, env.num_servers(), env.num_users(),
                          params.n_groups, env.reward_model().reward_upper,
                          env.reward_model().reward_lower, options.t1_cap);

  const int n = env.num_users();
  const int k = env.num_servers();
  TraceBuilder trace(n, horizon, {}, slot_sink);
  EstimatorState est(n, k);
  long long slot = 0;

  auto play_slot = [&](const std::vector<int>& choices, int epoch, Phase phase,
                       bool feed_estimator) {
    const auto outcomes = env.step_heterogeneous(choices, rng);
    std::vector<SlotUser> detail(n);
    for (int i = 0; i < n; ++i) {
      detail[i].server = choices[i];
      detail[i].processed = outcomes[i].processed;
      detail[i].sampled = outcomes[i].observed_reward;
      detail[i].expected = outcomes[i].processed ? env.mu()(i, choices[i] - 1) : 0.0;
      if (feed_estimator && outcomes[i].processed) {
        est.record(i, choices[i] - 1, outcomes[i].observed_reward);
      }
    }
    trace.record_slot(epoch, phase, detail);
    ++slot;
  };

  std::vector<int> choices(n, 0);
  for (int epoch = 1; slot < horizon; ++epoch) {
    EpochSummary summary;
    summary.n = epoch;
    summary.start_slot = slot + 1;

    // Exploration: round-robin group offloading.
    const long long before_explore = slot;
    for (long long t = 1; t <= params.t1 && slot < horizon; ++t) {
      for (int i = 0; i < n; ++i) {
        const int g = group_of_user(i + 1, params.m_bar_min);
        choices[i] = explore_target(t, g, k, params.n_groups);
      }
      play_slot(choices, epoch, Phase::explore, /*feed_estimator=*/true);
    }
    summary.explore_slots = slot - before_explore;

    // Matching: K slots, one per server's knapsack round. Users keep
    // offloading to their current indicator while it converges.
    const Matrix values = est.estimates(env.reward_model().reward_lower, &summary.estimate_holes);
    Assignment indicator(n, 0);
    const long long before_match = slot;
    for (int j = 0; j < k && slot < horizon; ++j) {
      std::vector<double> inc(n);
      for (int i = 0; i < n; ++i) {
        inc[i] = indicator[i] == 0 ? values(i, j) : values(i, j) - values(i, indicator[i] - 1);
      }
      const auto sub = solve_knapsack_exact(inc, demands, capacities[j]);
      summary.knapsack_nodes.push_back(sub.nodes_expanded);
      summary.knapsack_prunes.push_back(sub.bound_prunes);
      play_slot(indicator, epoch, Phase::match, /*feed_estimator=*/false);
      for (int i : sub.selected) indicator[i] = j + 1;
    }
    summary.match_slots = slot - before_match;
    summary.assignment = indicator;

    // Exploitation.
    const long long before_exploit = slot;
    const long long exploit_len = 1LL << std::min(epoch, 62);
    for (long long s = 0; s < exploit_len && slot < horizon; ++s) {
      play_slot(indicator, epoch, Phase::exploit, /*feed_estimator=*/false);
    }
    summary.exploit_slots = slot - before_exploit;
    trace.add_epoch(std::move(summary));
  }
  return trace.finish();
}

}  // namespace offload

#include "offload/debo.hpp"

#include <algorithm>
#include <cmath>

namespace offload {

EpochParams gap_aware_params(const GapSummary& gaps, int num_users, int total_capacity,
                            int min_capacity, int num_servers, double reward_upper,
                            double reward_lower, std::optional<long long> t1_cap) {
  const double n = num_users, m = total_capacity, m_min = min_capacity, k = num_servers;
  const double delta = gaps.delta_min;
  const double delta_user = gaps.delta_user_min;
  const double range = reward_upper - reward_lower;

  EpochParams p;
  p.epsilon = std::max(delta / (5 * n), delta_user / k - 3 * delta / (4 * n * k));
  const double t1a = std::ceil(128 * n * n * m * range * range / (9 * delta * delta * m_min));
  const double t1b = std::ceil(81 * m * m / (2 * m_min * m_min));
  p.t1 = static_cast<long long>(std::max(t1a, t1b));
  if (t1_cap) p.t1 = std::min(p.t1, *t1_cap);
  p.t1 = std::max(p.t1, 1LL);
  p.t2 = static_cast<long long>(std::ceil(n * m + n * m * reward_upper / p.epsilon));
  return p;
}

void run_ro_slot(const Environment& env, const UnitMap& units, EstimatorState& est, Rng& rng,
                 std::vector<SlotUser>* detail) {
  const int n = env.num_users();
  const int m = units.total_units();
  std::vector<int> draw(n);
  for (int i = 0; i < n; ++i) draw[i] = rng.uniform_int(1, m);

  std::vector<char> processed(n, 0);
  // Per server: admit everyone when within capacity, otherwise one task per
  // contested unit.
  for (int j = 1; j <= units.num_servers(); ++j) {
    auto [lo, hi] = units.unit_range(j);
    std::vector<int> here;
    for (int i = 0; i < n; ++i) {
      if (draw[i] >= lo && draw[i] <= hi) here.push_back(i);
    }
    if (static_cast<int>(here.size()) <= hi - lo + 1) {
      for (int i : here) processed[i] = 1;
      continue;
    }
    for (int unit = lo; unit <= hi; ++unit) {
      std::vector<int> claimants;
      for (int i : here) {
        if (draw[i] == unit) claimants.push_back(i);
      }
      if (claimants.empty()) continue;
      const int pick = claimants.size() == 1
                           ? claimants[0]
                           : claimants[rng.uniform_int(0, static_cast<int>(claimants.size()) - 1)];
      processed[pick] = 1;
    }
  }

  if (detail) detail->assign(n, {});
  for (int i = 0; i < n; ++i) {
    const int server = units.server_of(draw[i]);
    if (detail) (*detail)[i].server = server;
    if (!processed[i]) continue;
    const double r = env.sample_reward(i, server - 1, rng);
    est.record(i, server - 1, r);
    if (detail) {
      (*detail)[i].processed = true;
      (*detail)[i].sampled = r;
      (*detail)[i].expected = env.mu()(i, server - 1);
    }
  }
}

EstimatorState run_ro(EstimatorState est, const Environment& env, long long t1, Rng& rng) {
  UnitMap units(env.task_capacities());
  for (long long t = 0; t < t1; ++t) run_ro_slot(env, units, est, rng);
  return est;
}

DAuctionResult run_dauction(const Matrix& values, const std::vector<int>& capacities,
                            long long t2, double epsilon) {
  DAuction auction(values, capacities, epsilon);
  while (!auction.all_assigned() && auction.rounds_used() < t2) auction.round();
  return {auction.server_assignment(), !auction.all_assigned(), auction.rounds_used()};
}

EpochEngine::EpochEngine(const Environment& env, long long horizon, TraceBuilder& trace,
                         Rng& rng)
    : env_(&env), units_(env.task_capacities()), horizon_(horizon), trace_(&trace), rng_(&rng) {
  trace_columns_.resize(env.num_users());
  for (int i = 0; i < env.num_users(); ++i) trace_columns_[i] = i;
}

void EpochEngine::set_environment(const Environment& env, std::vector<int> trace_columns) {
  env_ = &env;
  units_ = UnitMap(env.task_capacities());
  trace_columns_ = std::move(trace_columns);
}

// Trace columns cover the full roster; users absent this epoch stay idle.
void EpochEngine::record(int epoch, Phase phase, const std::vector<int>& choices,
                         const std::vector<SlotOutcome>& outcomes) {
  std::vector<SlotUser> full(trace_->num_users());
  for (size_t r = 0; r < outcomes.size(); ++r) {
    SlotUser& u = full[trace_columns_[r]];
    u.server = choices[r];
    u.processed = outcomes[r].processed;
    u.sampled = outcomes[r].observed_reward;
    u.expected = outcomes[r].processed ? env_->mu()(static_cast<int>(r), choices[r] - 1) : 0.0;
  }
  trace_->record_slot(epoch, phase, full);
  ++slot_;
}

void EpochEngine::explore(long long t1, EstimatorState& est, int epoch) {
  std::vector<SlotUser> detail;
  for (long long s = 0; s < t1 && !horizon_reached(); ++s) {
    run_ro_slot(*env_, units_, est, *rng_, &detail);
    std::vector<SlotUser> full(trace_->num_users());
    for (size_t r = 0; r < detail.size(); ++r) full[trace_columns_[r]] = detail[r];
    trace_->record_slot(epoch, Phase::explore, full);
    ++slot_;
  }
}

DAuctionResult EpochEngine::match(const Matrix& values, long long t2, double epsilon,
                                  int epoch) {
  DAuction auction(values, env_->task_capacities(), epsilon);
  while (!auction.all_assigned() && auction.rounds_used() < t2 && !horizon_reached()) {
    const std::vector<int> holders_before = auction.held_units();
    auction.round();
    const auto& holders_after = auction.held_units();
    const auto& bid_units = auction.last_bid_units();

    std::vector<SlotUser> full(trace_->num_users());
    const int n = env_->num_users();
    for (int i = 0; i < n; ++i) {
      SlotUser& u = full[trace_columns_[i]];
      const int offloaded_unit = holders_before[i] != 0 ? holders_before[i] : bid_units[i];
      u.server = offloaded_unit != 0 ? units_.server_of(offloaded_unit) : 0;
      if (holders_after[i] != 0) {
        u.processed = true;
        const int j = units_.server_of(holders_after[i]) - 1;
        u.sampled = env_->sample_reward(i, j, *rng_);
        u.expected = env_->mu()(i, j);
      }
    }
    trace_->record_slot(epoch, Phase::match, full);
    ++slot_;
  }
  return {auction.server_assignment(), !auction.all_assigned(), auction.rounds_used()};
}

void EpochEngine::exploit(const Assignment& assignment, long long slots, int epoch) {
  for (long long s = 0; s < slots && !horizon_reached(); ++s) {
    const auto outcomes = env_->step(assignment, *rng_);
    record(epoch, Phase::exploit, assignment, outcomes);
  }
}

RunTrace run_debo(const Environment& env, long long horizon, const EpochParams& params,
                  Rng& rng, std::ostream* slot_sink) {
  TraceBuilder trace(env.num_users(), horizon, {}, slot_sink);
  EpochEngine engine(env, horizon, trace, rng);
  EstimatorState est(env.num_users(), env.num_servers());

  for (int n = 1; !engine.horizon_reached(); ++n) {
    EpochSummary summary;
    summary.n = n;
    summary.start_slot = engine.slot() + 1;

    const long long before_explore = engine.slot();
    engine.explore(params.t1, est, n);
    summary.explore_slots = engine.slot() - before_explore;

    const Matrix values = est.estimates(env.reward_model().reward_lower, &summary.estimate_holes);
    const long long before_match = engine.slot();
    const DAuctionResult matched = engine.match(values, params.t2, params.epsilon, n);
    summary.match_slots = engine.slot() - before_match;
    summary.assignment = matched.assignment;
    summary.budget_exhausted = matched.budget_exhausted;

    const long long before_exploit = engine.slot();
    engine.exploit(matched.assignment, 1LL << std::min(n, 62), n);
    summary.exploit_slots = engine.slot() - before_exploit;
    trace.add_epoch(std::move(summary));
  }
  return trace.finish();
}

}  // namespace offload

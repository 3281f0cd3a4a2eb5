#include "offload/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace offload {

EpochParams udebo_schedule(int epoch, const UDeboSchedule& sched, int num_users,
                           int total_capacity, double reward_upper) {
  EpochParams p;
  p.epsilon = sched.c0 * std::pow(epoch, -sched.vartheta);
  p.t1 = static_cast<long long>(std::ceil(sched.c1 * std::pow(epoch, sched.vartheta)));
  p.t1 = std::max(p.t1, 1LL);
  const double nm = static_cast<double>(num_users) * total_capacity;
  p.t2 = static_cast<long long>(std::ceil(nm + nm * reward_upper / p.epsilon));
  return p;
}

RunTrace run_udebo(const Environment& env, long long horizon, const UDeboSchedule& sched,
                   Rng& rng, std::ostream* slot_sink) {
  if (!(sched.c0 > 0) || sched.c1 < 1 || !(sched.vartheta > 0) || !(sched.vartheta < 1)) {
    throw ConfigError("udebo: need c0 > 0, c1 >= 1, vartheta in (0,1)");
  }
  TraceBuilder trace(env.num_users(), horizon, {}, slot_sink);
  EpochEngine engine(env, horizon, trace, rng);
  EstimatorState est(env.num_users(), env.num_servers());

  for (int n = 1; !engine.horizon_reached(); ++n) {
    const EpochParams params =
        udebo_schedule(n, sched, env.num_users(), env.total_task_capacity(),
                       env.reward_model().reward_upper);
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

namespace {

struct Roster {
  std::vector<UserProfile> profiles;  // active users in stable order
  std::vector<int> trace_columns;     // per active user, its trace column
};

// Dry-runs the whole event list so a bad event fails at load, not mid-run.
void validate_events(const Environment& env, long long horizon,
                     const std::vector<PopulationEvent>& events, double zeta) {
  const long long max_enter_epoch =
      static_cast<long long>(std::ceil(zeta * std::log2(static_cast<double>(horizon))));
  std::set<int> ids;
  for (const auto& u : env.users()) {
    if (!ids.insert(u.id).second) throw ConfigError("ddebo: duplicate user id in roster");
  }
  int population = env.num_users();
  std::vector<PopulationEvent> ordered = events;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const PopulationEvent& a, const PopulationEvent& b) {
                     return a.epoch < b.epoch;
                   });
  for (const auto& e : ordered) {
    if (e.epoch < 1) throw ConfigError("ddebo: event epoch must be >= 1");
    if (e.kind == PopulationEvent::Kind::enter) {
      if (!e.user) throw ConfigError("ddebo: enter event without user profile");
      if (e.epoch > max_enter_epoch) {
        throw ConfigError("ddebo: enter event at epoch " + std::to_string(e.epoch) +
                          " exceeds the zeta * log2(T) = " + std::to_string(max_enter_epoch) +
                          " admission rule");
      }
      if (!ids.insert(e.user->id).second) {
        throw ConfigError("ddebo: duplicate user id " + std::to_string(e.user->id));
      }
      if (++population > env.total_task_capacity()) {
        throw ConfigError("ddebo: enter event at epoch " + std::to_string(e.epoch) +
                          " exceeds total task capacity");
      }
    } else {
      if (ids.erase(e.user_id) == 0) {
        throw ConfigError("ddebo: leave event for unknown user id " +
                          std::to_string(e.user_id));
      }
      --population;
    }
  }
}

}  // namespace

RunTrace run_ddebo(const Environment& env, long long horizon,
                   const std::vector<PopulationEvent>& events, const DDeboOptions& options,
                   Rng& rng, std::ostream* slot_sink) {
  validate_events(env, horizon, events, options.zeta);

  int total_columns = env.num_users();
  for (const auto& e : events) {
    if (e.kind == PopulationEvent::Kind::enter) ++total_columns;
  }

  Roster roster;
  roster.profiles = env.users();
  roster.trace_columns.resize(env.num_users());
  for (int i = 0; i < env.num_users(); ++i) roster.trace_columns[i] = i;
  int next_column = env.num_users();

  const RewardModel& model = env.reward_model();
  TraceBuilder trace(total_columns, horizon, {}, slot_sink);
  EpochEngine engine(env, horizon, trace, rng);

  // Active environment lives here when the roster diverges from the initial
  // one; gaps are cached per roster since enumeration is not cheap.
  std::optional<Environment> active_env;
  std::map<std::vector<int>, GapSummary> gap_cache;
  EstimatorState est(env.num_users(), env.num_servers());

  auto active_ids = [&] {
    std::vector<int> ids;
    for (const auto& u : roster.profiles) ids.push_back(u.id);
    return ids;
  };

  for (int n = 1; !engine.horizon_reached(); ++n) {
    bool changed = false;
    std::vector<int> src_rows(roster.profiles.size());
    for (size_t r = 0; r < src_rows.size(); ++r) src_rows[r] = static_cast<int>(r);
    for (const auto& e : events) {
      if (e.epoch != n) continue;
      if (e.kind == PopulationEvent::Kind::enter) {
        roster.profiles.push_back(*e.user);
        roster.trace_columns.push_back(next_column++);
        src_rows.push_back(-1);  // entrant starts with an empty estimator row
        changed = true;
      } else {
        const auto it = std::find_if(roster.profiles.begin(), roster.profiles.end(),
                                     [&](const UserProfile& u) { return u.id == e.user_id; });
        if (it == roster.profiles.end()) {
          throw ConfigError("ddebo: leave event for unknown user id " +
                            std::to_string(e.user_id));
        }
        const auto pos = it - roster.profiles.begin();
        roster.profiles.erase(it);
        roster.trace_columns.erase(roster.trace_columns.begin() + pos);
        src_rows.erase(src_rows.begin() + pos);
        changed = true;
      }
    }
    if (changed) {
      if (static_cast<int>(roster.profiles.size()) > env.total_task_capacity()) {
        throw ConfigError("ddebo: event leaves more users than task slots");
      }
      active_env = Environment::from_profiles(roster.profiles, env.servers(),
                                              model.noise_half_width, model.reward_lower,
                                              model.reward_upper, env.capacity_model());
      engine.set_environment(*active_env, roster.trace_columns);
      est = EstimatorState::remap(est, src_rows);
    }

    const Environment& cur = active_env ? *active_env : env;
    GapSummary gaps;
    const auto key = active_ids();
    if (auto it = gap_cache.find(key); it != gap_cache.end()) {
      gaps = it->second;
    } else {
      gaps = compute_gaps(cur.mu(), cur.task_capacities());
      if (options.delta_min_override) gaps.delta_min = *options.delta_min_override;
      gap_cache.emplace(key, gaps);
    }
    const std::vector<int> capacities = cur.task_capacities();
    const EpochParams params = gap_aware_params(
        gaps, cur.num_users(), cur.total_task_capacity(),
        *std::min_element(capacities.begin(), capacities.end()), cur.num_servers(),
        cur.reward_model().reward_upper, cur.reward_model().reward_lower, options.t1_cap);

    EpochSummary summary;
    summary.n = n;
    summary.start_slot = engine.slot() + 1;

    const long long before_explore = engine.slot();
    engine.explore(params.t1, est, n);
    summary.explore_slots = engine.slot() - before_explore;

    const Matrix values = est.estimates(model.reward_lower, &summary.estimate_holes);
    const long long before_match = engine.slot();
    const DAuctionResult matched = engine.match(values, params.t2, params.epsilon, n);
    summary.match_slots = engine.slot() - before_match;
    // Record the assignment on trace columns so epochs stay comparable.
    summary.assignment.assign(total_columns, 0);
    for (size_t r = 0; r < matched.assignment.size(); ++r) {
      summary.assignment[roster.trace_columns[r]] = matched.assignment[r];
    }
    summary.budget_exhausted = matched.budget_exhausted;

    const long long before_exploit = engine.slot();
    engine.exploit(matched.assignment, 1LL << std::min(n, 62), n);
    summary.exploit_slots = engine.slot() - before_exploit;
    trace.add_epoch(std::move(summary));
  }
  return trace.finish();
}

Matrix fairness_transform(const Matrix& values, double beta) {
  Matrix out(values.rows(), values.cols());
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) out(i, j) = std::log1p(beta * values(i, j));
  }
  return out;
}

EpochParams fair_gap_params(const GapSummary& fair_gaps, int num_users, int total_capacity,
                            int min_capacity, int num_servers, double reward_upper,
                            double reward_lower, double beta, std::optional<long long> t1_cap) {
  const double n = num_users, m = total_capacity, m_min = min_capacity, k = num_servers;
  const double delta_f = fair_gaps.delta_min;
  const double delta_user_f = fair_gaps.delta_user_min;
  const double range = reward_upper - reward_lower;
  const double log_floor = 1 + beta * reward_lower;

  EpochParams p;
  p.epsilon = std::max(delta_f / (5 * n), delta_user_f / k - 3 * delta_f / (4 * n * k));
  const double t1a = std::ceil(2048 * n * n * m * range * range * beta * beta /
                               (81 * delta_f * delta_f * m_min * log_floor * log_floor));
  const double t1b =
      std::ceil(8 * m * range * range * beta * beta / (m_min * log_floor * log_floor));
  const double t1c = std::ceil(81 * m * m / (2 * m_min * m_min));
  p.t1 = static_cast<long long>(std::max({t1a, t1b, t1c}));
  if (t1_cap) p.t1 = std::min(p.t1, *t1_cap);
  p.t1 = std::max(p.t1, 1LL);
  p.t2 = static_cast<long long>(
      std::ceil(n * m + n * m * std::log1p(beta * reward_upper) / p.epsilon));
  return p;
}

RunTrace run_fdebo(const Environment& env, long long horizon, double beta,
                   const EpochParams& params, Rng& rng, std::ostream* slot_sink) {
  if (!(beta > 0)) throw ConfigError("fdebo: beta must be positive");
  TraceBuilder trace(env.num_users(), horizon, beta, slot_sink);
  EpochEngine engine(env, horizon, trace, rng);
  EstimatorState est(env.num_users(), env.num_servers());

  for (int n = 1; !engine.horizon_reached(); ++n) {
    EpochSummary summary;
    summary.n = n;
    summary.start_slot = engine.slot() + 1;

    const long long before_explore = engine.slot();
    engine.explore(params.t1, est, n);
    summary.explore_slots = engine.slot() - before_explore;

    const Matrix values = fairness_transform(
        est.estimates(env.reward_model().reward_lower, &summary.estimate_holes), beta);
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

#include "offload/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace offload {

namespace {

// Shared per-slot bookkeeping for the independent-learner baselines.
class Playback {
 public:
  Playback(const Environment& env, long long horizon, Rng& rng, std::ostream* sink)
      : env_(env), rng_(rng), trace_(env.num_users(), horizon, {}, sink) {}

  const std::vector<SlotOutcome>& play(const std::vector<int>& choices, int epoch = 0) {
    outcomes_ = env_.step(choices, rng_);
    detail_.assign(env_.num_users(), {});
    for (int i = 0; i < env_.num_users(); ++i) {
      detail_[i].server = choices[i];
      detail_[i].processed = outcomes_[i].processed;
      detail_[i].sampled = outcomes_[i].observed_reward;
      detail_[i].expected = outcomes_[i].processed ? env_.mu()(i, choices[i] - 1) : 0.0;
    }
    trace_.record_slot(epoch, Phase::play, detail_);
    return outcomes_;
  }

  long long slot() const { return trace_.slots_recorded(); }
  RunTrace finish() { return trace_.finish(); }
  TraceBuilder& trace() { return trace_; }

 private:
  const Environment& env_;
  Rng& rng_;
  TraceBuilder trace_;
  std::vector<SlotOutcome> outcomes_;
  std::vector<SlotUser> detail_;
};

}  // namespace

RunTrace run_mucb(const Environment& env, long long horizon, Rng& rng,
                  std::ostream* slot_sink) {
  const int n = env.num_users();
  const int k = env.num_servers();
  // UCB1 assumes rewards in [0,1]; observations live in [0, r_hi], so the
  // confidence radius carries the range.
  const double scale = env.reward_model().reward_upper;
  Playback playback(env, horizon, rng, slot_sink);
  Matrix counts(n, k, 0.0);
  Matrix means(n, k, 0.0);
  std::vector<int> choices(n);

  for (long long t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      int pick = -1;
      // Play each arm once first.
      for (int j = 0; j < k; ++j) {
        if (counts(i, j) == 0) {
          pick = j;
          break;
        }
      }
      if (pick < 0) {
        double best = -1;
        for (int j = 0; j < k; ++j) {
          const double ucb =
              means(i, j) +
              scale * std::sqrt(2.0 * std::log(static_cast<double>(t)) / counts(i, j));
          if (ucb > best) {
            best = ucb;
            pick = j;
          }
        }
      }
      choices[i] = pick + 1;
    }
    const auto& outcomes = playback.play(choices);
    for (int i = 0; i < n; ++i) {
      const int j = choices[i] - 1;
      const double r = outcomes[i].processed ? outcomes[i].observed_reward : 0.0;
      counts(i, j) += 1;
      means(i, j) += (r - means(i, j)) / counts(i, j);
    }
  }
  return playback.finish();
}

RunTrace run_mexp3(const Environment& env, long long horizon, double gamma, Rng& rng,
                   std::ostream* slot_sink) {
  if (!(gamma > 0) || gamma > 1) throw ConfigError("mexp3: gamma must lie in (0, 1]");
  const int n = env.num_users();
  const int k = env.num_servers();
  const double r_hi = env.reward_model().reward_upper;
  Playback playback(env, horizon, rng, slot_sink);
  Matrix weights(n, k, 1.0);
  std::vector<int> choices(n);
  std::vector<double> probs(k);
  std::vector<double> chosen_prob(n);

  for (long long t = 1; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      double sum = 0;
      for (int j = 0; j < k; ++j) sum += weights(i, j);
      for (int j = 0; j < k; ++j) probs[j] = (1 - gamma) * weights(i, j) / sum + gamma / k;
      double u = rng.uniform(0.0, 1.0);
      int pick = k - 1;
      for (int j = 0; j < k; ++j) {
        if (u < probs[j]) {
          pick = j;
          break;
        }
        u -= probs[j];
      }
      choices[i] = pick + 1;
      chosen_prob[i] = probs[pick];
    }
    const auto& outcomes = playback.play(choices);
    for (int i = 0; i < n; ++i) {
      const int j = choices[i] - 1;
      const double r = outcomes[i].processed ? outcomes[i].observed_reward : 0.0;
      const double xhat = (r / r_hi) / chosen_prob[i];
      weights(i, j) *= std::exp(gamma * xhat / k);
      // Renormalize so decades of updates cannot overflow; the sampling
      // distribution is scale-invariant.
      double w_max = 0;
      for (int jj = 0; jj < k; ++jj) w_max = std::max(w_max, weights(i, jj));
      if (w_max > 1e12) {
        for (int jj = 0; jj < k; ++jj) weights(i, jj) /= w_max;
      }
    }
  }
  return playback.finish();
}

RunTrace run_dmnon0(const Environment& env, long long horizon, long long explore_len, Rng& rng,
                    std::ostream* slot_sink) {
  const int n = env.num_users();
  const int k = env.num_servers();
  const double r_lo = env.reward_model().reward_lower;
  Playback playback(env, horizon, rng, slot_sink);
  // Reward means come from every successful observation; the admission rate
  // is measured on commit phases only, where it reflects the co-selection
  // load the commitment would actually face (exploration runs under an
  // artificial uniform load).
  Matrix success_count(n, k, 0.0);
  Matrix reward_sum(n, k, 0.0);
  Matrix commit_attempts(n, k, 0.0);
  Matrix commit_admits(n, k, 0.0);
  std::vector<int> choices(n);

  auto update = [&](const std::vector<SlotOutcome>& outcomes, bool commit_phase) {
    for (int i = 0; i < n; ++i) {
      const int j = choices[i] - 1;
      if (commit_phase) commit_attempts(i, j) += 1;
      if (outcomes[i].processed) {
        success_count(i, j) += 1;
        reward_sum(i, j) += outcomes[i].observed_reward;
        if (commit_phase) commit_admits(i, j) += 1;
      }
    }
  };

  for (int epoch = 1; playback.slot() < horizon; ++epoch) {
    for (long long s = 0; s < explore_len && playback.slot() < horizon; ++s) {
      for (int i = 0; i < n; ++i) choices[i] = rng.uniform_int(1, k);
      update(playback.play(choices, epoch), /*commit_phase=*/false);
    }
    // Commit to the admission-discounted best estimate.
    std::vector<int> committed(n);
    for (int i = 0; i < n; ++i) {
      int best_j = 0;
      double best_v = -1;
      for (int j = 0; j < k; ++j) {
        const double mean = success_count(i, j) > 0 ? reward_sum(i, j) / success_count(i, j)
                                                    : r_lo;
        const double admit_rate =
            commit_attempts(i, j) > 0 ? commit_admits(i, j) / commit_attempts(i, j) : 1.0;
        const double v = mean * admit_rate;
        if (v > best_v) {
          best_v = v;
          best_j = j;
        }
      }
      committed[i] = best_j + 1;
    }
    const long long commit_len = 1LL << std::min(epoch, 62);
    choices = committed;
    for (long long s = 0; s < commit_len && playback.slot() < horizon; ++s) {
      update(playback.play(choices, epoch), /*commit_phase=*/true);
    }
  }
  return playback.finish();
}

}  // namespace offload

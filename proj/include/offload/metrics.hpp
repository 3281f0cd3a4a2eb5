#pragma once

#include <vector>

#include "offload/trace.hpp"

namespace offload {

enum class RegretKind {
  homogeneous,    // t * OPT - cumulative expected reward
  heterogeneous,  // (t/2) * OPT - cumulative expected reward (may go negative)
  fairness,       // t * fair-OPT - cumulative log-utility
};

// Per-slot regret series against the precomputed oracle per-slot value.
// The realized term uses expected rewards of processed tasks, not the noisy
// draws; those are logged separately.
std::vector<double> compute_regret(const RunTrace& trace, double oracle_value_per_slot,
                                   RegretKind kind);

// Metric values at one checkpoint slot.
struct CheckpointRow {
  long long t = 0;
  double cum_expected = 0;
  double cum_sampled = 0;
  double time_avg_reward = 0;
  double reward_ratio = 0;   // time-average over the oracle per-slot optimum
  double regret = 0;
  double fair_regret = 0;    // fairness runs only, else 0
  double max_user_gap = 0;   // spread of per-user time-average rewards
};

struct MetricsSummary {
  std::vector<CheckpointRow> rows;
  double final_time_avg = 0;
  double final_ratio = 0;
  double final_max_user_gap = 0;
};

// Checkpointed metrics. `oracle_value` is the full offline optimum per slot;
// `fair_oracle_value` the per-slot fair optimum (0 when not a fairness run).
MetricsSummary summarize_metrics(const RunTrace& trace, double oracle_value, RegretKind kind,
                                 double fair_oracle_value = 0);

}  // namespace offload

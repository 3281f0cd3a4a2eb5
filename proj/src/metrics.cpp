#include "offload/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace offload {

std::vector<double> compute_regret(const RunTrace& trace, double oracle_value_per_slot,
                                   RegretKind kind) {
  const std::vector<double>* realized = &trace.slot_expected;
  double factor = 1.0;
  switch (kind) {
    case RegretKind::homogeneous:
      break;
    case RegretKind::heterogeneous:
      factor = 0.5;
      break;
    case RegretKind::fairness:
      if (!trace.fairness_beta) {
        throw SimulationError("compute_regret: fairness kind on a non-fairness trace");
      }
      realized = &trace.slot_fair;
      break;
  }
  std::vector<double> regret(realized->size());
  double cum = 0;
  for (size_t t = 0; t < realized->size(); ++t) {
    cum += (*realized)[t];
    regret[t] = static_cast<double>(t + 1) * factor * oracle_value_per_slot - cum;
  }
  return regret;
}

MetricsSummary summarize_metrics(const RunTrace& trace, double oracle_value, RegretKind kind,
                                 double fair_oracle_value) {
  MetricsSummary out;
  const double factor = kind == RegretKind::heterogeneous ? 0.5 : 1.0;

  double cum_expected = 0, cum_sampled = 0, cum_fair = 0;
  size_t next_cp = 0;
  for (long long t = 1; t <= trace.slots(); ++t) {
    cum_expected += trace.slot_expected[t - 1];
    cum_sampled += trace.slot_sampled[t - 1];
    if (trace.fairness_beta) cum_fair += trace.slot_fair[t - 1];
    if (next_cp < trace.checkpoints.size() && t == trace.checkpoints[next_cp]) {
      CheckpointRow row;
      row.t = t;
      row.cum_expected = cum_expected;
      row.cum_sampled = cum_sampled;
      row.time_avg_reward = cum_expected / static_cast<double>(t);
      row.reward_ratio = oracle_value > 0 ? row.time_avg_reward / oracle_value : 0;
      row.regret = kind == RegretKind::fairness
                       ? static_cast<double>(t) * fair_oracle_value - cum_fair
                       : static_cast<double>(t) * factor * oracle_value - cum_expected;
      if (trace.fairness_beta) {
        row.fair_regret = static_cast<double>(t) * fair_oracle_value - cum_fair;
      }
      const auto& per_user = trace.user_expected_at_checkpoint[next_cp];
      double lo = per_user.empty() ? 0 : per_user[0], hi = lo;
      for (double v : per_user) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      row.max_user_gap = (hi - lo) / static_cast<double>(t);
      out.rows.push_back(row);
      ++next_cp;
    }
  }
  if (!out.rows.empty()) {
    out.final_time_avg = out.rows.back().time_avg_reward;
    out.final_ratio = out.rows.back().reward_ratio;
    out.final_max_user_gap = out.rows.back().max_user_gap;
  }
  return out;
}

}  // namespace offload

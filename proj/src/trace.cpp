#include "offload/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace offload {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::explore: return "explore";
    case Phase::match: return "match";
    case Phase::exploit: return "exploit";
    case Phase::play: return "play";
  }
  return "?";
}

double RunTrace::total_expected() const {
  double t = 0;
  for (double v : slot_expected) t += v;
  return t;
}

double RunTrace::total_sampled() const {
  double t = 0;
  for (double v : slot_sampled) t += v;
  return t;
}

double RunTrace::max_user_gap() const {
  if (user_expected_total.empty() || slots() == 0) return 0;
  const auto [lo, hi] =
      std::minmax_element(user_expected_total.begin(), user_expected_total.end());
  return (*hi - *lo) / static_cast<double>(slots());
}

const EpochSummary* RunTrace::last_exploited_epoch() const {
  for (auto it = epochs.rbegin(); it != epochs.rend(); ++it) {
    if (it->exploit_slots > 0) return &*it;
  }
  return nullptr;
}

std::vector<long long> checkpoint_slots(long long horizon) {
  std::vector<long long> cps;
  for (long long t = 1; t <= horizon; t *= 2) cps.push_back(t);
  if (cps.empty() || cps.back() != horizon) cps.push_back(horizon);
  return cps;
}

TraceBuilder::TraceBuilder(int num_users, long long horizon,
                           std::optional<double> fairness_beta, std::ostream* slot_sink)
    : sink_(slot_sink) {
  trace_.num_users = num_users;
  trace_.horizon = horizon;
  trace_.fairness_beta = fairness_beta;
  trace_.slot_expected.reserve(horizon);
  trace_.slot_sampled.reserve(horizon);
  if (fairness_beta) trace_.slot_fair.reserve(horizon);
  trace_.user_expected_total.assign(num_users, 0.0);
  trace_.user_sampled_total.assign(num_users, 0.0);
  trace_.checkpoints = checkpoint_slots(horizon);
  if (sink_) {
    *sink_ << "t,epoch,phase";
    for (int i = 1; i <= num_users; ++i) *sink_ << ",server_" << i;
    for (int i = 1; i <= num_users; ++i) *sink_ << ",reward_" << i;
    *sink_ << "\n";
  }
}

void TraceBuilder::record_slot(int epoch, Phase phase, const std::vector<SlotUser>& users) {
  double expected = 0, sampled = 0, fair = 0;
  for (size_t i = 0; i < users.size(); ++i) {
    expected += users[i].expected;
    sampled += users[i].sampled;
    trace_.user_expected_total[i] += users[i].expected;
    trace_.user_sampled_total[i] += users[i].sampled;
    if (trace_.fairness_beta && users[i].processed) {
      fair += std::log1p(*trace_.fairness_beta * users[i].expected);
    }
  }
  trace_.slot_expected.push_back(expected);
  trace_.slot_sampled.push_back(sampled);
  if (trace_.fairness_beta) trace_.slot_fair.push_back(fair);

  const long long t = trace_.slots();
  if (next_checkpoint_ < trace_.checkpoints.size() &&
      t == trace_.checkpoints[next_checkpoint_]) {
    trace_.user_expected_at_checkpoint.push_back(trace_.user_expected_total);
    ++next_checkpoint_;
  }

  if (sink_) {
    *sink_ << t << ',' << epoch << ',' << phase_name(phase);
    for (const auto& u : users) *sink_ << ',' << u.server;
    char buf[32];
    for (const auto& u : users) {
      std::snprintf(buf, sizeof buf, "%.10g", u.sampled);
      *sink_ << ',' << buf;
    }
    *sink_ << '\n';
  }
}

void TraceBuilder::add_epoch(EpochSummary summary) {
  trace_.any_budget_exhausted = trace_.any_budget_exhausted || summary.budget_exhausted;
  trace_.epochs.push_back(std::move(summary));
}

RunTrace TraceBuilder::finish() {
  // A run truncated before the last scheduled checkpoint still snapshots at
  // its true end.
  while (trace_.user_expected_at_checkpoint.size() < trace_.checkpoints.size() &&
         !trace_.checkpoints.empty()) {
    if (trace_.checkpoints[trace_.user_expected_at_checkpoint.size()] > trace_.slots()) {
      trace_.checkpoints.resize(trace_.user_expected_at_checkpoint.size());
      break;
    }
    trace_.user_expected_at_checkpoint.push_back(trace_.user_expected_total);
  }
  return std::move(trace_);
}

}  // namespace offload

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "offload/types.hpp"

namespace offload {

enum class Phase : std::uint8_t { explore, match, exploit, play };

const char* phase_name(Phase p);

// Per-epoch bookkeeping emitted alongside the per-slot series.
struct EpochSummary {
  int n = 0;
  long long start_slot = 0;     // 1-based slot where the epoch begins
  long long explore_slots = 0;
  long long match_slots = 0;
  long long exploit_slots = 0;
  Assignment assignment;        // matching result (0 = unassigned)
  bool budget_exhausted = false;  // some user unassigned after T2 rounds
  int estimate_holes = 0;         // entries forced to the reward floor
  std::vector<long long> knapsack_nodes;   // per-server solve stats (hdebo)
  std::vector<long long> knapsack_prunes;
};

// Compact per-run record: per-slot reward aggregates, per-user totals and
// checkpoint snapshots, and per-epoch summaries. Full per-slot per-user rows
// are streamed to an optional sink instead of being held in memory.
struct RunTrace {
  long long horizon = 0;
  int num_users = 0;
  std::optional<double> fairness_beta;

  std::vector<double> slot_expected;  // sum over processed users of mu
  std::vector<double> slot_sampled;   // sum of noisy observations
  std::vector<double> slot_fair;      // sum of ln(1 + beta mu), fairness runs only

  std::vector<double> user_expected_total;  // per-user sums over the run
  std::vector<double> user_sampled_total;

  std::vector<long long> checkpoints;
  std::vector<std::vector<double>> user_expected_at_checkpoint;

  std::vector<EpochSummary> epochs;
  bool any_budget_exhausted = false;

  long long slots() const { return static_cast<long long>(slot_expected.size()); }

  double total_expected() const;
  double total_sampled() const;
  // Largest minus smallest per-user time-average expected reward.
  double max_user_gap() const;

  // Last epoch whose assignment was actually exercised in exploitation; a
  // horizon can truncate the trailing epoch mid-exploration or mid-matching,
  // leaving its recorded assignment meaningless.
  const EpochSummary* last_exploited_epoch() const;
};

// Per-user slot detail handed to the trace by a runner. `server` 0 means
// idle; `expected` is mu of the processed pair and 0 otherwise.
struct SlotUser {
  int server = 0;
  bool processed = false;
  double sampled = 0;
  double expected = 0;
};

// Geometric checkpoint schedule 1, 2, 4, ..., plus the horizon itself.
std::vector<long long> checkpoint_slots(long long horizon);

class TraceBuilder {
 public:
  TraceBuilder(int num_users, long long horizon, std::optional<double> fairness_beta = {},
               std::ostream* slot_sink = nullptr);

  void record_slot(int epoch, Phase phase, const std::vector<SlotUser>& users);
  void add_epoch(EpochSummary summary);

  int num_users() const { return trace_.num_users; }
  long long slots_recorded() const { return trace_.slots(); }
  RunTrace finish();

 private:
  RunTrace trace_;
  std::ostream* sink_ = nullptr;
  size_t next_checkpoint_ = 0;
};

}  // namespace offload

#pragma once

#include <optional>
#include <ostream>

#include "offload/auction.hpp"
#include "offload/env.hpp"
#include "offload/estimator.hpp"
#include "offload/oracle.hpp"
#include "offload/trace.hpp"

namespace offload {

// Per-epoch control parameters: minimum bid increment, exploration length and
// matching round budget. The exploitation length is 2^n by construction.
struct EpochParams {
  double epsilon = 0;
  long long t1 = 0;
  long long t2 = 0;
};

// Gap-aware parameter choice; t1_cap truncates the exploration length when
// small gaps would make it impractically long.
EpochParams gap_aware_params(const GapSummary& gaps, int num_users, int total_capacity,
                            int min_capacity, int num_servers, double reward_upper,
                            double reward_lower, std::optional<long long> t1_cap = {});

// One random-offloading slot: every user draws a uniform resource unit and
// offloads to the owning server; an over-subscribed server keeps one task per
// contested unit. Successful observations update the estimator. `detail`,
// when given, receives the per-user slot record.
void run_ro_slot(const Environment& env, const UnitMap& units, EstimatorState& est, Rng& rng,
                 std::vector<SlotUser>* detail = nullptr);

// t1 slots of random offloading on top of the running estimator state.
EstimatorState run_ro(EstimatorState est, const Environment& env, long long t1, Rng& rng);

struct DAuctionResult {
  Assignment assignment;       // 0 where a user ended unassigned
  bool budget_exhausted = false;
  int rounds_used = 0;
};

// Pure matching: rounds of DAuction until all users hold a unit or the round
// budget runs out. Randomness-free; ties break deterministically.
DAuctionResult run_dauction(const Matrix& values, const std::vector<int>& capacities,
                            long long t2, double epsilon);

// Shared epoch executor: exploration / matching / exploitation phases that
// advance a slot counter, sample the environment and feed the trace. The
// environment (and the mapping of its rows onto trace columns) can be swapped
// between epochs for dynamic user populations.
class EpochEngine {
 public:
  EpochEngine(const Environment& env, long long horizon, TraceBuilder& trace, Rng& rng);

  void set_environment(const Environment& env, std::vector<int> trace_columns);

  bool horizon_reached() const { return slot_ >= horizon_; }
  long long slot() const { return slot_; }
  const Environment& env() const { return *env_; }

  void explore(long long t1, EstimatorState& est, int epoch);
  DAuctionResult match(const Matrix& values, long long t2, double epsilon, int epoch);
  void exploit(const Assignment& assignment, long long slots, int epoch);

 private:
  void record(int epoch, Phase phase, const std::vector<int>& choices,
              const std::vector<SlotOutcome>& outcomes);

  const Environment* env_;
  UnitMap units_;
  long long horizon_;
  TraceBuilder* trace_;
  Rng* rng_;
  std::vector<int> trace_columns_;  // local user row -> trace column
  long long slot_ = 0;
};

// Decentralized epoch based offloading: per epoch, t1 exploration slots, up
// to t2 matching slots, then 2^n exploitation slots, until the horizon.
RunTrace run_debo(const Environment& env, long long horizon, const EpochParams& params,
                  Rng& rng, std::ostream* slot_sink = nullptr);

}  // namespace offload

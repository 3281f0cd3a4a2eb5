#pragma once

#include <optional>
#include <ostream>

#include "offload/debo.hpp"

namespace offload {

// Gap-free per-epoch schedule: shrinking bid increments and growing
// exploration lengths, trading a log factor of regret for not knowing the
// reward gaps.
struct UDeboSchedule {
  double c0 = 0.5;       // scale of epsilon^(n)
  double c1 = 50;        // scale of t1^(n)
  double vartheta = 0.5; // exponent in (0,1)
};

EpochParams udebo_schedule(int epoch, const UDeboSchedule& sched, int num_users,
                           int total_capacity, double reward_upper);

RunTrace run_udebo(const Environment& env, long long horizon, const UDeboSchedule& sched,
                   Rng& rng, std::ostream* slot_sink = nullptr);

// User population change applied at the start of an epoch.
struct PopulationEvent {
  int epoch = 0;
  enum class Kind { enter, leave } kind = Kind::enter;
  std::optional<UserProfile> user;  // enter
  int user_id = 0;                  // leave
};

struct DDeboOptions {
  std::optional<long long> t1_cap;
  std::optional<double> delta_min_override;
  double zeta = 0.5;  // admissible last-enter epoch is ceil(zeta * log2 T)
};

// DEBO under dynamic user entering/leaving: events apply at epoch starts,
// every agent re-reads the published population size, and the gap-aware
// parameter formulas are re-evaluated with the active N. Entering users start with
// empty estimator rows; leavers' state is dropped. The environment must be
// profile-derived so entrants' reward rows can be built.
RunTrace run_ddebo(const Environment& env, long long horizon,
                   const std::vector<PopulationEvent>& events, const DDeboOptions& options,
                   Rng& rng, std::ostream* slot_sink = nullptr);

// Elementwise ln(1 + beta x).
Matrix fairness_transform(const Matrix& values, double beta);

// Parameter choice for the proportional-fairness objective; fair_gaps are the
// gaps of the transformed expected-reward matrix.
EpochParams fair_gap_params(const GapSummary& fair_gaps, int num_users, int total_capacity,
                            int min_capacity, int num_servers, double reward_upper,
                            double reward_lower, double beta,
                            std::optional<long long> t1_cap = {});

// DEBO with the auction run on ln(1 + beta r~); the trace carries the
// per-slot log-utility series for fairness-regret computation.
RunTrace run_fdebo(const Environment& env, long long horizon, double beta,
                   const EpochParams& params, Rng& rng, std::ostream* slot_sink = nullptr);

}  // namespace offload

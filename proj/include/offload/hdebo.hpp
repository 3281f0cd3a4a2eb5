#pragma once

#include <optional>
#include <ostream>

#include "offload/env.hpp"
#include "offload/estimator.hpp"
#include "offload/oracle.hpp"
#include "offload/trace.hpp"

namespace offload {

// Derived quantities of the heterogeneous instance: the conservative group
// size, the densest packing any server could hold, and the group count.
struct HeteroParams {
  int m_bar_min = 0;      // floor(min_j C_j / max_i c_i)
  double m_bar_max = 0;   // max_j C_j / min_i c_i
  int n_groups = 0;       // ceil(N / m_bar_min)
  long long t1 = 0;

  static HeteroParams from_instance(const std::vector<double>& demands,
                                    const std::vector<double>& capacities, int num_users);
};

// Exploration length from the heterogeneous gap parameter; the (K+N) branch
// applies when there are more groups than servers.
long long hetero_exploration_length(double delta_prime_min, double m_bar_max, int num_servers, int num_users,
                      int n_groups, double reward_upper, double reward_lower,
                      std::optional<long long> t1_cap = {});

// Round-robin group exploration target for slot t (1-based within the phase)
// and group k (1-based). Returns a server in 1..K, or 0 for an idle slot.
// Groups beyond K are folded into blocks of K that share the rotation.
int explore_target(long long t, int group, int num_servers, int n_groups);

// Group of a user by local 1-based index.
inline int group_of_user(int user_index_1based, int m_bar_min) {
  return (user_index_1based + m_bar_min - 1) / m_bar_min;
}

// t1 slots of round-robin group exploration; successful observations update
// the estimator.
void run_hdebo_exploration(EstimatorState& est, const Environment& env,
                           const HeteroParams& params, long long t1, Rng& rng);

// Matching on estimates: the sequential per-server exact knapsack over
// incremental rewards, as the offline 2-approximation but fed with r~.
Assignment run_hdebo_matching(const Matrix& estimates, const std::vector<double>& demands,
                              const std::vector<double>& capacities);

struct HDeboOptions {
  std::optional<long long> t1_cap;
  std::optional<double> delta_prime_override;
};

RunTrace run_hdebo(const Environment& env, long long horizon, const HDeboOptions& options,
                   Rng& rng, std::ostream* slot_sink = nullptr);

}  // namespace offload

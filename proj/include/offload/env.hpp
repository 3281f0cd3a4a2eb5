#pragma once

#include <vector>

#include "offload/rng.hpp"
#include "offload/types.hpp"

namespace offload {

// Simulated MEC system: delays, expected rewards, stochastic observations and
// capacity-limited task admission. Stateless between slots; all randomness
// comes from the caller's stream, so one instance can serve many replicas.
class Environment {
 public:
  Environment(std::vector<UserProfile> users, std::vector<ServerProfile> servers,
              RewardModel model, CapacityModel capacity_model);

  // Convenience constructor deriving mu from the profiles via the linear
  // preference function.
  static Environment from_profiles(std::vector<UserProfile> users,
                                   std::vector<ServerProfile> servers, double noise_half_width,
                                   double reward_lower, double reward_upper,
                                   CapacityModel capacity_model);

  int num_users() const { return static_cast<int>(users_.size()); }
  int num_servers() const { return static_cast<int>(servers_.size()); }
  CapacityModel capacity_model() const { return capacity_model_; }

  const std::vector<UserProfile>& users() const { return users_; }
  const std::vector<ServerProfile>& servers() const { return servers_; }
  const RewardModel& reward_model() const { return model_; }
  const Matrix& mu() const { return model_.mu; }

  std::vector<int> task_capacities() const;       // M_j
  std::vector<double> resource_capacities() const;  // C_j
  std::vector<double> demands() const;              // c_i
  int total_task_capacity() const;                  // M

  // One observation draw, uniform on [mu_ij - h, mu_ij + h]. i, j 0-based.
  double sample_reward(int i, int j, Rng& rng) const;

  // One slot under the maximum-task-service model: a server with more
  // arrivals than M_j processes a uniformly random size-M_j subset.
  std::vector<SlotOutcome> step_homogeneous(const std::vector<int>& choices, Rng& rng) const;

  // One slot under the endowed-resource model: arrivals are admitted in a
  // uniformly random order until the next task would exceed C_j.
  std::vector<SlotOutcome> step_heterogeneous(const std::vector<int>& choices, Rng& rng) const;

  // Dispatch on the configured capacity model.
  std::vector<SlotOutcome> step(const std::vector<int>& choices, Rng& rng) const;

  // Environment restricted to a subset of users (rows of mu follow the given
  // order). Used for dynamic user populations.
  Environment restricted_to(const std::vector<int>& user_indices) const;

 private:
  std::vector<UserProfile> users_;
  std::vector<ServerProfile> servers_;
  RewardModel model_;
  CapacityModel capacity_model_;
};

}  // namespace offload

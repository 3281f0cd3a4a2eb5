#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "offload/matrix.hpp"

namespace offload {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CapacityModel { homogeneous, heterogeneous };

// Static parameters of a mobile user's task. Sizes and rates are carried in
// base units (bits, cycles); config-level KB/Mbps/GHz are converted at load.
struct UserProfile {
  int id = 0;                       // 1-based
  double task_size_bits = 0;        // b_i
  double cycles_per_bit = 0;        // gamma_i
  double task_value = 0;            // v_i
  double latency_sensitivity = 0;   // rho_i, linear delay cost slope
  double resource_demand = 0;       // c_i, heterogeneous model only
};

struct ServerProfile {
  int id = 0;                        // 1-based
  double tx_rate_bits_per_s = 0;     // s_j
  double cpu_speed_cycles_per_s = 0; // f_j
  int task_capacity = 0;             // M_j, homogeneous model
  double resource_capacity = 0;      // C_j, heterogeneous model
};

// Transmission plus processing time of user i's task on server j.
inline double compute_delay(const UserProfile& u, const ServerProfile& s) {
  return u.task_size_bits / s.tx_rate_bits_per_s +
         u.task_size_bits * u.cycles_per_bit / s.cpu_speed_cycles_per_s;
}

// Delay-sensitive preference value v_i - rho_i * d_ij.
inline double expected_reward(const UserProfile& u, const ServerProfile& s) {
  return u.task_value - u.latency_sensitivity * compute_delay(u, s);
}

// Expected-reward matrix plus the bounded noise law for observations.
struct RewardModel {
  Matrix mu;                     // N x K expected rewards
  double noise_half_width = 0.3;
  double reward_lower = 0;       // global lower bound on observations
  double reward_upper = 0;       // global upper bound

  void validate() const {
    if (mu.rows() <= 0 || mu.cols() <= 0) throw ConfigError("reward model: empty matrix");
    if (noise_half_width < 0) throw ConfigError("reward model: negative noise half-width");
    if (reward_lower < 0) throw ConfigError("reward model: reward_lower must be non-negative");
    for (int i = 0; i < mu.rows(); ++i) {
      for (int j = 0; j < mu.cols(); ++j) {
        const double m = mu(i, j);
        if (!(m > 0)) {
          throw ConfigError("reward model: mu(" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ") = " + std::to_string(m) +
                            " is not positive");
        }
        if (m - noise_half_width < reward_lower - 1e-12 ||
            m + noise_half_width > reward_upper + 1e-12) {
          throw ConfigError("reward model: observation range of mu(" + std::to_string(i + 1) +
                            "," + std::to_string(j + 1) + ") leaves [reward_lower, reward_upper]");
        }
      }
    }
  }
};

// Per-user per-slot result. `server` is 0 for idle, 1..K otherwise.
struct SlotOutcome {
  int server = 0;
  bool processed = false;
  double observed_reward = 0.0;
};

// Per-user server choice: 0 = unassigned/idle, 1..K = server index.
using Assignment = std::vector<int>;

inline double assignment_value(const Matrix& mu, const Assignment& a) {
  double total = 0;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (a[i] > 0) total += mu(i, a[i] - 1);
  }
  return total;
}

// Mapping between flat resource units 1..M and the servers owning them.
// Unit m belongs to server j iff m lies in (sum_{l<j} M_l, sum_{l<=j} M_l].
class UnitMap {
 public:
  UnitMap() = default;
  explicit UnitMap(const std::vector<int>& capacities) {
    first_unit_.resize(capacities.size() + 1, 0);
    for (size_t j = 0; j < capacities.size(); ++j) {
      first_unit_[j + 1] = first_unit_[j] + capacities[j];
      for (int c = 0; c < capacities[j]; ++c) unit_server_.push_back(static_cast<int>(j) + 1);
    }
  }

  int total_units() const { return static_cast<int>(unit_server_.size()); }
  int num_servers() const { return static_cast<int>(first_unit_.size()) - 1; }

  // Server (1-based) owning unit m (1-based).
  int server_of(int unit) const { return unit_server_[unit - 1]; }

  // Units of server j (1-based) as inclusive range [lo, hi].
  std::pair<int, int> unit_range(int server) const {
    return {first_unit_[server - 1] + 1, first_unit_[server]};
  }

 private:
  std::vector<int> unit_server_;
  std::vector<int> first_unit_;
};

}  // namespace offload

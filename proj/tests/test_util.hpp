#pragma once

// Test-only brute-force oracles and instance generators. These are kept
// independent of the library's solvers: plain enumeration everywhere.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "offload/env.hpp"
#include "offload/rng.hpp"
#include "offload/types.hpp"

namespace offload::testutil {

struct BruteForceResult {
  Assignment assignment;
  double value = -std::numeric_limits<double>::infinity();
};

// All feasible full assignments (every user placed), recursively.
inline void brute_force_oap_rec(const Matrix& mu, std::vector<int>& residual, Assignment& a,
                                int i, double value, BruteForceResult& best) {
  if (i == mu.rows()) {
    if (value > best.value + 1e-9) {
      best.value = value;
      best.assignment = a;
    }
    return;
  }
  for (int j = 0; j < mu.cols(); ++j) {
    if (residual[j] == 0) continue;
    residual[j] -= 1;
    a[i] = j + 1;
    brute_force_oap_rec(mu, residual, a, i + 1, value + mu(i, j), best);
    residual[j] += 1;
  }
  a[i] = 0;
}

inline BruteForceResult brute_force_oap(const Matrix& mu, const std::vector<int>& capacities) {
  BruteForceResult best;
  std::vector<int> residual = capacities;
  Assignment a(mu.rows(), 0);
  brute_force_oap_rec(mu, residual, a, 0, 0.0, best);
  return best;
}

// Best and second-best distinct compound values over all feasible full
// assignments.
inline std::pair<double, double> brute_force_top_two(const Matrix& mu,
                                                     const std::vector<int>& capacities) {
  std::vector<double> values;
  std::vector<int> residual = capacities;
  Assignment a(mu.rows(), 0);
  struct Rec {
    const Matrix& mu;
    std::vector<int>& residual;
    Assignment& a;
    std::vector<double>& values;
    void go(int i, double value) {
      if (i == mu.rows()) {
        values.push_back(value);
        return;
      }
      for (int j = 0; j < mu.cols(); ++j) {
        if (residual[j] == 0) continue;
        residual[j] -= 1;
        a[i] = j + 1;
        go(i + 1, value + mu(i, j));
        residual[j] += 1;
      }
    }
  } rec{mu, residual, a, values};
  rec.go(0, 0.0);
  std::sort(values.begin(), values.end(), std::greater<>());
  const double best = values.front();
  for (double v : values) {
    if (v < best - 1e-9) return {best, v};
  }
  return {best, -std::numeric_limits<double>::infinity()};
}

// Exhaustive 0/1 knapsack over all subsets, n <= 20.
inline std::pair<std::vector<int>, double> brute_force_knapsack(
    const std::vector<double>& values, const std::vector<double>& weights, double capacity) {
  const int n = static_cast<int>(values.size());
  double best = 0;
  unsigned best_mask = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double v = 0, w = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        v += values[i];
        w += weights[i];
      }
    }
    if (w <= capacity + 1e-12 && v > best + 1e-9) {
      best = v;
      best_mask = mask;
    }
  }
  std::vector<int> picked;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) picked.push_back(i);
  }
  return {picked, best};
}

// Exhaustive heterogeneous assignment (choices 0..K per user), n <= 10.
inline BruteForceResult brute_force_gap(const Matrix& mu, const std::vector<double>& demands,
                                        const std::vector<double>& capacities) {
  BruteForceResult best;
  best.value = -1;
  const int n = mu.rows();
  const int k = mu.cols();
  Assignment a(n, 0);
  std::vector<double> used(k, 0.0);
  struct Rec {
    const Matrix& mu;
    const std::vector<double>& demands;
    const std::vector<double>& capacities;
    Assignment& a;
    std::vector<double>& used;
    BruteForceResult& best;
    void go(int i, double value) {
      if (i == mu.rows()) {
        if (value > best.value + 1e-9) {
          best.value = value;
          best.assignment = a;
        }
        return;
      }
      a[i] = 0;
      go(i + 1, value);
      for (int j = 0; j < mu.cols(); ++j) {
        if (used[j] + demands[i] > capacities[j] + 1e-12) continue;
        used[j] += demands[i];
        a[i] = j + 1;
        go(i + 1, value + mu(i, j));
        used[j] -= demands[i];
      }
      a[i] = 0;
    }
  } rec{mu, demands, capacities, a, used, best};
  rec.go(0, 0.0);
  return best;
}

inline Matrix random_mu(Rng& rng, int n, int k, double lo = 0.7, double hi = 3.4) {
  Matrix mu(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) mu(i, j) = rng.uniform(lo, hi);
  }
  return mu;
}

// Paper-style instance: values and rates in the evaluation ranges.
struct PaperInstance {
  std::vector<UserProfile> users;
  std::vector<ServerProfile> servers;
};

inline PaperInstance paper_instance(Rng& rng, int n, int k) {
  PaperInstance inst;
  for (int i = 1; i <= n; ++i) {
    UserProfile u;
    u.id = i;
    u.task_size_bits = rng.uniform(500, 1600) * 8000.0;
    u.cycles_per_bit = 1000;
    u.task_value = rng.uniform(3.0, 3.5);
    u.latency_sensitivity = rng.uniform(0.2, 0.5);
    u.resource_demand = rng.uniform(0.5, 1.0);
    inst.users.push_back(u);
  }
  for (int j = 1; j <= k; ++j) {
    ServerProfile s;
    s.id = j;
    s.tx_rate_bits_per_s = rng.uniform(9, 11) * 1e6;
    s.cpu_speed_cycles_per_s = rng.uniform(4, 8) * 1e9;
    s.task_capacity = rng.uniform_int(2, 5);
    s.resource_capacity = rng.uniform(2.0, 3.5);
    inst.servers.push_back(s);
  }
  return inst;
}

inline Environment paper_env(Rng& rng, int n, int k,
                             CapacityModel model = CapacityModel::homogeneous) {
  PaperInstance inst = paper_instance(rng, n, k);
  return Environment::from_profiles(inst.users, inst.servers, 0.3, 0.3, 3.8, model);
}

// Synthetic environment from an explicit mu matrix and task capacities.
inline Environment matrix_env(const Matrix& mu, const std::vector<int>& capacities,
                              double noise = 0.3, double r_lo = 0.0, double r_hi = 4.0) {
  std::vector<UserProfile> users;
  for (int i = 1; i <= mu.rows(); ++i) {
    UserProfile u;
    u.id = i;
    u.task_size_bits = 1;
    u.cycles_per_bit = 1;
    u.task_value = 1;
    u.latency_sensitivity = 0;
    u.resource_demand = 1;
    users.push_back(u);
  }
  std::vector<ServerProfile> servers;
  for (int j = 1; j <= mu.cols(); ++j) {
    ServerProfile s;
    s.id = j;
    s.tx_rate_bits_per_s = 1;
    s.cpu_speed_cycles_per_s = 1;
    s.task_capacity = capacities[j - 1];
    s.resource_capacity = 1;
    servers.push_back(s);
  }
  RewardModel model;
  model.mu = mu;
  model.noise_half_width = noise;
  model.reward_lower = r_lo;
  model.reward_upper = r_hi;
  return Environment(users, servers, model, CapacityModel::homogeneous);
}

}  // namespace offload::testutil

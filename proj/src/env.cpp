#include "offload/env.hpp"

#include <algorithm>
#include <numeric>

namespace offload {

Environment::Environment(std::vector<UserProfile> users, std::vector<ServerProfile> servers,
                         RewardModel model, CapacityModel capacity_model)
    : users_(std::move(users)),
      servers_(std::move(servers)),
      model_(std::move(model)),
      capacity_model_(capacity_model) {
  if (model_.mu.rows() != num_users() || model_.mu.cols() != num_servers()) {
    throw ConfigError("environment: mu shape does not match profiles");
  }
  model_.validate();
}

Environment Environment::from_profiles(std::vector<UserProfile> users,
                                       std::vector<ServerProfile> servers,
                                       double noise_half_width, double reward_lower,
                                       double reward_upper, CapacityModel capacity_model) {
  RewardModel model;
  model.mu = Matrix(static_cast<int>(users.size()), static_cast<int>(servers.size()));
  for (size_t i = 0; i < users.size(); ++i) {
    for (size_t j = 0; j < servers.size(); ++j) {
      model.mu(static_cast<int>(i), static_cast<int>(j)) = expected_reward(users[i], servers[j]);
    }
  }
  model.noise_half_width = noise_half_width;
  model.reward_lower = reward_lower;
  model.reward_upper = reward_upper;
  return Environment(std::move(users), std::move(servers), std::move(model), capacity_model);
}

std::vector<int> Environment::task_capacities() const {
  std::vector<int> caps;
  caps.reserve(servers_.size());
  for (const auto& s : servers_) caps.push_back(s.task_capacity);
  return caps;
}

std::vector<double> Environment::resource_capacities() const {
  std::vector<double> caps;
  caps.reserve(servers_.size());
  for (const auto& s : servers_) caps.push_back(s.resource_capacity);
  return caps;
}

std::vector<double> Environment::demands() const {
  std::vector<double> d;
  d.reserve(users_.size());
  for (const auto& u : users_) d.push_back(u.resource_demand);
  return d;
}

int Environment::total_task_capacity() const {
  int m = 0;
  for (const auto& s : servers_) m += s.task_capacity;
  return m;
}

double Environment::sample_reward(int i, int j, Rng& rng) const {
  const double m = model_.mu(i, j);
  const double h = model_.noise_half_width;
  if (h == 0) return m;
  return rng.uniform(m - h, m + h);
}

namespace {

std::vector<std::vector<int>> arrivals_per_server(const std::vector<int>& choices, int k) {
  std::vector<std::vector<int>> arrivals(k);
  for (int i = 0; i < static_cast<int>(choices.size()); ++i) {
    const int c = choices[i];
    if (c > 0) arrivals[c - 1].push_back(i);
  }
  return arrivals;
}

}  // namespace

std::vector<SlotOutcome> Environment::step_homogeneous(const std::vector<int>& choices,
                                                       Rng& rng) const {
  std::vector<SlotOutcome> out(num_users());
  for (int i = 0; i < num_users(); ++i) out[i].server = choices[i];

  auto arrivals = arrivals_per_server(choices, num_servers());
  for (int j = 0; j < num_servers(); ++j) {
    auto& list = arrivals[j];
    const int cap = servers_[j].task_capacity;
    if (static_cast<int>(list.size()) > cap) {
      // Keep a uniformly random size-cap subset (partial Fisher-Yates).
      for (int p = 0; p < cap; ++p) {
        const int q = rng.uniform_int(p, static_cast<int>(list.size()) - 1);
        std::swap(list[p], list[q]);
      }
      list.resize(cap);
    }
    for (int i : list) out[i].processed = true;
  }
  for (int i = 0; i < num_users(); ++i) {
    if (out[i].processed) out[i].observed_reward = sample_reward(i, choices[i] - 1, rng);
  }
  return out;
}

std::vector<SlotOutcome> Environment::step_heterogeneous(const std::vector<int>& choices,
                                                         Rng& rng) const {
  std::vector<SlotOutcome> out(num_users());
  for (int i = 0; i < num_users(); ++i) out[i].server = choices[i];

  auto arrivals = arrivals_per_server(choices, num_servers());
  for (int j = 0; j < num_servers(); ++j) {
    auto& list = arrivals[j];
    if (list.empty()) continue;
    rng.shuffle(list);
    double used = 0;
    const double cap = servers_[j].resource_capacity;
    for (int i : list) {
      if (used + users_[i].resource_demand > cap + 1e-12) break;
      used += users_[i].resource_demand;
      out[i].processed = true;
    }
  }
  for (int i = 0; i < num_users(); ++i) {
    if (out[i].processed) out[i].observed_reward = sample_reward(i, choices[i] - 1, rng);
  }
  return out;
}

std::vector<SlotOutcome> Environment::step(const std::vector<int>& choices, Rng& rng) const {
  return capacity_model_ == CapacityModel::homogeneous ? step_homogeneous(choices, rng)
                                                       : step_heterogeneous(choices, rng);
}

Environment Environment::restricted_to(const std::vector<int>& user_indices) const {
  std::vector<UserProfile> users;
  users.reserve(user_indices.size());
  RewardModel model = model_;
  model.mu = Matrix(static_cast<int>(user_indices.size()), num_servers());
  for (size_t r = 0; r < user_indices.size(); ++r) {
    users.push_back(users_[user_indices[r]]);
    for (int j = 0; j < num_servers(); ++j) {
      model.mu(static_cast<int>(r), j) = model_.mu(user_indices[r], j);
    }
  }
  return Environment(std::move(users), servers_, std::move(model), capacity_model_);
}

}  // namespace offload

#include "offload/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace offload {

using nlohmann::json;

namespace {

constexpr double kBitsPerKb = 8000.0;
constexpr double kBitsPerMbps = 1e6;
constexpr double kCyclesPerGhz = 1e9;

// A field is either a scalar (fixed) or a [lo, hi] range drawn uniformly.
double resolve_field(const json& section, const std::string& key, Rng& rng, bool required,
                     double fallback = 0.0) {
  if (!section.contains(key)) {
    if (required) throw ConfigError("config: missing field '" + key + "'");
    return fallback;
  }
  const json& f = section.at(key);
  if (f.is_number()) return f.get<double>();
  if (f.is_array() && f.size() == 2) {
    const double lo = f[0].get<double>(), hi = f[1].get<double>();
    if (hi < lo) throw ConfigError("config: range '" + key + "' has hi < lo");
    return rng.uniform(lo, hi);
  }
  throw ConfigError("config: field '" + key + "' must be a number or [lo, hi]");
}

int resolve_int_field(const json& section, const std::string& key, Rng& rng, bool required,
                      int fallback = 0) {
  if (!section.contains(key)) {
    if (required) throw ConfigError("config: missing field '" + key + "'");
    return fallback;
  }
  const json& f = section.at(key);
  if (f.is_number_integer()) return f.get<int>();
  if (f.is_array() && f.size() == 2) {
    const int lo = f[0].get<int>(), hi = f[1].get<int>();
    if (hi < lo) throw ConfigError("config: range '" + key + "' has hi < lo");
    return rng.uniform_int(lo, hi);
  }
  throw ConfigError("config: field '" + key + "' must be an integer or [lo, hi]");
}

double scalar_field(const json& section, const std::string& key, bool required,
                    double fallback = 0.0) {
  if (!section.contains(key)) {
    if (required) throw ConfigError("config: missing field '" + key + "'");
    return fallback;
  }
  const json& f = section.at(key);
  if (!f.is_number()) {
    throw ConfigError("config: field '" + key + "' of an explicit profile must be a number");
  }
  return f.get<double>();
}

UserProfile user_from_json(const json& u, int fallback_id) {
  UserProfile p;
  p.id = u.contains("id") ? u.at("id").get<int>() : fallback_id;
  p.task_size_bits = scalar_field(u, "task_size_kb", true) * kBitsPerKb;
  p.cycles_per_bit = scalar_field(u, "cycles_per_bit", true);
  p.task_value = scalar_field(u, "task_value", true);
  p.latency_sensitivity = scalar_field(u, "latency_sensitivity", true);
  p.resource_demand = scalar_field(u, "resource_demand", false, 0.0);
  return p;
}

ServerProfile server_from_json(const json& s, int fallback_id) {
  ServerProfile p;
  p.id = s.contains("id") ? s.at("id").get<int>() : fallback_id;
  p.tx_rate_bits_per_s = scalar_field(s, "tx_rate_mbps", true) * kBitsPerMbps;
  p.cpu_speed_cycles_per_s = scalar_field(s, "cpu_speed_ghz", true) * kCyclesPerGhz;
  p.task_capacity = s.contains("task_capacity") ? s.at("task_capacity").get<int>() : 0;
  p.resource_capacity = scalar_field(s, "resource_capacity", false, 0.0);
  return p;
}

void validate_profiles(const std::vector<UserProfile>& users,
                       const std::vector<ServerProfile>& servers, CapacityModel model) {
  std::set<int> ids;
  for (const auto& u : users) {
    if (!ids.insert(u.id).second) {
      throw ConfigError("config: duplicate user id " + std::to_string(u.id));
    }
    if (!(u.task_size_bits > 0)) throw ConfigError("config: user task size must be positive");
    if (!(u.cycles_per_bit > 0)) throw ConfigError("config: user cycles/bit must be positive");
    if (!(u.task_value > 0)) throw ConfigError("config: user task value must be positive");
    if (u.latency_sensitivity < 0) {
      throw ConfigError("config: latency sensitivity must be non-negative");
    }
    if (model == CapacityModel::heterogeneous && !(u.resource_demand > 0)) {
      throw ConfigError("config: user " + std::to_string(u.id) +
                        " needs a positive resource demand under the heterogeneous model");
    }
  }
  std::set<int> sids;
  int total_slots = 0;
  for (const auto& s : servers) {
    if (!sids.insert(s.id).second) {
      throw ConfigError("config: duplicate server id " + std::to_string(s.id));
    }
    if (!(s.tx_rate_bits_per_s > 0)) throw ConfigError("config: server tx rate must be positive");
    if (!(s.cpu_speed_cycles_per_s > 0)) {
      throw ConfigError("config: server cpu speed must be positive");
    }
    if (model == CapacityModel::homogeneous) {
      if (s.task_capacity < 1) {
        throw ConfigError("config: server " + std::to_string(s.id) +
                          " needs task_capacity >= 1 under the homogeneous model");
      }
      total_slots += s.task_capacity;
    } else if (!(s.resource_capacity > 0)) {
      throw ConfigError("config: server " + std::to_string(s.id) +
                        " needs a positive resource_capacity under the heterogeneous model");
    }
  }
  if (model == CapacityModel::homogeneous &&
      static_cast<int>(users.size()) > total_slots) {
    throw ConfigError("config: infeasible instance, " + std::to_string(users.size()) +
                      " users but only " + std::to_string(total_slots) + " task slots");
  }
  if (model == CapacityModel::heterogeneous) {
    double max_demand = 0, min_capacity = 1e300;
    for (const auto& u : users) max_demand = std::max(max_demand, u.resource_demand);
    for (const auto& s : servers) min_capacity = std::min(min_capacity, s.resource_capacity);
    if (max_demand > min_capacity + 1e-12) {
      throw ConfigError("config: infeasible heterogeneous instance, max demand " +
                        std::to_string(max_demand) + " exceeds min capacity " +
                        std::to_string(min_capacity));
    }
  }
}

}  // namespace

AlgorithmKind algorithm_from_name(const std::string& name) {
  if (name == "debo") return AlgorithmKind::debo;
  if (name == "udebo") return AlgorithmKind::udebo;
  if (name == "ddebo") return AlgorithmKind::ddebo;
  if (name == "fdebo") return AlgorithmKind::fdebo;
  if (name == "hdebo") return AlgorithmKind::hdebo;
  if (name == "mucb") return AlgorithmKind::mucb;
  if (name == "mexp3") return AlgorithmKind::mexp3;
  if (name == "dmnon0") return AlgorithmKind::dmnon0;
  throw ConfigError("config: unknown algorithm '" + name + "'");
}

const char* algorithm_name(AlgorithmKind a) {
  switch (a) {
    case AlgorithmKind::debo: return "debo";
    case AlgorithmKind::udebo: return "udebo";
    case AlgorithmKind::ddebo: return "ddebo";
    case AlgorithmKind::fdebo: return "fdebo";
    case AlgorithmKind::hdebo: return "hdebo";
    case AlgorithmKind::mucb: return "mucb";
    case AlgorithmKind::mexp3: return "mexp3";
    case AlgorithmKind::dmnon0: return "dmnon0";
  }
  return "?";
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedExperiment load_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!doc.contains("environment")) throw ConfigError("config: missing 'environment' section");
  const json& envj = doc.at("environment");

  const std::string model_name = envj.value("capacity_model", std::string("homogeneous"));
  CapacityModel model;
  if (model_name == "homogeneous") {
    model = CapacityModel::homogeneous;
  } else if (model_name == "heterogeneous") {
    model = CapacityModel::heterogeneous;
  } else {
    throw ConfigError("config: capacity_model must be homogeneous or heterogeneous");
  }

  const double noise = envj.value("noise_half_width", 0.3);
  const double r_lo = envj.value("reward_lower", 0.3);
  const double r_hi = envj.value("reward_upper", 3.8);

  std::vector<UserProfile> users;
  std::vector<ServerProfile> servers;
  if (envj.contains("users") && envj.contains("servers")) {
    int next_id = 1;
    for (const auto& u : envj.at("users")) users.push_back(user_from_json(u, next_id++));
    next_id = 1;
    for (const auto& s : envj.at("servers")) servers.push_back(server_from_json(s, next_id++));
  } else if (envj.contains("user_ranges") && envj.contains("server_ranges")) {
    const int n = envj.value("num_users", 0);
    const int k = envj.value("num_servers", 0);
    if (n < 1 || k < 1) throw ConfigError("config: num_users and num_servers must be >= 1");
    // Profiles are drawn from the seeded instance stream in a fixed field
    // order so an instance_seed pins the instance exactly.
    Rng rng(envj.value("instance_seed", std::uint64_t{1}));
    const json& ur = envj.at("user_ranges");
    const json& sr = envj.at("server_ranges");
    for (int i = 1; i <= n; ++i) {
      UserProfile p;
      p.id = i;
      p.task_size_bits = resolve_field(ur, "task_size_kb", rng, true) * kBitsPerKb;
      p.cycles_per_bit = resolve_field(ur, "cycles_per_bit", rng, true);
      p.task_value = resolve_field(ur, "task_value", rng, true);
      p.latency_sensitivity = resolve_field(ur, "latency_sensitivity", rng, true);
      p.resource_demand = resolve_field(ur, "resource_demand", rng, false, 0.0);
      users.push_back(p);
    }
    for (int j = 1; j <= k; ++j) {
      ServerProfile p;
      p.id = j;
      p.tx_rate_bits_per_s = resolve_field(sr, "tx_rate_mbps", rng, true) * kBitsPerMbps;
      p.cpu_speed_cycles_per_s = resolve_field(sr, "cpu_speed_ghz", rng, true) * kCyclesPerGhz;
      p.task_capacity = resolve_int_field(sr, "task_capacity", rng, false, 0);
      p.resource_capacity = resolve_field(sr, "resource_capacity", rng, false, 0.0);
      servers.push_back(p);
    }
  } else {
    throw ConfigError(
        "config: environment needs either explicit users/servers or user_ranges/server_ranges");
  }
  validate_profiles(users, servers, model);

  ExperimentConfig exp;
  if (doc.contains("experiment")) {
    const json& ej = doc.at("experiment");
    exp.algorithm = algorithm_from_name(ej.value("algorithm", std::string("debo")));
    exp.horizon = ej.value("horizon", exp.horizon);
    exp.replications = ej.value("replications", exp.replications);
    exp.master_seed = ej.value("master_seed", exp.master_seed);
    exp.output_dir = ej.value("output_dir", exp.output_dir);
    exp.dump_slots = ej.value("dump_slots", exp.dump_slots);
    if (ej.contains("overrides")) {
      const json& ov = ej.at("overrides");
      if (ov.contains("t1_cap")) exp.overrides.t1_cap = ov.at("t1_cap").get<long long>();
      if (ov.contains("delta_min_override")) {
        exp.overrides.delta_min_override = ov.at("delta_min_override").get<double>();
      }
      exp.overrides.beta = ov.value("beta", exp.overrides.beta);
      exp.overrides.zeta = ov.value("zeta", exp.overrides.zeta);
      exp.overrides.vartheta = ov.value("vartheta", exp.overrides.vartheta);
      exp.overrides.c0 = ov.value("c0", exp.overrides.c0);
      exp.overrides.c1 = ov.value("c1", exp.overrides.c1);
      exp.overrides.gamma_exp = ov.value("gamma_exp", exp.overrides.gamma_exp);
      exp.overrides.dmnon0_explore_len =
          ov.value("dmnon0_explore_len", exp.overrides.dmnon0_explore_len);
    }
    if (ej.contains("events")) {
      for (const auto& evj : ej.at("events")) {
        PopulationEvent ev;
        ev.epoch = evj.at("epoch").get<int>();
        const std::string kind = evj.at("kind").get<std::string>();
        if (kind == "enter") {
          ev.kind = PopulationEvent::Kind::enter;
          ev.user = user_from_json(evj.at("user"), 0);
        } else if (kind == "leave") {
          ev.kind = PopulationEvent::Kind::leave;
          ev.user_id = evj.at("user_id").get<int>();
        } else {
          throw ConfigError("config: event kind must be enter or leave");
        }
        exp.events.push_back(ev);
      }
    }
  }
  if (exp.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  if (exp.replications < 1) throw ConfigError("config: replications must be >= 1");
  if (!exp.events.empty() && exp.algorithm != AlgorithmKind::ddebo) {
    throw ConfigError("config: population events require the ddebo algorithm");
  }

  // Environment construction re-checks the reward-model invariants
  // (positive mu, observation range within [reward_lower, reward_upper]).
  Environment env = Environment::from_profiles(users, servers, noise, r_lo, r_hi, model);

  // Oracle quantities and gaps; heterogeneous runs use the exact search
  // benchmark and the user-level gap family.
  GapSummary gaps;
  OapSolution oracle;
  std::optional<OapSolution> fair_oracle;
  std::optional<GapSummary> fair_gaps;
  if (model == CapacityModel::homogeneous) {
    gaps = compute_gaps(env.mu(), env.task_capacities());
    if (exp.overrides.delta_min_override) gaps.delta_min = *exp.overrides.delta_min_override;
    oracle = solve_oap(env.mu(), env.task_capacities());
    if (exp.algorithm == AlgorithmKind::fdebo) {
      fair_oracle = solve_fair_oap(env.mu(), env.task_capacities(), exp.overrides.beta);
      fair_gaps = compute_gaps(fairness_transform(env.mu(), exp.overrides.beta),
                               env.task_capacities());
      if (exp.overrides.delta_min_override) {
        fair_gaps->delta_min = *exp.overrides.delta_min_override;
      }
    }
  } else {
    gaps = compute_user_gaps(env.mu());
    if (exp.overrides.delta_min_override) gaps.delta_min = *exp.overrides.delta_min_override;
    if (!(gaps.delta_prime_min > 1e-12)) {
      throw ConfigError("degenerate heterogeneous instance: zero delta-prime gap");
    }
    oracle = solve_gap_exact(env.mu(), env.demands(), env.resource_capacities());
  }

  // Resolved instance for the metadata sidecar.
  json resolved;
  resolved["capacity_model"] = model_name;
  resolved["noise_half_width"] = noise;
  resolved["reward_lower"] = r_lo;
  resolved["reward_upper"] = r_hi;
  for (const auto& u : users) {
    resolved["users"].push_back({{"id", u.id},
                                 {"task_size_bits", u.task_size_bits},
                                 {"cycles_per_bit", u.cycles_per_bit},
                                 {"task_value", u.task_value},
                                 {"latency_sensitivity", u.latency_sensitivity},
                                 {"resource_demand", u.resource_demand}});
  }
  for (const auto& s : servers) {
    resolved["servers"].push_back({{"id", s.id},
                                   {"tx_rate_bits_per_s", s.tx_rate_bits_per_s},
                                   {"cpu_speed_cycles_per_s", s.cpu_speed_cycles_per_s},
                                   {"task_capacity", s.task_capacity},
                                   {"resource_capacity", s.resource_capacity}});
  }
  for (int i = 0; i < env.num_users(); ++i) {
    json row = json::array();
    for (int j = 0; j < env.num_servers(); ++j) row.push_back(env.mu()(i, j));
    resolved["mu"].push_back(row);
  }
  resolved["gaps"] = {{"delta_min", gaps.delta_min},
                      {"delta_user_min", gaps.delta_user_min},
                      {"delta1_min", gaps.delta1_min},
                      {"delta2_min", gaps.delta2_min},
                      {"delta_prime_min", gaps.delta_prime_min}};
  resolved["oracle"] = {{"assignment", oracle.assignment}, {"value", oracle.value}};
  if (fair_oracle) {
    resolved["fair_oracle"] = {{"assignment", fair_oracle->assignment},
                               {"value", fair_oracle->value}};
  }

  LoadedExperiment out{std::move(exp),    std::move(env),         gaps,
                       std::move(oracle), std::move(fair_oracle), std::move(fair_gaps),
                       content_hash(text), resolved.dump(2)};
  return out;
}

LoadedExperiment load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

}  // namespace offload

#include "offload/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "offload/baselines.hpp"
#include "offload/debo.hpp"
#include "offload/hdebo.hpp"

namespace offload {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int min_task_capacity(const Environment& env) {
  const auto caps = env.task_capacities();
  return *std::min_element(caps.begin(), caps.end());
}

EpochParams debo_params(const LoadedExperiment& loaded) {
  const Environment& env = loaded.env;
  return gap_aware_params(loaded.gaps, env.num_users(), env.total_task_capacity(),
                         min_task_capacity(env), env.num_servers(),
                         env.reward_model().reward_upper, env.reward_model().reward_lower,
                         loaded.experiment.overrides.t1_cap);
}

EpochParams fdebo_params(const LoadedExperiment& loaded) {
  const Environment& env = loaded.env;
  return fair_gap_params(*loaded.fair_gaps, env.num_users(), env.total_task_capacity(),
                         min_task_capacity(env), env.num_servers(),
                         env.reward_model().reward_upper, env.reward_model().reward_lower,
                         loaded.experiment.overrides.beta, loaded.experiment.overrides.t1_cap);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

RunTrace run_algorithm(const LoadedExperiment& loaded, std::uint64_t seed,
                       std::ostream* slot_sink) {
  const Environment& env = loaded.env;
  const ParameterOverrides& ov = loaded.experiment.overrides;
  Rng rng(seed);
  switch (loaded.experiment.algorithm) {
    case AlgorithmKind::debo:
      return run_debo(env, loaded.experiment.horizon, debo_params(loaded), rng, slot_sink);
    case AlgorithmKind::udebo: {
      UDeboSchedule sched{ov.c0, ov.c1, ov.vartheta};
      return run_udebo(env, loaded.experiment.horizon, sched, rng, slot_sink);
    }
    case AlgorithmKind::ddebo: {
      DDeboOptions opts{ov.t1_cap, ov.delta_min_override, ov.zeta};
      return run_ddebo(env, loaded.experiment.horizon, loaded.experiment.events, opts, rng,
                       slot_sink);
    }
    case AlgorithmKind::fdebo:
      return run_fdebo(env, loaded.experiment.horizon, ov.beta, fdebo_params(loaded), rng,
                       slot_sink);
    case AlgorithmKind::hdebo: {
      // The Remark-style override maps onto delta_prime for this model.
      HDeboOptions opts{ov.t1_cap, ov.delta_min_override};
      return run_hdebo(env, loaded.experiment.horizon, opts, rng, slot_sink);
    }
    case AlgorithmKind::mucb:
      return run_mucb(env, loaded.experiment.horizon, rng, slot_sink);
    case AlgorithmKind::mexp3:
      return run_mexp3(env, loaded.experiment.horizon, ov.gamma_exp, rng, slot_sink);
    case AlgorithmKind::dmnon0:
      return run_dmnon0(env, loaded.experiment.horizon, ov.dmnon0_explore_len, rng, slot_sink);
  }
  throw SimulationError("run_algorithm: unhandled algorithm");
}

double metric_oracle_value(const LoadedExperiment& loaded) { return loaded.oracle.value; }

RegretKind metric_regret_kind(const LoadedExperiment& loaded) {
  if (loaded.env.capacity_model() == CapacityModel::heterogeneous) {
    return RegretKind::heterogeneous;
  }
  return loaded.experiment.algorithm == AlgorithmKind::fdebo ? RegretKind::fairness
                                                             : RegretKind::homogeneous;
}

ExperimentResult run_experiment(const LoadedExperiment& loaded, bool quiet) {
  const ExperimentConfig& exp = loaded.experiment;
  ExperimentResult result;
  result.output_dir = exp.output_dir;
  fs::create_directories(exp.output_dir);

  const double oracle_value = metric_oracle_value(loaded);
  const RegretKind kind = metric_regret_kind(loaded);
  const double fair_value = loaded.fair_oracle ? loaded.fair_oracle->value : 0.0;

  const char* header =
      "t,cum_expected,cum_sampled,time_avg_reward,reward_ratio,regret,fair_regret,max_user_gap";

  auto write_row = [&](std::ostream& os, const CheckpointRow& row) {
    os << row.t << ',' << format_value(row.cum_expected) << ',' << format_value(row.cum_sampled)
       << ',' << format_value(row.time_avg_reward) << ',' << format_value(row.reward_ratio)
       << ',' << format_value(row.regret) << ',' << format_value(row.fair_regret) << ','
       << format_value(row.max_user_gap) << '\n';
  };

  for (int r = 0; r < exp.replications; ++r) {
    const std::uint64_t seed = exp.master_seed + static_cast<std::uint64_t>(r);
    std::ofstream slot_file;
    std::ostream* sink = nullptr;
    if (exp.dump_slots) {
      const fs::path p = fs::path(exp.output_dir) / ("slots_replica_" + std::to_string(r) + ".csv");
      slot_file.open(p, std::ios::binary);
      sink = &slot_file;
    }
    RunTrace trace = run_algorithm(loaded, seed, sink);
    MetricsSummary summary = summarize_metrics(trace, oracle_value, kind, fair_value);

    const fs::path p = fs::path(exp.output_dir) / ("replica_" + std::to_string(r) + ".csv");
    std::ofstream out(p, std::ios::binary);
    out << header << '\n';
    for (const auto& row : summary.rows) write_row(out, row);
    result.replica_files.push_back(p.string());
    result.replicas.push_back(std::move(summary));

    // Per-epoch summaries, where the algorithm has epochs. `matched_oracle`
    // compares against the model-appropriate offline assignment.
    if (!trace.epochs.empty()) {
      const Assignment& target = loaded.fair_oracle && exp.algorithm == AlgorithmKind::fdebo
                                     ? loaded.fair_oracle->assignment
                                     : loaded.oracle.assignment;
      const fs::path ep = fs::path(exp.output_dir) / ("epochs_replica_" + std::to_string(r) + ".csv");
      std::ofstream eout(ep, std::ios::binary);
      eout << "n,start_slot,explore_slots,match_slots,exploit_slots,assignment,"
              "matched_oracle,budget_exhausted,estimate_holes,knapsack_nodes,knapsack_prunes\n";
      for (const auto& e : trace.epochs) {
        eout << e.n << ',' << e.start_slot << ',' << e.explore_slots << ',' << e.match_slots
             << ',' << e.exploit_slots << ',';
        for (size_t i = 0; i < e.assignment.size(); ++i) {
          eout << (i ? ";" : "") << e.assignment[i];
        }
        eout << ',' << (e.assignment == target ? 1 : 0) << ',' << (e.budget_exhausted ? 1 : 0)
             << ',' << e.estimate_holes << ',';
        for (size_t i = 0; i < e.knapsack_nodes.size(); ++i) {
          eout << (i ? ";" : "") << e.knapsack_nodes[i];
        }
        eout << ',';
        for (size_t i = 0; i < e.knapsack_prunes.size(); ++i) {
          eout << (i ? ";" : "") << e.knapsack_prunes[i];
        }
        eout << '\n';
      }
    }
    if (!quiet) {
      std::cerr << "[offload] replica " << (r + 1) << "/" << exp.replications << " algorithm="
                << algorithm_name(exp.algorithm) << " seed=" << seed
                << " final_ratio=" << result.replicas.back().final_ratio << "\n";
    }
  }

  // Long-format aggregate: every replica row per checkpoint, then mean/std.
  const fs::path agg_path = fs::path(exp.output_dir) / "aggregate.csv";
  {
    std::ofstream agg(agg_path, std::ios::binary);
    agg << "t,replica,cum_expected,cum_sampled,time_avg_reward,reward_ratio,regret,"
           "fair_regret,max_user_gap\n";
    const size_t rows = result.replicas.front().rows.size();
    for (size_t c = 0; c < rows; ++c) {
      for (int r = 0; r < exp.replications; ++r) {
        const CheckpointRow& row = result.replicas[r].rows[c];
        agg << row.t << ',' << r << ',' << format_value(row.cum_expected) << ','
            << format_value(row.cum_sampled) << ',' << format_value(row.time_avg_reward) << ','
            << format_value(row.reward_ratio) << ',' << format_value(row.regret) << ','
            << format_value(row.fair_regret) << ',' << format_value(row.max_user_gap) << '\n';
      }
      auto stat_of = [&](auto extract) {
        double mean = 0;
        for (const auto& rep : result.replicas) mean += extract(rep.rows[c]);
        mean /= exp.replications;
        double var = 0;
        for (const auto& rep : result.replicas) {
          const double d = extract(rep.rows[c]) - mean;
          var += d * d;
        }
        var = exp.replications > 1 ? var / (exp.replications - 1) : 0.0;
        return std::pair<double, double>(mean, std::sqrt(var));
      };
      const auto ce = stat_of([](const CheckpointRow& r) { return r.cum_expected; });
      const auto cs = stat_of([](const CheckpointRow& r) { return r.cum_sampled; });
      const auto ta = stat_of([](const CheckpointRow& r) { return r.time_avg_reward; });
      const auto rr = stat_of([](const CheckpointRow& r) { return r.reward_ratio; });
      const auto rg = stat_of([](const CheckpointRow& r) { return r.regret; });
      const auto fr = stat_of([](const CheckpointRow& r) { return r.fair_regret; });
      const auto ug = stat_of([](const CheckpointRow& r) { return r.max_user_gap; });
      const long long t = result.replicas.front().rows[c].t;
      agg << t << ",mean," << format_value(ce.first) << ',' << format_value(cs.first) << ','
          << format_value(ta.first) << ',' << format_value(rr.first) << ','
          << format_value(rg.first) << ',' << format_value(fr.first) << ','
          << format_value(ug.first) << '\n';
      agg << t << ",std," << format_value(ce.second) << ',' << format_value(cs.second) << ','
          << format_value(ta.second) << ',' << format_value(rr.second) << ','
          << format_value(rg.second) << ',' << format_value(fr.second) << ','
          << format_value(ug.second) << '\n';
    }
  }
  result.aggregate_file = agg_path.string();

  // Metadata sidecar: resolved instance, experiment, derived parameters.
  const fs::path meta_path = fs::path(exp.output_dir) / "metadata.json";
  {
    json meta;
    meta["config_hash"] = loaded.config_hash;
    meta["instance"] = json::parse(loaded.resolved_json);
    meta["experiment"] = {{"algorithm", algorithm_name(exp.algorithm)},
                          {"horizon", exp.horizon},
                          {"replications", exp.replications},
                          {"master_seed", exp.master_seed},
                          {"dump_slots", exp.dump_slots}};
    json derived;
    switch (exp.algorithm) {
      case AlgorithmKind::debo:
      case AlgorithmKind::ddebo: {
        const EpochParams p = debo_params(loaded);
        derived = {{"epsilon", p.epsilon}, {"t1", p.t1}, {"t2", p.t2}};
        break;
      }
      case AlgorithmKind::fdebo: {
        const EpochParams p = fdebo_params(loaded);
        derived = {{"epsilon", p.epsilon}, {"t1", p.t1}, {"t2", p.t2}};
        break;
      }
      case AlgorithmKind::udebo:
        derived = {{"c0", exp.overrides.c0},
                   {"c1", exp.overrides.c1},
                   {"vartheta", exp.overrides.vartheta}};
        break;
      case AlgorithmKind::hdebo: {
        const auto params = HeteroParams::from_instance(loaded.env.demands(),
                                                        loaded.env.resource_capacities(),
                                                        loaded.env.num_users());
        const double dp = exp.overrides.delta_min_override
                              ? *exp.overrides.delta_min_override
                              : loaded.gaps.delta_prime_min;
        derived = {{"m_bar_min", params.m_bar_min},
                   {"m_bar_max", params.m_bar_max},
                   {"n_groups", params.n_groups},
                   {"t1", hetero_exploration_length(dp, params.m_bar_max, loaded.env.num_servers(),
                                      loaded.env.num_users(), params.n_groups,
                                      loaded.env.reward_model().reward_upper,
                                      loaded.env.reward_model().reward_lower,
                                      exp.overrides.t1_cap)}};
        break;
      }
      case AlgorithmKind::mexp3:
        derived = {{"gamma_exp", exp.overrides.gamma_exp}};
        break;
      case AlgorithmKind::dmnon0:
        derived = {{"explore_len", exp.overrides.dmnon0_explore_len}};
        break;
      case AlgorithmKind::mucb:
        break;
    }
    meta["derived"] = derived;
    std::ofstream out(meta_path, std::ios::binary);
    out << meta.dump(2) << '\n';
  }
  result.metadata_file = meta_path.string();
  return result;
}

}  // namespace offload

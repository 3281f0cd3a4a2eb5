#pragma once

#include <string>
#include <vector>

#include "offload/config.hpp"
#include "offload/metrics.hpp"

namespace offload {

// One simulated run of the configured algorithm with an explicit seed.
RunTrace run_algorithm(const LoadedExperiment& loaded, std::uint64_t seed,
                       std::ostream* slot_sink = nullptr);

// Oracle per-slot value and regret kind the metrics of this experiment use.
double metric_oracle_value(const LoadedExperiment& loaded);
RegretKind metric_regret_kind(const LoadedExperiment& loaded);

struct ExperimentResult {
  std::vector<MetricsSummary> replicas;
  std::string output_dir;
  std::vector<std::string> replica_files;
  std::string aggregate_file;
  std::string metadata_file;
};

// Runs `replications` replicas with seeds master_seed + index, writing one
// checkpoint-metrics file per replica, a long-format aggregate with per-slot
// mean and standard deviation rows, and a metadata sidecar. `quiet` disables
// the per-replica progress line.
ExperimentResult run_experiment(const LoadedExperiment& loaded, bool quiet = false);

}  // namespace offload

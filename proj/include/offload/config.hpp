#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "offload/env.hpp"
#include "offload/extensions.hpp"
#include "offload/oracle.hpp"

namespace offload {

enum class AlgorithmKind { debo, udebo, ddebo, fdebo, hdebo, mucb, mexp3, dmnon0 };

AlgorithmKind algorithm_from_name(const std::string& name);
const char* algorithm_name(AlgorithmKind a);

struct ParameterOverrides {
  std::optional<long long> t1_cap;
  std::optional<double> delta_min_override;
  double beta = 1.0;
  double zeta = 0.5;
  double vartheta = 0.5;
  double c0 = 0.5;
  double c1 = 50;
  double gamma_exp = 0.05;
  long long dmnon0_explore_len = 100;
};

struct ExperimentConfig {
  AlgorithmKind algorithm = AlgorithmKind::debo;
  long long horizon = 1 << 18;
  int replications = 1;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  bool dump_slots = false;
  ParameterOverrides overrides;
  std::vector<PopulationEvent> events;
};

// A fully validated experiment: the environment, the oracle quantities the
// metrics need, and a canonical serialization for the metadata sidecar.
struct LoadedExperiment {
  ExperimentConfig experiment;
  Environment env;
  GapSummary gaps;                 // model-appropriate gap set
  OapSolution oracle;              // OAP optimum (homogeneous) or exact H-OAP
  std::optional<OapSolution> fair_oracle;  // fairness runs
  std::optional<GapSummary> fair_gaps;     // gaps of the transformed matrix
  std::string config_hash;         // content hash of the config file
  std::string resolved_json;       // resolved instance + config for the sidecar
};

// Parses and validates a structured-text (JSON) experiment configuration.
// Throws ConfigError with field-level messages on invalid input.
LoadedExperiment load_config(const std::string& path);

// As load_config but from a raw document string (tests, embedded configs).
LoadedExperiment load_config_text(const std::string& text);

// FNV-1a content hash, hex encoded.
std::string content_hash(const std::string& bytes);

}  // namespace offload

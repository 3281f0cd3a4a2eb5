#pragma once

#include <ostream>

#include "offload/env.hpp"
#include "offload/trace.hpp"

namespace offload {

// Independent per-user UCB1 over the K servers; rejected tasks feed reward 0
// into the running means.
RunTrace run_mucb(const Environment& env, long long horizon, Rng& rng,
                  std::ostream* slot_sink = nullptr);

// Independent per-user EXP3 with mixing parameter gamma; rewards are scaled
// to [0,1] by the model's upper bound before the importance-weighted update.
RunTrace run_mexp3(const Environment& env, long long horizon, double gamma, Rng& rng,
                   std::ostream* slot_sink = nullptr);

// Simplified non-collision decentralized baseline: epochs of uniform
// exploration followed by committing to the server with the highest estimated
// reward discounted by the observed admission rate there. This captures the
// cited model's dependence of reward on co-selection without replicating the
// original algorithm.
RunTrace run_dmnon0(const Environment& env, long long horizon, long long explore_len, Rng& rng,
                    std::ostream* slot_sink = nullptr);

}  // namespace offload

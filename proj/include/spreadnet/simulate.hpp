#pragma once

#include <cstdint>
#include <vector>

#include "spreadnet/geometry.hpp"
#include "spreadnet/strand.hpp"

namespace spreadnet {

struct SimConfig {
  int slots = 400;
  int burn_in = 200;
  int trials = 10;
  std::uint64_t seed = 1;
  double dt = 0.05;              // micro-slot as a fraction of one slot
  double initial_informed = 0.1;
  int max_restarts = 50;         // per trial, on pre-burn-in extinction

  void validate() const;
};

// Slotted SIS run of one strand on a realised graph.  Trajectories are the
// informed fraction at slots 0..slots per surviving trial attempt; trials
// that go extinct before the burn-in window ends are restarted on a fresh
// RNG stream and counted in `restarts`.
struct SimResult {
  StrandId strand;
  double alpha = 0.0;
  SimConfig config;
  std::vector<std::vector<double>> trajectories;  // [trial][slot]
  int restarts = 0;

  std::vector<double> mean_trajectory() const;
  std::vector<double> trial_steady_means() const;  // post-burn-in time average
};

// Per micro-slot dt: an informed node recovers with probability dt; an
// uninformed node with j informed strand-neighbours becomes informed with
// probability 1 - (1 - alpha dt)^j.  Updates are synchronous from the
// previous state.  A node's strand-neighbours are the nodes of the strand's
// layers within the node's own range, mirroring the degree definitions.
SimResult run_sis(const MultiLayerGraph& graph, const StrandId& strand,
                  double alpha, const SimConfig& config);

struct SteadyEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // across trials
};

SteadyEstimate estimate_steady_state(const SimResult& result);

}  // namespace spreadnet

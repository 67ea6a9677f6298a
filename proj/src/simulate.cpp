#include "spreadnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spreadnet/rng.hpp"

namespace spreadnet {

void SimConfig::validate() const {
  if (burn_in < 0 || slots <= burn_in)
    throw std::invalid_argument("sim config: need slots > burn_in >= 0");
  if (trials < 1) throw std::invalid_argument("sim config: trials must be >= 1");
  if (!(dt > 0.0) || !(dt <= 1.0))
    throw std::invalid_argument("sim config: dt must lie in (0, 1]");
  if (!(initial_informed >= 0.0) || !(initial_informed <= 1.0))
    throw std::invalid_argument("sim config: initial informed fraction must lie in [0, 1]");
  if (max_restarts < 0) throw std::invalid_argument("sim config: max_restarts must be >= 0");
}

std::vector<double> SimResult::mean_trajectory() const {
  std::vector<double> mean(trajectories.empty() ? 0 : trajectories.front().size(), 0.0);
  for (const auto& traj : trajectories)
    for (std::size_t s = 0; s < traj.size(); ++s) mean[s] += traj[s];
  for (auto& v : mean) v /= static_cast<double>(trajectories.size());
  return mean;
}

std::vector<double> SimResult::trial_steady_means() const {
  std::vector<double> means;
  means.reserve(trajectories.size());
  for (const auto& traj : trajectories) {
    double acc = 0.0;
    int n = 0;
    for (int s = config.burn_in + 1; s <= config.slots; ++s) {
      acc += traj[s];
      ++n;
    }
    means.push_back(acc / n);
  }
  return means;
}

namespace {

bool in_scope(const StrandId& strand, int layer) {
  switch (strand.kind) {
    case StrandId::Kind::Intra:
      return layer == strand.m;
    case StrandId::Kind::Inter:
      return layer == strand.m || layer == strand.n;
    case StrandId::Kind::Combined:
      return true;
  }
  return false;
}

}  // namespace

SimResult run_sis(const MultiLayerGraph& graph, const StrandId& strand,
                  double alpha, const SimConfig& config) {
  config.validate();
  strand.validate(graph.layer_count());
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("run_sis: alpha must lie in [0, 1]");

  // Participating nodes and a local id per node.
  std::vector<int> nodes;
  std::vector<int> local(graph.node_count(), -1);
  for (int u = 0; u < graph.node_count(); ++u) {
    if (!in_scope(strand, graph.layer_of(u))) continue;
    local[u] = static_cast<int>(nodes.size());
    nodes.push_back(u);
  }
  if (nodes.empty())
    throw std::invalid_argument("run_sis: no node participates in strand " + strand.label());
  const int count = static_cast<int>(nodes.size());

  // listeners[u] = nodes that carry u inside their own range; when u is
  // informed these are the nodes whose infection odds it raises.
  std::vector<std::vector<std::int32_t>> listeners(count);
  int max_in_degree = 0;
  for (int li = 0; li < count; ++li) {
    int in_degree = 0;
    for (const auto& arc : graph.arcs(nodes[li])) {
      if (!arc.within_own) continue;
      const int lv = local[arc.target];
      if (lv < 0) continue;
      listeners[lv].push_back(li);
      ++in_degree;
    }
    max_in_degree = std::max(max_in_degree, in_degree);
  }

  // infect_p[j]: probability that j informed neighbours inform a node in
  // one micro-slot.
  std::vector<double> infect_p(max_in_degree + 1);
  const double keep = 1.0 - alpha * config.dt;
  infect_p[0] = 0.0;
  double pow_keep = 1.0;
  for (int j = 1; j <= max_in_degree; ++j) {
    pow_keep *= keep;
    infect_p[j] = 1.0 - pow_keep;
  }

  const int steps_per_slot = std::max(1, static_cast<int>(std::lround(1.0 / config.dt)));

  SimResult result;
  result.strand = strand;
  result.alpha = alpha;
  result.config = config;
  result.trajectories.reserve(config.trials);

  std::vector<std::uint8_t> state(count), next(count);
  std::vector<std::int32_t> informed_near(count);

  for (int trial = 0; trial < config.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      // One stream per (trial, attempt), offset away from the stream ids the
      // geometry sampler uses for the same seed.
      rng::CounterRng gen(config.seed, 0x5349530000000000ULL +
                                           static_cast<std::uint64_t>(trial) * 64 +
                                           attempt + 1);

      int informed = 0;
      for (int i = 0; i < count; ++i) {
        state[i] = gen.bernoulli(config.initial_informed) ? 1 : 0;
        informed += state[i];
      }

      std::vector<double> traj(config.slots + 1);
      traj[0] = static_cast<double>(informed) / count;
      int death_slot = informed == 0 ? 0 : -1;

      for (int slot = 1; slot <= config.slots; ++slot) {
        for (int micro = 0; micro < steps_per_slot && informed > 0; ++micro) {
          std::fill(informed_near.begin(), informed_near.end(), 0);
          for (int i = 0; i < count; ++i) {
            if (!state[i]) continue;
            for (std::int32_t v : listeners[i]) ++informed_near[v];
          }
          informed = 0;
          for (int i = 0; i < count; ++i) {
            const double u = gen.uniform();
            if (state[i])
              next[i] = u < config.dt ? 0 : 1;
            else
              next[i] = u < infect_p[informed_near[i]] ? 1 : 0;
            informed += next[i];
          }
          state.swap(next);
        }
        traj[slot] = static_cast<double>(informed) / count;
        if (informed == 0 && death_slot < 0) death_slot = slot;
      }

      const bool died_early = death_slot >= 0 && death_slot <= config.burn_in;
      if (died_early && config.initial_informed > 0.0 && attempt < config.max_restarts) {
        ++result.restarts;
        continue;  // metastable estimate wants surviving runs
      }
      result.trajectories.push_back(std::move(traj));
      break;
    }
  }
  return result;
}

SteadyEstimate estimate_steady_state(const SimResult& result) {
  if (result.config.burn_in >= result.config.slots)
    throw std::invalid_argument("estimate_steady_state: empty post-burn-in window");
  if (result.trajectories.empty())
    throw std::invalid_argument("estimate_steady_state: no trials recorded");

  const std::vector<double> means = result.trial_steady_means();
  const int trials = static_cast<int>(means.size());
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= trials;

  double std_error = 0.0;
  if (trials > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    std_error = std::sqrt(ss / (trials - 1)) / std::sqrt(static_cast<double>(trials));
  }
  return {mean, std_error};
}

}  // namespace spreadnet

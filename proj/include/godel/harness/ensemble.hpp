#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "godel/asymptotics.hpp"
#include "godel/diffusion.hpp"

namespace godel::harness {

struct EnsembleOptions {
  int paths = 200;
  SimulationConfig sim;  ///< stream is overridden by the path index
  int threads = 0;       ///< 0 selects hardware concurrency
  double window_fraction = 0.5;
  bool keep_records = true;
};

struct AbortedPath {
  std::size_t index = 0;
  std::string reason;
};

struct EnsembleSummary {
  std::vector<std::size_t> indices;  ///< path index of each surviving path
  std::vector<PathRecord> records;   ///< empty unless keep_records
  std::vector<AsymptoticEstimate> estimates;
  std::vector<AbortedPath> aborted;
  long steps = 0;
  long retries = 0;
  int max_depth = 0;
  double wall_seconds = 0.0;
  int threads_used = 1;

  std::size_t configured() const { return indices.size() + aborted.size(); }
  double abort_fraction() const;
};

using InitialSampler = std::function<ReducedState(std::size_t path_index)>;

/// Runs the paths on worker threads. Path i draws from Philox stream i of the base seed,
/// so the result is independent of the schedule.
EnsembleSummary run_ensemble(const InitialSampler& initial, const EnsembleOptions& opt,
                             const ModelParams& mp);
EnsembleSummary run_ensemble(const ReducedState& initial, const EnsembleOptions& opt,
                             const ModelParams& mp);

}  // namespace godel::harness

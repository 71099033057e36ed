#include "godel/harness/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <optional>
#include <thread>

namespace godel::harness {

namespace {

struct Slot {
  std::optional<PathRecord> record;
  AsymptoticEstimate estimate;
  std::string failure;
};

}  // namespace

double EnsembleSummary::abort_fraction() const {
  const std::size_t n = configured();
  return n == 0 ? 0.0 : static_cast<double>(aborted.size()) / static_cast<double>(n);
}

EnsembleSummary run_ensemble(const InitialSampler& initial, const EnsembleOptions& opt,
                             const ModelParams& mp) {
  if (opt.paths < 1) throw InvalidParameter("ensemble: need at least one path");
  opt.sim.validate();
  mp.validate();

  const std::size_t n = static_cast<std::size_t>(opt.paths);
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, opt.paths);

  std::vector<Slot> slots(n);
  std::atomic<std::size_t> next{0};
  const auto t_start = std::chrono::steady_clock::now();

  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      Slot& slot = slots[i];
      try {
        SimulationConfig sim = opt.sim;
        sim.stream = i;
        PathRecord rec = simulate_path(initial(i), sim, mp);
        if (rec.aborted) {
          slot.failure = rec.abort_reason;
          continue;
        }
        slot.estimate = estimate_boundary(rec, mp, opt.window_fraction, 2);
        slot.record = std::move(rec);
      } catch (const std::exception& e) {
        slot.failure = e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  EnsembleSummary out;
  out.threads_used = threads;
  for (std::size_t i = 0; i < n; ++i) {
    Slot& slot = slots[i];
    if (!slot.record) {
      out.aborted.push_back({i, slot.failure});
      continue;
    }
    out.steps += slot.record->stats.steps;
    out.retries += slot.record->stats.retries;
    out.max_depth = std::max(out.max_depth, slot.record->stats.max_depth);
    out.indices.push_back(i);
    out.estimates.push_back(slot.estimate);
    if (opt.keep_records) out.records.push_back(std::move(*slot.record));
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

EnsembleSummary run_ensemble(const ReducedState& initial, const EnsembleOptions& opt,
                             const ModelParams& mp) {
  return run_ensemble([initial](std::size_t) { return initial; }, opt, mp);
}

}  // namespace godel::harness

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "transq/ensemble.hpp"
#include "transq/model.hpp"
#include "transq/rng.hpp"

namespace transq {

using State = std::vector<std::int64_t>;

/// Exact event-driven sampler for one model. Validates the model once, then
/// draws any number of paths.
///
/// Between events and schedule breakpoints every rate is constant, so the next
/// event is a single exponential race on the total rate. If the race would end
/// past the next breakpoint the clock moves to the breakpoint and the race is
/// redrawn (memorylessness makes this exact).
class PathSimulator {
 public:
  explicit PathSimulator(const NetworkModel& m);

  /// State of the right-continuous path at each sample time (ascending,
  /// within [0, horizon]). Throws ModelError on a negative or non-finite rate.
  [[nodiscard]] std::vector<State> sample(RngStream& rng, std::span<const double> sample_times) const;

  /// Same, but writes into out (sample_times.size() * dimension, row-major by time).
  void sample_into(RngStream& rng, std::span<const double> sample_times, std::span<double> out) const;

  [[nodiscard]] const NetworkModel& model() const noexcept { return model_; }

 private:
  NetworkModel model_;
  std::vector<double> breakpoints_;  // interior breakpoints, ascending
};

[[nodiscard]] std::vector<State> simulate_path(const NetworkModel& m, RngStream& rng,
                                               std::span<const double> sample_times);

/// Replications per work unit. Fixed so the merge order, and therefore every
/// bit of the result, does not depend on the worker count.
inline constexpr std::uint64_t kEnsembleBlock = 64;

/// N paths on streams 0..N-1 of `seed`. workers = 0 means one per hardware thread.
[[nodiscard]] EnsembleStats simulate_ensemble(const NetworkModel& m, std::uint64_t replications,
                                              std::uint64_t seed, std::span<const double> sample_times,
                                              unsigned workers = 0);

}  // namespace transq

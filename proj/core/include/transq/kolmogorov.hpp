#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "transq/closure.hpp"
#include "transq/moment_engine.hpp"
#include "transq/model.hpp"
#include "transq/simulator.hpp"

namespace transq {

/// The model's CTMC restricted to the box 0 <= x_j <= caps[j]. Transitions
/// that would leave the box are switched off, so probability mass is kept.
class TruncatedChain {
 public:
  static constexpr std::size_t kMaxStates = 2'000'000;

  /// Throws UsageError when the box has more than kMaxStates states, a cap is
  /// negative, or x0 lies outside the box.
  TruncatedChain(const NetworkModel& m, std::vector<std::int64_t> caps);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] State state(std::size_t index) const;
  [[nodiscard]] std::size_t index_of(std::span<const std::int64_t> x) const;

  /// Probability vectors at each grid time (ascending, within [0, horizon]).
  /// Throws NumericalError if total mass drifts from 1 by more than 1e-8.
  [[nodiscard]] std::vector<std::vector<double>> transient(std::span<const double> grid) const;

  [[nodiscard]] MomentPoint moments(std::span<const double> p) const;

  [[nodiscard]] const NetworkModel& model() const noexcept { return model_; }
  [[nodiscard]] const std::vector<std::int64_t>& caps() const noexcept { return caps_; }

 private:
  void advance(std::vector<double>& p, double from, double to) const;

  NetworkModel model_;
  std::vector<std::int64_t> caps_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

/// Mean and covariance of the truncated chain at the grid times, method "exact".
[[nodiscard]] MomentTrajectory exact_transient_moments(const NetworkModel& m,
                                                       std::span<const std::int64_t> caps,
                                                       std::span<const double> grid);

}  // namespace transq

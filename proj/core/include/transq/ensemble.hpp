#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "transq/linalg.hpp"
#include "transq/moment_engine.hpp"

namespace transq {

/// Welford-style running mean and co-moment matrix; mergeable (Chan et al.).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(Eigen::Index dimension = 0);

  void add(const Vector& x);
  void merge(const MomentAccumulator& other);

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  /// Unbiased (divisor N - 1). Requires count() >= 2.
  [[nodiscard]] Matrix covariance() const;

 private:
  std::uint64_t count_ = 0;
  Vector mean_;
  Matrix comoment_;
};

/// Empirical moments of N replications at fixed sample times.
struct EnsembleStats {
  std::vector<double> sample_times;
  std::vector<Vector> mean;
  /// Absent when fewer than two replications were run.
  std::optional<std::vector<Matrix>> cov;
  std::uint64_t replications = 0;

  /// Samples tagged "simulate"; cov is an empty matrix when absent.
  [[nodiscard]] MomentTrajectory to_trajectory() const;
};

}  // namespace transq

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transq/closure.hpp"
#include "transq/linalg.hpp"
#include "transq/model.hpp"

namespace transq {

enum class Method {
  Fluid,        // dX/dt = F(t, X), no covariance
  Adjusted,     // Gaussian-closed mean and Lyapunov covariance, solved jointly
  MeasureZero,  // fluid mean, Lyapunov covariance with pointwise dF at the fluid path
};

[[nodiscard]] std::string_view method_name(Method m) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;

struct SolverConfig {
  double dt = 0.01;
  Method method = Method::Adjusted;
  /// Reporting times, strictly increasing, inside [0, horizon].
  std::vector<double> sample_times;
  std::size_t quad_order = GaussianClosure::kDefaultQuadOrder;
  /// Start from this point at t = 0 instead of (x0, 0).
  std::optional<MomentPoint> initial;
};

struct MomentSample {
  double t;
  Vector mean;
  Matrix cov;
};

struct MomentTrajectory {
  std::string method;
  std::vector<MomentSample> samples;
  /// Conditioning notes, e.g. covariance eigenvalues well below zero.
  std::vector<std::string> warnings;
};

/// Classical RK4 with fixed steps of at most cfg.dt. Steps never straddle a
/// schedule breakpoint or a sample time, so every stage of a step sees the
/// same parameter values. Throws UsageError for a bad config or model and
/// DivergenceError when the state stops being finite.
[[nodiscard]] MomentTrajectory solve_fluid(const NetworkModel& m, const SolverConfig& cfg);
[[nodiscard]] MomentTrajectory solve_adjusted(const NetworkModel& m, const SolverConfig& cfg);
[[nodiscard]] MomentTrajectory solve_measure_zero(const NetworkModel& m, const SolverConfig& cfg);

/// Dispatches on cfg.method.
[[nodiscard]] MomentTrajectory solve(const NetworkModel& m, const SolverConfig& cfg);

/// Evenly spaced grid from t0 to t1 inclusive (t1 is kept when it lands within
/// 1e-9 of a step).
[[nodiscard]] std::vector<double> make_grid(double t0, double t1, double step);

}  // namespace transq

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "transq/linalg.hpp"
#include "transq/schedule.hpp"

namespace transq {

// Spatial shapes a rate may take. Every model in this library is a sum of
// jump-vector-weighted terms coefficient(t) * kernel(x).
namespace kernel {

struct Constant {
  friend bool operator==(const Constant&, const Constant&) = default;
};

// sum_j coeffs[j] * x_j
struct Linear {
  std::vector<double> coeffs;
  friend bool operator==(const Linear&, const Linear&) = default;
};

// min(x_j, n_t)
struct MinThreshold {
  std::size_t index;
  TimeSchedule threshold;
  friend bool operator==(const MinThreshold&, const MinThreshold&) = default;
};

// (x_j - n_t)^+
struct PosPart {
  std::size_t index;
  TimeSchedule threshold;
  friend bool operator==(const PosPart&, const PosPart&) = default;
};

// min(x_j, x_k)
struct MinPair {
  std::size_t first;
  std::size_t second;
  friend bool operator==(const MinPair&, const MinPair&) = default;
};

// min(x_j, (n_t - x_k)^+): x_j competes for whatever capacity x_k leaves.
struct CappedResidual {
  std::size_t index;
  std::size_t residual_index;
  TimeSchedule threshold;
  friend bool operator==(const CappedResidual&, const CappedResidual&) = default;
};

}  // namespace kernel

using RateKernel = std::variant<kernel::Constant, kernel::Linear, kernel::MinThreshold,
                                kernel::PosPart, kernel::MinPair, kernel::CappedResidual>;

struct RateTerm {
  TimeSchedule coefficient;
  RateKernel kernel;
  friend bool operator==(const RateTerm&, const RateTerm&) = default;
};

struct Transition {
  std::vector<int> jump;
  RateTerm rate;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// X(t) = x0 + sum_i jump_i * Y_i( int_0^t rate_i(s, X(s)) ds ), Y_i unit Poisson.
struct NetworkModel {
  std::size_t dimension = 0;
  std::vector<Transition> transitions;
  std::vector<std::int64_t> initial_state;
  double horizon = 0.0;
  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

[[nodiscard]] std::string_view kernel_name(const RateKernel& k);

/// Value of the kernel's time-varying threshold at t, or 0 for kernels without one.
[[nodiscard]] double kernel_threshold(const RateKernel& k, double t);

/// kernel(x) with the threshold already resolved. Hot path of the simulator.
[[nodiscard]] double kernel_value(const RateKernel& k, double threshold, std::span<const double> x);

/// Global Lipschitz constant of the kernel in the Euclidean norm.
[[nodiscard]] double kernel_lipschitz(const RateKernel& k);

/// Indices of x the kernel reads.
[[nodiscard]] std::vector<std::size_t> kernel_indices(const RateKernel& k);

/// coefficient(t) * kernel(x), evaluated literally. Throws UsageError for a bad index.
[[nodiscard]] double eval_rate(const NetworkModel& m, std::size_t i, double t,
                               std::span<const double> x);

/// F(t, x) = sum_i jump_i * rate_i(t, x).
[[nodiscard]] Vector drift(const NetworkModel& m, double t, std::span<const double> x);

/// One-sided gradient of rate_i at x. At a kink the min-active branch wins:
/// d/dx_j min(x_j, n) = 1{x_j <= n}, d/dx_j (x_j - n)^+ = 1{x_j > n}.
[[nodiscard]] Vector rate_gradient(const NetworkModel& m, std::size_t i, double t,
                                   std::span<const double> x);

/// dF/dx with the one-sided convention of rate_gradient.
[[nodiscard]] Matrix drift_jacobian(const NetworkModel& m, double t, std::span<const double> x);

/// Every schedule breakpoint of the model strictly inside (from, to), sorted, unique.
[[nodiscard]] std::vector<double> breakpoints_between(const NetworkModel& m, double from,
                                                      double to);

struct Violation {
  enum class Kind { Structure, Coverage, NegativeCoefficient, Index, Jump };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Per-transition Lipschitz bound of the kernel. Every variant is a
  // composition of min, max and affine maps, so these are always finite.
  std::vector<double> lipschitz_bounds;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  [[nodiscard]] std::string summary() const;
};

/// Structural check of the model. Never throws.
[[nodiscard]] ValidationReport validate_model(const NetworkModel& m) noexcept;

/// Throws UsageError with the report summary when the model is not valid.
void require_valid(const NetworkModel& m);

}  // namespace transq

#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace transq {

/// Piecewise-constant, right-continuous function of time.
///
/// Interval k is [breakpoints[k], breakpoints[k+1]); the last value holds from
/// the last breakpoint until `end()`. `end()` defaults to +infinity and only
/// matters for coverage checks against a model horizon.
class TimeSchedule {
 public:
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  /// Throws UsageError unless breakpoints start at 0, strictly increase, match
  /// `values` in length, and `end` lies at or beyond the last breakpoint.
  TimeSchedule(std::vector<double> breakpoints, std::vector<double> values,
               double end = kUnbounded);

  static TimeSchedule constant(double value, double end = kUnbounded);

  /// Cycles through `cycle` every `period` time units starting at t = 0, with
  /// breakpoints laid down up to (not including) `end`.
  static TimeSchedule alternating(std::vector<double> cycle, double period, double end);

  /// Pointwise combination on the union of both breakpoint sets. The result
  /// ends where the shorter of the two ends.
  static TimeSchedule combine(const TimeSchedule& a, const TimeSchedule& b,
                              const std::function<double(double, double)>& op);

  /// Value at time t. Throws std::domain_error for t < 0.
  [[nodiscard]] double at(double t) const;

  /// Index of the interval containing t (t >= 0).
  [[nodiscard]] std::size_t segment_index(double t) const;

  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] double end() const noexcept { return end_; }
  [[nodiscard]] bool covers(double horizon) const noexcept { return end_ >= horizon; }
  [[nodiscard]] bool is_constant() const noexcept { return values_.size() == 1; }
  [[nodiscard]] double min_value() const;

  friend bool operator==(const TimeSchedule&, const TimeSchedule&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double end_;
};

}  // namespace transq

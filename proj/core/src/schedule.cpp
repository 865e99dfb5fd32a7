#include "transq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "transq/errors.hpp"

namespace transq {

TimeSchedule::TimeSchedule(std::vector<double> breakpoints, std::vector<double> values, double end)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), end_(end) {
  if (breakpoints_.empty()) {
    throw UsageError("schedule: breakpoints must not be empty");
  }
  if (breakpoints_.size() != values_.size()) {
    throw UsageError("schedule: " + std::to_string(breakpoints_.size()) + " breakpoints but " +
                     std::to_string(values_.size()) + " values");
  }
  if (breakpoints_.front() != 0.0) {
    throw UsageError("schedule: first breakpoint must be 0");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1]) || !std::isfinite(breakpoints_[k])) {
      throw UsageError("schedule: breakpoints must be finite and strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw UsageError("schedule: values must be finite");
    }
  }
  if (std::isnan(end_) || end_ < breakpoints_.back()) {
    throw UsageError("schedule: end precedes the last breakpoint");
  }
}

TimeSchedule TimeSchedule::constant(double value, double end) {
  return TimeSchedule({0.0}, {value}, end);
}

TimeSchedule TimeSchedule::alternating(std::vector<double> cycle, double period, double end) {
  if (cycle.empty() || !(period > 0.0) || !(end > 0.0)) {
    throw UsageError("alternating schedule: need a non-empty cycle, period > 0 and end > 0");
  }
  std::vector<double> bps;
  std::vector<double> vals;
  for (std::size_t k = 0;; ++k) {
    const double b = static_cast<double>(k) * period;
    if (k > 0 && b >= end) {
      break;
    }
    bps.push_back(b);
    vals.push_back(cycle[k % cycle.size()]);
  }
  return TimeSchedule(std::move(bps), std::move(vals), end);
}

TimeSchedule TimeSchedule::combine(const TimeSchedule& a, const TimeSchedule& b,
                                   const std::function<double(double, double)>& op) {
  std::vector<double> bps;
  bps.reserve(a.breakpoints_.size() + b.breakpoints_.size());
  std::merge(a.breakpoints_.begin(), a.breakpoints_.end(), b.breakpoints_.begin(),
             b.breakpoints_.end(), std::back_inserter(bps));
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<double> vals;
  vals.reserve(bps.size());
  for (double t : bps) {
    vals.push_back(op(a.at(t), b.at(t)));
  }
  return TimeSchedule(std::move(bps), std::move(vals), std::min(a.end_, b.end_));
}

std::size_t TimeSchedule::segment_index(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1;
}

double TimeSchedule::at(double t) const {
  if (!(t >= 0.0)) {
    throw std::domain_error("schedule evaluated at negative time " + std::to_string(t));
  }
  return values_[segment_index(t)];
}

double TimeSchedule::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

}  // namespace transq

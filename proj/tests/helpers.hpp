#pragma once

#include <cmath>
#include <vector>

#include "transq/model.hpp"

namespace transq::test {

// M/M/inf: Poisson arrivals at rate lambda, each customer served at rate mu.
inline NetworkModel mm_inf(double lambda, double mu, double horizon = 10.0, std::int64_t x0 = 0) {
  NetworkModel m;
  m.dimension = 1;
  m.horizon = horizon;
  m.initial_state = {x0};
  m.transitions = {
      {{1}, {TimeSchedule::constant(lambda), kernel::Constant{}}},
      {{-1}, {TimeSchedule::constant(mu), kernel::Linear{{1.0}}}},
  };
  return m;
}

// M/M/c with c servers (min kernel), optionally time-varying arrivals.
inline NetworkModel mm_c(TimeSchedule lambda, double mu, double servers, double horizon, std::int64_t x0 = 0) {
  NetworkModel m;
  m.dimension = 1;
  m.horizon = horizon;
  m.initial_state = {x0};
  m.transitions = {
      {{1}, {std::move(lambda), kernel::Constant{}}},
      {{-1}, {TimeSchedule::constant(mu), kernel::MinThreshold{0, TimeSchedule::constant(servers)}}},
  };
  return m;
}

// Transient M/M/inf mean from x0 = 0: lambda/mu (1 - e^{-mu t}).
inline double mm_inf_mean(double lambda, double mu, double t) { return lambda / mu * (1.0 - std::exp(-mu * t)); }

}  // namespace transq::test

#include "transq/model_zoo.hpp"

#include <string>

#include "transq/errors.hpp"
#include "transq/moment_engine.hpp"

namespace transq {

namespace {

void require_rate(const TimeSchedule& s, const char* name) {
  if (s.min_value() < 0.0) {
    throw UsageError(std::string(name) + " must be non-negative");
  }
}

void require_probability(const TimeSchedule& s, const char* name) {
  for (double v : s.values()) {
    if (v < 0.0 || v > 1.0) {
      throw UsageError(std::string(name) + " must lie in [0, 1]");
    }
  }
}

TimeSchedule product(const TimeSchedule& a, const TimeSchedule& b) {
  return TimeSchedule::combine(a, b, [](double x, double y) { return x * y; });
}

TimeSchedule complement_product(const TimeSchedule& rate, const TimeSchedule& prob) {
  return TimeSchedule::combine(rate, prob, [](double x, double q) { return x * (1.0 - q); });
}

std::vector<double> unit(std::size_t d, std::size_t j) {
  std::vector<double> c(d, 0.0);
  c[j] = 1.0;
  return c;
}

NetworkModel finish(NetworkModel m) {
  require_valid(m);
  return m;
}

}  // namespace

NetworkModel build_retrial(const RetrialParams& p, double horizon) {
  require_rate(p.servers, "servers");
  require_rate(p.arrival, "arrival");
  require_rate(p.service, "service");
  require_rate(p.retrial, "retrial");
  require_rate(p.abandonment, "abandonment");
  require_probability(p.leave_prob, "leave_prob");

  NetworkModel m;
  m.dimension = 2;
  m.horizon = horizon;
  m.initial_state = {p.x0[0], p.x0[1]};
  m.transitions = {
      {{1, 0}, {p.arrival, kernel::Constant{}}},
      {{1, -1}, {p.retrial, kernel::Linear{unit(2, 1)}}},
      {{-1, 0}, {p.service, kernel::MinThreshold{0, p.servers}}},
      {{-1, 1}, {complement_product(p.abandonment, p.leave_prob), kernel::PosPart{0, p.servers}}},
      {{-1, 0}, {product(p.abandonment, p.leave_prob), kernel::PosPart{0, p.servers}}},
  };
  return finish(std::move(m));
}

NetworkModel build_priority(const PriorityParams& p, double horizon) {
  require_rate(p.servers, "servers");
  require_rate(p.arrival1, "arrival1");
  require_rate(p.arrival2, "arrival2");
  require_rate(p.service1, "service1");
  require_rate(p.service2, "service2");

  NetworkModel m;
  m.dimension = 2;
  m.horizon = horizon;
  m.initial_state = {p.x0[0], p.x0[1]};
  m.transitions = {
      {{1, 0}, {p.arrival1, kernel::Constant{}}},
      {{0, 1}, {p.arrival2, kernel::Constant{}}},
      {{-1, 0}, {p.service1, kernel::MinThreshold{0, p.servers}}},
      {{0, -1}, {p.service2, kernel::CappedResidual{1, 0, p.servers}}},
  };
  return finish(std::move(m));
}

NetworkModel build_peer(const PeerParams& p, double horizon) {
  require_rate(p.arrival, "arrival");
  require_rate(p.service, "service");
  require_rate(p.session, "session");
  require_rate(p.wake, "wake");
  require_probability(p.idle_prob, "idle_prob");

  NetworkModel m;
  m.dimension = 3;
  m.horizon = horizon;
  m.initial_state = {p.x0[0], p.x0[1], p.x0[2]};
  m.transitions = {
      {{1, 0, 0}, {p.arrival, kernel::Constant{}}},
      {{-1, 1, 0}, {p.service, kernel::MinPair{0, 1}}},
      {{0, -1, 1}, {product(p.session, p.idle_prob), kernel::Linear{unit(3, 1)}}},
      {{0, -1, 0}, {complement_product(p.session, p.idle_prob), kernel::Linear{unit(3, 1)}}},
      {{0, 1, -1}, {p.wake, kernel::Linear{unit(3, 2)}}},
  };
  return finish(std::move(m));
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {1, 50, 40, 80, 1, 0.2, 2.0, 0.5, 2, 20},   {2, 50, 40, 60, 1, 0.2, 2.0, 0.5, 2, 20},
      {3, 100, 80, 120, 1, 0.2, 2.0, 0.7, 2, 20}, {4, 100, 90, 110, 1, 0.2, 2.0, 0.7, 2, 20},
      {5, 50, 40, 80, 1, 0.2, 1.5, 0.7, 2, 20},   {6, 50, 40, 60, 1, 0.2, 1.5, 0.7, 2, 20},
      {7, 50, 45, 55, 1, 0.2, 2.0, 0.5, 2, 20},   {8, 100, 95, 105, 1, 0.2, 2.0, 0.5, 2, 20},
      {9, 150, 140, 160, 1, 0.2, 2.0, 0.5, 2, 20}, {10, 150, 100, 190, 1, 0.2, 2.0, 0.5, 2, 20},
  };
  return rows;
}

RetrialParams table1_params(int id) {
  const auto& rows = table1_rows();
  if (id < 1 || id > static_cast<int>(rows.size())) {
    throw UsageError("preset id " + std::to_string(id) + " out of range [1, 10]");
  }
  const Table1Row& r = rows[static_cast<std::size_t>(id - 1)];
  RetrialParams p;
  p.servers = TimeSchedule::constant(r.servers);
  p.arrival = TimeSchedule::alternating({r.arrival_low, r.arrival_high}, r.alternation, r.horizon);
  p.service = TimeSchedule::constant(r.service);
  p.retrial = TimeSchedule::constant(r.retrial);
  p.abandonment = TimeSchedule::constant(r.abandonment);
  p.leave_prob = TimeSchedule::constant(r.leave_prob);
  return p;
}

Preset table1_preset(int id) {
  const RetrialParams p = table1_params(id);
  const double horizon = table1_rows()[static_cast<std::size_t>(id - 1)].horizon;
  return {build_retrial(p, horizon), make_grid(6.0, 15.0, 1.0)};
}

Preset priority_study() {
  PriorityParams p;
  p.servers = TimeSchedule::constant(200);
  p.arrival1 = TimeSchedule::alternating({120, 200}, 2.0, 20.0);
  p.arrival2 = TimeSchedule::constant(20);
  p.service1 = TimeSchedule::constant(1);
  p.service2 = TimeSchedule::constant(1);
  return {build_priority(p, 20.0), make_grid(4.0, 20.0, 1.0)};
}

Preset peer_study() {
  PeerParams p;
  p.arrival = TimeSchedule::constant(400);
  p.service = TimeSchedule::constant(2);
  p.session = TimeSchedule::constant(0.3);
  p.wake = TimeSchedule::constant(0.5);
  p.idle_prob = TimeSchedule::constant(0.9);
  p.x0 = {0, 10, 0};
  return {build_peer(p, 5.0), make_grid(0.0, 5.0, 0.25)};
}

}  // namespace transq

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "transq/model.hpp"
#include "transq/schedule.hpp"

namespace transq {

/// Multiserver queue with abandonment into a retrial orbit.
/// x1 = customers at the service node, x2 = customers in the orbit.
struct RetrialParams {
  TimeSchedule servers = TimeSchedule::constant(50);
  TimeSchedule arrival = TimeSchedule::constant(0);       // lambda
  TimeSchedule service = TimeSchedule::constant(1);       // mu1, per busy server
  TimeSchedule retrial = TimeSchedule::constant(0.2);     // mu2, per orbiting customer
  TimeSchedule abandonment = TimeSchedule::constant(2);   // beta, per waiting customer
  TimeSchedule leave_prob = TimeSchedule::constant(0.5);  // p: abandoning customer leaves for good
  std::array<std::int64_t, 2> x0{0, 0};
};

/// Two-class preemptive priority queue. x1 = class 1 (high), x2 = class 2.
struct PriorityParams {
  TimeSchedule servers = TimeSchedule::constant(200);
  TimeSchedule arrival1 = TimeSchedule::constant(0);
  TimeSchedule arrival2 = TimeSchedule::constant(0);
  TimeSchedule service1 = TimeSchedule::constant(1);
  TimeSchedule service2 = TimeSchedule::constant(1);
  std::array<std::int64_t, 2> x0{0, 0};
};

/// Customers become servers after service. x1 = customers, x2 = active
/// servers, x3 = inactive servers.
struct PeerParams {
  TimeSchedule arrival = TimeSchedule::constant(0);     // lambda
  TimeSchedule service = TimeSchedule::constant(1);     // mu
  TimeSchedule session = TimeSchedule::constant(0);     // theta: active server stops
  TimeSchedule wake = TimeSchedule::constant(0);        // gamma: inactive server returns
  TimeSchedule idle_prob = TimeSchedule::constant(0);   // p: stopping server goes inactive
  std::array<std::int64_t, 3> x0{0, 0, 0};
};

/// Transition order: arrival, retrial, service, abandon-to-orbit, abandon-and-leave.
[[nodiscard]] NetworkModel build_retrial(const RetrialParams& p, double horizon);

/// Transition order: class-1 arrival, class-2 arrival, class-1 service, class-2 service.
[[nodiscard]] NetworkModel build_priority(const PriorityParams& p, double horizon);

/// Transition order: arrival, service, go inactive, leave, wake up.
[[nodiscard]] NetworkModel build_peer(const PeerParams& p, double horizon);

/// One row of the retrial experiment table.
struct Table1Row {
  int id;
  double servers;
  double arrival_low;   // first value of the alternation, in force from t = 0
  double arrival_high;
  double service;
  double retrial;
  double abandonment;
  double leave_prob;
  double alternation;   // time each arrival rate lasts
  double horizon;
};

struct Preset {
  NetworkModel model;
  std::vector<double> grid;
};

[[nodiscard]] const std::vector<Table1Row>& table1_rows();
[[nodiscard]] RetrialParams table1_params(int id);
/// Retrial model for experiment `id` (1..10), x0 = (0, 0), reported at t = 6..15.
/// Throws UsageError for any other id.
[[nodiscard]] Preset table1_preset(int id);

/// n = 200, class-1 arrivals alternating 120/200 every 2 units, class-2
/// arrivals 20, unit service rates, T = 20, reported at t = 4..20.
[[nodiscard]] Preset priority_study();

/// lambda = 400, mu = 2, theta = 0.3, gamma = 0.5, p = 0.9, x0 = (0, 10, 0),
/// T = 5, reported every 0.25.
[[nodiscard]] Preset peer_study();

}  // namespace transq

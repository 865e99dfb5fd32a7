#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "transq/errors.hpp"
#include "transq/kolmogorov.hpp"
#include "transq/model_zoo.hpp"

using namespace transq;

TEST_CASE("birth-death with unit rates", "[kolmogorov]") {
  const NetworkModel m = test::mm_inf(1, 1, 2);
  const std::vector<std::int64_t> caps{50};
  const MomentTrajectory tr = exact_transient_moments(m, caps, std::vector<double>{1.0});
  CHECK(tr.method == "exact");
  const double want = 1 - std::exp(-1.0);
  CHECK(std::abs(tr.samples[0].mean[0] - want) < 1e-10);
  CHECK(std::abs(tr.samples[0].cov(0, 0) - want) < 1e-10);
}

TEST_CASE("time-varying M/M/inf matches the linear mean ODE", "[kolmogorov]") {
  NetworkModel m = test::mm_inf(0, 0.5, 6);
  m.transitions[0].rate.coefficient = TimeSchedule::alternating({3, 8}, 1.5, 6);
  const std::vector<double> grid{0.5, 1.5, 2.0, 4.5, 6.0};
  const MomentTrajectory tr = exact_transient_moments(m, std::vector<std::int64_t>{80}, grid);
  // m' = lambda(t) - mu m, piecewise in closed form; Poisson so Var = mean.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0, t = 0;
    while (t < grid[i]) {
      const double lam = m.transitions[0].rate.coefficient.at(t);
      const double next = std::min(grid[i], std::floor(t / 1.5 + 1) * 1.5);
      const double h = next - t;
      mean = lam / 0.5 + (mean - lam / 0.5) * std::exp(-0.5 * h);
      t = next;
    }
    CHECK(std::abs(tr.samples[i].mean[0] - mean) < 1e-9);
    CHECK(std::abs(tr.samples[i].cov(0, 0) - mean) < 1e-9);
  }
}

TEST_CASE("zero-rate model is a point mass", "[kolmogorov]") {
  const NetworkModel m = test::mm_inf(0, 0, 2, 3);
  const MomentTrajectory tr = exact_transient_moments(m, std::vector<std::int64_t>{10}, std::vector<double>{0, 2});
  for (const auto& s : tr.samples) {
    CHECK(s.mean[0] == 3.0);
    CHECK(s.cov(0, 0) == 0.0);
  }
}

TEST_CASE("truncated chain conserves mass and gives PSD covariance", "[kolmogorov]") {
  RetrialParams p;
  p.servers = TimeSchedule::constant(3);
  p.arrival = TimeSchedule::alternating({2, 4}, 2, 10);
  const NetworkModel m = build_retrial(p, 10);
  const TruncatedChain chain(m, {12, 12});
  CHECK(chain.size() == 169);
  const std::vector<double> grid = make_grid(1, 10, 1);
  const auto dists = chain.transient(grid);
  for (const auto& d : dists) {
    double mass = 0;
    for (double q : d) {
      CHECK(q >= -1e-15);
      mass += q;
    }
    CHECK(std::abs(mass - 1) < 1e-10);
    const MomentPoint mp = chain.moments(d);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(mp.cov);
    CHECK(es.eigenvalues().minCoeff() >= 0.0);
  }
  const State s = chain.state(chain.index_of(std::vector<std::int64_t>{5, 7}));
  CHECK(s == State{5, 7});
}

TEST_CASE("state-count guard and box checks", "[kolmogorov]") {
  const NetworkModel m = table1_preset(7).model;
  CHECK_THROWS_AS(TruncatedChain(m, {2000, 2000}), UsageError);
  CHECK_THROWS_AS(TruncatedChain(m, {10}), UsageError);
  NetworkModel start_high = m;
  start_high.initial_state = {20, 0};
  CHECK_THROWS_AS(TruncatedChain(start_high, {10, 10}), UsageError);
}

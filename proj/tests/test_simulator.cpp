#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "transq/errors.hpp"
#include "transq/model_zoo.hpp"
#include "transq/simulator.hpp"

using namespace transq;

TEST_CASE("zero-rate model gives a constant path", "[simulator]") {
  const NetworkModel m = test::mm_inf(0, 0, 5, 4);
  RngStream rng(1, 0);
  const auto path = simulate_path(m, rng, std::vector<double>{0, 1, 2.5, 5});
  for (const State& s : path) {
    CHECK(s == State{4});
  }
}

TEST_CASE("same seed and stream give the same path", "[simulator]") {
  const Preset p = table1_preset(7);
  RngStream a(99, 3), b(99, 3), c(99, 4);
  const auto pa = simulate_path(p.model, a, p.grid);
  CHECK(pa == simulate_path(p.model, b, p.grid));
  CHECK(pa != simulate_path(p.model, c, p.grid));
}

TEST_CASE("paths respect jumps and the orthant", "[simulator]") {
  const Preset p = table1_preset(1);
  const std::vector<double> grid = make_grid(0, 20, 0.05);
  for (std::uint64_t s = 0; s < 50; ++s) {
    RngStream rng(5, s);
    for (const State& x : simulate_path(p.model, rng, grid)) {
      CHECK(x[0] >= 0);
      CHECK(x[1] >= 0);
    }
  }
}

TEST_CASE("M/M/inf ensemble mean is unbiased", "[simulator]") {
  const NetworkModel m = test::mm_inf(2, 1, 5);
  const std::vector<double> times{0.25, 0.5, 1, 2, 3, 5};
  const std::uint64_t n = 5000;
  const EnsembleStats st = simulate_ensemble(m, n, 2024, times, 4);
  REQUIRE(st.cov.has_value());
  CHECK(st.replications == n);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double mean = test::mm_inf_mean(2, 1, times[i]);
    const double se = std::sqrt(mean / static_cast<double>(n));
    CHECK(std::abs(st.mean[i][0] - mean) < 3 * se);
  }
  CHECK(std::abs(st.mean[2][0] - 1.264) < 0.05);
}

TEST_CASE("ensemble is independent of worker count", "[simulator]") {
  const Preset p = table1_preset(7);
  const EnsembleStats one = simulate_ensemble(p.model, 300, 11, p.grid, 1);
  const EnsembleStats eight = simulate_ensemble(p.model, 300, 11, p.grid, 8);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    CHECK(one.mean[i] == eight.mean[i]);
    CHECK((*one.cov)[i] == (*eight.cov)[i]);
  }
}

TEST_CASE("single replication has no covariance", "[simulator]") {
  const Preset p = table1_preset(7);
  const EnsembleStats st = simulate_ensemble(p.model, 1, 8, p.grid, 2);
  CHECK_FALSE(st.cov.has_value());
  RngStream rng(8, 0);
  const auto path = simulate_path(p.model, rng, p.grid);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    CHECK(st.mean[i][0] == static_cast<double>(path[i][0]));
    CHECK(st.mean[i][1] == static_cast<double>(path[i][1]));
  }
  CHECK_THROWS_AS(simulate_ensemble(p.model, 0, 1, p.grid, 1), UsageError);
}

TEST_CASE("negative rates are model errors", "[simulator]") {
  NetworkModel m;
  m.dimension = 1;
  m.horizon = 1;
  m.initial_state = {1};
  m.transitions = {{{1}, {TimeSchedule::constant(1), kernel::Linear{{-1.0}}}}};
  RngStream rng(1, 0);
  CHECK_THROWS_AS(simulate_path(m, rng, std::vector<double>{1}), ModelError);
}

TEST_CASE("sample times are checked", "[simulator]") {
  const NetworkModel m = test::mm_inf(1, 1, 2);
  RngStream rng(1, 0);
  CHECK_THROWS_AS(simulate_path(m, rng, std::vector<double>{1, 0.5}), UsageError);
  CHECK_THROWS_AS(simulate_path(m, rng, std::vector<double>{3}), UsageError);
}

TEST_CASE("time-varying arrivals follow the schedule", "[simulator]") {
  // Pure arrivals at rate 10 on [0,1) and 0 afterwards: count at t=1 is Poisson(10), frozen after.
  NetworkModel m;
  m.dimension = 1;
  m.horizon = 3;
  m.initial_state = {0};
  m.transitions = {{{1}, {TimeSchedule({0, 1}, {10, 0}), kernel::Constant{}}}};
  const EnsembleStats st = simulate_ensemble(m, 20000, 3, std::vector<double>{0.5, 1, 3}, 2);
  CHECK(std::abs(st.mean[0][0] - 5) < 3 * std::sqrt(5.0 / 20000));
  CHECK(std::abs(st.mean[1][0] - 10) < 3 * std::sqrt(10.0 / 20000));
  CHECK(st.mean[2][0] == st.mean[1][0]);
  CHECK(std::abs((*st.cov)[1](0, 0) - 10) < 0.5);
}

TEST_CASE("moment accumulator merge equals sequential accumulation", "[simulator]") {
  RngStream rng(4, 0);
  MomentAccumulator all(2), left(2), right(2);
  for (int i = 0; i < 1000; ++i) {
    Vector x(2);
    x << rng.uniform() * 10, rng.exponential(1.0);
    all.add(x);
    (i < 377 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == 1000);
  CHECK((left.mean() - all.mean()).norm() < 1e-12);
  CHECK((left.covariance() - all.covariance()).norm() < 1e-10);
}

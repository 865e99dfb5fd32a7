#include <catch_amalgamated.hpp>

#include <cmath>

#include "transq/diff_report.hpp"
#include "transq/errors.hpp"
#include "transq/model_zoo.hpp"
#include "transq/moment_engine.hpp"
#include "transq/results_csv.hpp"
#include "transq/simulator.hpp"

using namespace transq;

namespace {

ResultBlock adjusted_block(const Preset& p) {
  SolverConfig c;
  c.sample_times = p.grid;
  return to_block(solve_adjusted(p.model, c));
}

}  // namespace

TEST_CASE("doubles print in shortest round-trip form", "[results]") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-1.5e-300) == "-1.5e-300");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("stat names", "[results]") {
  CHECK(stat_names(2, true) == std::vector<std::string>{"mean_0", "mean_1", "cov_0_0", "cov_0_1", "cov_1_1"});
  CHECK(stat_names(3, false) == std::vector<std::string>{"mean_0", "mean_1", "mean_2"});
}

TEST_CASE("results CSV round trips", "[results]") {
  const Preset p = table1_preset(7);
  const ResultBlock adj = adjusted_block(p);
  const ResultBlock sim = to_block(simulate_ensemble(p.model, 200, 5, p.grid, 2));
  const ResultBlock single = to_block(simulate_ensemble(p.model, 1, 5, p.grid, 1));
  CHECK(sim.replications == std::optional<std::uint64_t>{200});
  CHECK_FALSE(single.has_cov());

  const std::vector<ResultBlock> blocks{adj, sim, single};
  const std::string text = emit_results_csv(blocks);
  CHECK(text.rfind("t,method,stat,value,N\n", 0) == 0);
  const auto parsed = parse_results_csv(text);
  REQUIRE(parsed.size() == 2);  // the single-path block shares the "simulate" name
  CHECK(parsed[0] == adj);

  const auto one = parse_results_csv(emit_block_csv(adj));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == adj);
  const auto lone = parse_results_csv(emit_block_csv(single));
  REQUIRE(lone.size() == 1);
  CHECK(lone[0] == single);
}

TEST_CASE("malformed CSV is rejected", "[results]") {
  CHECK_THROWS_AS(parse_results_csv("a,b,c\n"), UsageError);
  CHECK_THROWS_AS(parse_results_csv("t,method,stat,value\n0,adjusted,mean_1,abc\n"), UsageError);
}

TEST_CASE("difference report", "[results]") {
  const Preset p = table1_preset(7);
  const ResultBlock adj = adjusted_block(p);
  const ResultBlock sim = to_block(simulate_ensemble(p.model, 300, 9, p.grid, 2));

  const DiffReport self = diff_blocks(adj, adj, "preset-7");
  for (const DiffRow& r : self.rows) {
    CHECK(r.difference == 0.0);
  }
  const DiffReport fwd = diff_blocks(adj, sim, "preset-7");
  const DiffReport back = diff_blocks(sim, adj, "preset-7");
  REQUIRE(fwd.rows.size() == back.rows.size());
  CHECK(fwd.rows.size() == p.grid.size() * 5);
  for (std::size_t i = 0; i < fwd.rows.size(); ++i) {
    CHECK(fwd.rows[i].difference == -back.rows[i].difference);
    CHECK(fwd.rows[i].difference == fwd.rows[i].method_value - fwd.rows[i].sim_value);
  }

  const std::vector<ResultBlock> all{adj, sim};
  const DiffReport rep = diff_report(all, "preset-7");
  CHECK(rep.rows.size() == fwd.rows.size());
  CHECK(emit_diff_csv(rep).rfind("experiment,method,stat,t,method_value,sim_value,difference\n", 0) == 0);

  ResultBlock shifted = adj;
  shifted.samples[0].t += 0.5;
  CHECK_THROWS_AS(diff_blocks(shifted, sim, "x"), UsageError);
  const std::vector<ResultBlock> no_sim{adj};
  CHECK_THROWS_AS(diff_report(no_sim, "x"), UsageError);
}

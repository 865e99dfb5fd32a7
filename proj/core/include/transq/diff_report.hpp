#pragma once

#include <span>
#include <string>
#include <vector>

#include "transq/results_csv.hpp"

namespace transq {

struct DiffRow {
  std::string experiment;
  std::string method;
  std::string stat;
  double t;
  double method_value;
  double sim_value;
  double difference;  // method_value - sim_value
};

struct DiffReport {
  std::vector<DiffRow> rows;
};

/// Row per (stat, time) of `method` minus `reference`. Covariance entries are
/// included only when both sides have them. Throws UsageError when the sample
/// grids or dimensions differ.
[[nodiscard]] DiffReport diff_blocks(const ResultBlock& method, const ResultBlock& reference,
                                     const std::string& experiment);

/// Every non-simulation block against the "simulate" block. Throws UsageError
/// when there is no simulation result.
[[nodiscard]] DiffReport diff_report(std::span<const ResultBlock> results, const std::string& experiment);

/// experiment,method,stat,t,method_value,sim_value,difference
[[nodiscard]] std::string emit_diff_csv(const DiffReport& report);

}  // namespace transq

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transq/ensemble.hpp"
#include "transq/moment_engine.hpp"

namespace transq {

/// One method's output as it appears on disk. cov is a 0x0 matrix when the
/// method reports no covariance (a single simulation replication).
struct ResultBlock {
  std::string method;
  std::optional<std::uint64_t> replications;  // simulation only
  std::vector<MomentSample> samples;

  [[nodiscard]] std::size_t dimension() const noexcept;
  [[nodiscard]] bool has_cov() const noexcept;
};

[[nodiscard]] bool operator==(const ResultBlock& a, const ResultBlock& b);

[[nodiscard]] ResultBlock to_block(const MomentTrajectory& traj);
[[nodiscard]] ResultBlock to_block(const EnsembleStats& stats);

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

/// mean_0 .. mean_{d-1}, then cov_i_j for i <= j when with_cov.
[[nodiscard]] std::vector<std::string> stat_names(std::size_t d, bool with_cov);

/// Single-method CSV: t,method,stat,value plus N for simulation blocks.
[[nodiscard]] std::string emit_block_csv(const ResultBlock& block);

/// Long format t,method,stat,value,N for several methods; N is empty for
/// analytic methods.
[[nodiscard]] std::string emit_results_csv(std::span<const ResultBlock> blocks);

/// Reads either layout back. Throws UsageError on malformed input.
[[nodiscard]] std::vector<ResultBlock> parse_results_csv(std::string_view text);

}  // namespace transq

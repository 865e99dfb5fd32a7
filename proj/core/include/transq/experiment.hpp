#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transq/model.hpp"
#include "transq/diff_report.hpp"
#include "transq/results_csv.hpp"

namespace transq {

struct GridSpec {
  double t0;
  double t1;
  double step;
};

/// "t0:t1:step". Throws UsageError naming the grid field.
[[nodiscard]] GridSpec parse_grid(std::string_view text);

struct ExperimentConfig {
  std::optional<int> preset;                     // 1..10
  std::optional<std::filesystem::path> model;    // JSON model file
  std::vector<std::string> methods;              // fluid, adjusted, measure-zero, simulate, exact
  std::uint64_t replications = 5000;
  std::uint64_t seed = 1;
  double dt = 0.01;
  std::optional<GridSpec> grid;                  // default: preset grid, or 21 points over [0, T]
  std::filesystem::path out = "results";
  std::size_t quad_order = 32;
  unsigned workers = 0;                          // 0: default_workers()
  std::vector<std::int64_t> caps;                // exact method box; empty: derived from adjusted
};

inline constexpr std::string_view kMethodNames[] = {"fluid", "adjusted", "measure-zero", "simulate", "exact"};

/// Canonical method name; "measure_zero" is accepted. Throws UsageError.
[[nodiscard]] std::string canonical_method(std::string_view name);

/// Splits "a,b,c" and canonicalizes each name.
[[nodiscard]] std::vector<std::string> parse_methods(std::string_view list);

/// Overlays the keys of a JSON config document on `base`. Keys: preset,
/// model, methods, reps, seed, dt, grid, out, quad_order, workers, caps.
[[nodiscard]] ExperimentConfig config_from_json(std::string_view text, ExperimentConfig base = {});

/// Canonicalizes method names, removes duplicates, and checks every field.
/// Throws UsageError naming the field.
void validate_config(ExperimentConfig& cfg);

/// TRANSQ_WORKERS if set to a positive integer, else hardware concurrency.
[[nodiscard]] unsigned default_workers();

struct LoadedExperiment {
  std::string label;  // "preset-7" or the model file stem
  NetworkModel model;
  std::vector<double> grid;
};

[[nodiscard]] LoadedExperiment load_experiment(const ExperimentConfig& cfg);

struct MethodOutcome {
  std::string method;
  std::optional<ResultBlock> result;
  std::vector<std::string> warnings;
  std::string error;
  int exit_code = 0;  // 0 ok, 2 usage, 3 numerical
};

struct ExperimentResult {
  std::string label;
  std::vector<double> grid;
  std::vector<MethodOutcome> outcomes;

  [[nodiscard]] std::vector<ResultBlock> blocks() const;
  /// 2 if any method hit a usage error, else 3 if any failed numerically, else 0.
  [[nodiscard]] int exit_code() const;
};

/// Runs each method in the configured order. A failing method is recorded in
/// its outcome and the others still run.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// <out>/<method>.csv for each successful method, <out>/results.csv with all
/// of them, and <out>/manifest.json.
void write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg);

/// Reads <in>/results.csv and manifest.json, writes the difference report to
/// `out` (default <in>/diff_report.csv) and returns it.
DiffReport report_directory(const std::filesystem::path& in, const std::optional<std::filesystem::path>& out = {});

}  // namespace transq

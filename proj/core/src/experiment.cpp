#include "transq/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "transq/errors.hpp"
#include "transq/kolmogorov.hpp"
#include "transq/model_json.hpp"
#include "transq/model_zoo.hpp"
#include "transq/moment_engine.hpp"
#include "transq/simulator.hpp"

namespace transq {

namespace {

using nlohmann::json;

double parse_number(std::string_view text, const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError(field + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw UsageError("cannot write " + path.string());
  }
  out << text;
}

template <class T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string(key) + ": " + e.what());
  }
}

std::vector<std::int64_t> derive_caps(const NetworkModel& m, const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.dt = cfg.dt;
  sc.method = Method::Adjusted;
  sc.quad_order = cfg.quad_order;
  sc.sample_times = make_grid(0.0, m.horizon, m.horizon / 200.0);
  const MomentTrajectory traj = solve_adjusted(m, sc);
  std::vector<std::int64_t> caps(m.dimension, 0);
  for (const MomentSample& s : traj.samples) {
    for (std::size_t j = 0; j < m.dimension; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double hi = s.mean[jj] + 8.0 * std::sqrt(std::max(s.cov(jj, jj), 0.0));
      caps[j] = std::max(caps[j], static_cast<std::int64_t>(std::ceil(hi)));
    }
  }
  for (std::size_t j = 0; j < m.dimension; ++j) {
    caps[j] = std::max(caps[j], m.initial_state[j]) + 10;
  }
  return caps;
}

}  // namespace

GridSpec parse_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  if (parts.size() != 3) {
    throw UsageError("grid: expected t0:t1:step, got '" + std::string(text) + "'");
  }
  GridSpec g{parse_number(parts[0], "grid"), parse_number(parts[1], "grid"), parse_number(parts[2], "grid")};
  if (!(g.t0 >= 0.0) || !(g.t1 >= g.t0) || !(g.step > 0.0)) {
    throw UsageError("grid: need 0 <= t0 <= t1 and step > 0");
  }
  return g;
}

std::string canonical_method(std::string_view name) {
  if (name == "measure_zero") {
    return "measure-zero";
  }
  for (std::string_view m : kMethodNames) {
    if (name == m) {
      return std::string(m);
    }
  }
  throw UsageError("methods: unknown method '" + std::string(name) +
                   "' (expected fluid, adjusted, measure-zero, simulate, exact)");
}

std::vector<std::string> parse_methods(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t pos = list.find(',', start);
    const std::string_view item = list.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!item.empty()) {
      out.push_back(canonical_method(item));
    }
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

ExperimentConfig config_from_json(std::string_view text, ExperimentConfig cfg) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw UsageError("config: top level must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") {
      cfg.preset = get_field<int>(doc, "preset");
    } else if (key == "model") {
      cfg.model = get_field<std::string>(doc, "model");
    } else if (key == "methods") {
      if (value.is_string()) {
        cfg.methods = parse_methods(value.get<std::string>());
      } else {
        cfg.methods.clear();
        for (const auto& name : get_field<std::vector<std::string>>(doc, "methods")) {
          cfg.methods.push_back(canonical_method(name));
        }
      }
    } else if (key == "reps") {
      cfg.replications = get_field<std::uint64_t>(doc, "reps");
    } else if (key == "seed") {
      cfg.seed = get_field<std::uint64_t>(doc, "seed");
    } else if (key == "dt") {
      cfg.dt = get_field<double>(doc, "dt");
    } else if (key == "grid") {
      cfg.grid = parse_grid(get_field<std::string>(doc, "grid"));
    } else if (key == "out") {
      cfg.out = get_field<std::string>(doc, "out");
    } else if (key == "quad_order") {
      cfg.quad_order = get_field<std::size_t>(doc, "quad_order");
    } else if (key == "workers") {
      cfg.workers = get_field<unsigned>(doc, "workers");
    } else if (key == "caps") {
      cfg.caps = get_field<std::vector<std::int64_t>>(doc, "caps");
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

void validate_config(ExperimentConfig& cfg) {
  if (cfg.preset && cfg.model) {
    throw UsageError("model: give either a preset or a model file, not both");
  }
  if (!cfg.preset && !cfg.model) {
    throw UsageError("model: a preset id or a model file is required");
  }
  if (cfg.preset && (*cfg.preset < 1 || *cfg.preset > 10)) {
    throw UsageError("preset: id " + std::to_string(*cfg.preset) + " out of range [1, 10]");
  }
  if (cfg.methods.empty()) {
    throw UsageError("methods: at least one method is required");
  }
  std::vector<std::string> unique;
  for (const std::string& m : cfg.methods) {
    const std::string c = canonical_method(m);
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) {
      unique.push_back(c);
    }
  }
  cfg.methods = std::move(unique);
  const bool simulate = std::find(cfg.methods.begin(), cfg.methods.end(), "simulate") != cfg.methods.end();
  if (simulate && cfg.replications < 1) {
    throw UsageError("reps: must be at least 1");
  }
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw UsageError("dt: must be positive");
  }
  if (cfg.quad_order < 2) {
    throw UsageError("quad_order: must be at least 2");
  }
  for (std::int64_t c : cfg.caps) {
    if (c < 0) {
      throw UsageError("caps: entries must be non-negative");
    }
  }
}

unsigned default_workers() {
  if (const char* env = std::getenv("TRANSQ_WORKERS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0) {
      return v;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LoadedExperiment load_experiment(const ExperimentConfig& cfg) {
  LoadedExperiment e;
  if (cfg.preset) {
    Preset p = table1_preset(*cfg.preset);
    e.label = "preset-" + std::to_string(*cfg.preset);
    e.model = std::move(p.model);
    e.grid = std::move(p.grid);
  } else if (cfg.model) {
    e.label = cfg.model->stem().string();
    e.model = load_model(*cfg.model);
    require_valid(e.model);
    e.grid = make_grid(0.0, e.model.horizon, e.model.horizon / 20.0);
  } else {
    throw UsageError("model: a preset id or a model file is required");
  }
  if (cfg.grid) {
    if (cfg.grid->t1 > e.model.horizon) {
      throw UsageError("grid: ends after the model horizon " + format_double(e.model.horizon));
    }
    e.grid = make_grid(cfg.grid->t0, cfg.grid->t1, cfg.grid->step);
  }
  return e;
}

std::vector<ResultBlock> ExperimentResult::blocks() const {
  std::vector<ResultBlock> out;
  for (const MethodOutcome& o : outcomes) {
    if (o.result) {
      out.push_back(*o.result);
    }
  }
  return out;
}

int ExperimentResult::exit_code() const {
  int code = 0;
  for (const MethodOutcome& o : outcomes) {
    if (o.exit_code == 2) {
      return 2;
    }
    code = std::max(code, o.exit_code);
  }
  return code;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  validate_config(cfg);
  LoadedExperiment e = load_experiment(cfg);

  ExperimentResult result;
  result.label = e.label;
  result.grid = e.grid;
  for (const std::string& method : cfg.methods) {
    MethodOutcome o;
    o.method = method;
    try {
      if (method == "simulate") {
        const unsigned workers = cfg.workers > 0 ? cfg.workers : default_workers();
        o.result = to_block(simulate_ensemble(e.model, cfg.replications, cfg.seed, e.grid, workers));
      } else if (method == "exact") {
        const std::vector<std::int64_t> caps = cfg.caps.empty() ? derive_caps(e.model, cfg) : cfg.caps;
        o.result = to_block(exact_transient_moments(e.model, caps, e.grid));
      } else {
        SolverConfig sc;
        sc.dt = cfg.dt;
        sc.method = *parse_method(method);
        sc.sample_times = e.grid;
        sc.quad_order = cfg.quad_order;
        MomentTrajectory traj = solve(e.model, sc);
        o.warnings = traj.warnings;
        o.result = to_block(traj);
      }
    } catch (const UsageError& err) {
      o.error = err.what();
      o.exit_code = 2;
    } catch (const NumericalError& err) {
      o.error = err.what();
      o.exit_code = 3;
    } catch (const ModelError& err) {
      o.error = err.what();
      o.exit_code = 3;
    }
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

void write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) {
    throw UsageError("out: cannot create " + cfg.out.string() + ": " + ec.message());
  }
  json manifest;
  manifest["experiment"] = result.label;
  manifest["seed"] = cfg.seed;
  manifest["reps"] = cfg.replications;
  manifest["dt"] = cfg.dt;
  manifest["quad_order"] = cfg.quad_order;
  manifest["grid"] = result.grid;
  json methods = json::array();
  for (const MethodOutcome& o : result.outcomes) {
    json entry;
    entry["method"] = o.method;
    entry["status"] = o.result ? "ok" : "failed";
    if (!o.error.empty()) {
      entry["error"] = o.error;
    }
    if (!o.warnings.empty()) {
      entry["warnings"] = o.warnings;
    }
    methods.push_back(entry);
    if (o.result) {
      write_file(cfg.out / (o.method + ".csv"), emit_block_csv(*o.result));
    }
  }
  manifest["methods"] = methods;
  write_file(cfg.out / "results.csv", emit_results_csv(result.blocks()));
  write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");
}

DiffReport report_directory(const std::filesystem::path& in, const std::optional<std::filesystem::path>& out) {
  const std::vector<ResultBlock> blocks = parse_results_csv(read_file(in / "results.csv"));
  std::string label = in.filename().string();
  const std::filesystem::path manifest_path = in / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    try {
      label = json::parse(read_file(manifest_path)).at("experiment").get<std::string>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("manifest.json: ") + e.what());
    }
  }
  DiffReport report = diff_report(blocks, label);
  write_file(out.value_or(in / "diff_report.csv"), emit_diff_csv(report));
  return report;
}

}  // namespace transq

#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "transq/errors.hpp"
#include "transq/model_json.hpp"
#include "transq/model_zoo.hpp"

namespace transq::cli {

namespace {

struct RunFlags {
  std::optional<int> preset;
  std::optional<std::string> model;
  std::optional<std::string> methods;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<std::string> grid;
  std::optional<std::string> out;
  std::optional<std::size_t> quad_order;
  std::optional<unsigned> workers;
  std::optional<std::vector<std::int64_t>> caps;
  std::optional<std::string> config;
};

void add_run_flags(CLI::App& app, RunFlags& f) {
  app.add_option("--preset", f.preset, "Retrial experiment 1..10");
  app.add_option("--model", f.model, "Model JSON file");
  app.add_option("--methods", f.methods, "Comma list of fluid,adjusted,measure-zero,simulate,exact");
  app.add_option("--reps", f.reps, "Simulation replications");
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--dt", f.dt, "ODE step");
  app.add_option("--grid", f.grid, "Sample grid t0:t1:step");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--quad-order", f.quad_order, "Quadrature order for capped-residual rates");
  app.add_option("--workers", f.workers, "Simulation threads (default: TRANSQ_WORKERS or all cores)");
  app.add_option("--caps", f.caps, "Truncation box for the exact method")->delimiter(',');
  app.add_option("--config", f.config, "JSON config file; flags override it");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("config: cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig to_config(const RunFlags& f) {
  ExperimentConfig cfg;
  if (f.config) {
    cfg = config_from_json(read_text(*f.config));
  }
  if (f.preset || f.model) {
    cfg.preset.reset();
    cfg.model.reset();
  }
  if (f.preset) cfg.preset = *f.preset;
  if (f.model) cfg.model = *f.model;
  if (f.methods) cfg.methods = parse_methods(*f.methods);
  if (f.reps) cfg.replications = *f.reps;
  if (f.seed) cfg.seed = *f.seed;
  if (f.dt) cfg.dt = *f.dt;
  if (f.grid) cfg.grid = parse_grid(*f.grid);
  if (f.out) cfg.out = *f.out;
  if (f.quad_order) cfg.quad_order = *f.quad_order;
  if (f.workers) cfg.workers = *f.workers;
  if (f.caps) cfg.caps = *f.caps;
  validate_config(cfg);
  return cfg;
}

int parse_args(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("transq");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) {
    argv.push_back(a.c_str());
  }
  app.parse(static_cast<int>(argv.size()), argv.data());
  return 0;
}

}  // namespace

ExperimentConfig parse_run_args(const std::vector<std::string>& args) {
  CLI::App app{"run"};
  RunFlags f;
  add_run_flags(app, f);
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return to_config(f);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transient moments of time-varying Markovian queueing networks"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run methods on a preset or model file and write CSVs");
  add_run_flags(*run, run_flags);

  std::string report_in;
  std::optional<std::string> report_out;
  CLI::App* report = app.add_subcommand("report", "Method-minus-simulation differences for a run directory");
  report->add_option("--in", report_in, "Run output directory")->required();
  report->add_option("--out", report_out, "Report CSV (default <in>/diff_report.csv)");

  std::optional<int> export_preset;
  std::optional<std::string> export_builtin;
  std::string export_out;
  CLI::App* exp = app.add_subcommand("export", "Write a preset or built-in study model as JSON");
  exp->add_option("--preset", export_preset, "Retrial experiment 1..10");
  exp->add_option("--builtin", export_builtin, "priority or peer");
  exp->add_option("--out", export_out, "Destination file")->required();

  try {
    parse_args(app, args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = to_config(run_flags);
      const ExperimentResult result = run_experiment(cfg);
      write_experiment(result, cfg);
      for (const MethodOutcome& o : result.outcomes) {
        if (o.result) {
          out << o.method << ": ok\n";
        } else {
          err << o.method << ": " << o.error << '\n';
        }
        for (const auto& w : o.warnings) {
          err << o.method << ": warning: " << w << '\n';
        }
      }
      return result.exit_code();
    }
    if (report->parsed()) {
      std::optional<std::filesystem::path> dest;
      if (report_out) {
        dest = *report_out;
      }
      const DiffReport r = report_directory(report_in, dest);
      out << r.rows.size() << " rows\n";
      return 0;
    }
    if (exp->parsed()) {
      if (export_preset.has_value() == export_builtin.has_value()) {
        throw UsageError("export: give exactly one of --preset or --builtin");
      }
      NetworkModel m;
      if (export_preset) {
        m = table1_preset(*export_preset).model;
      } else if (*export_builtin == "priority") {
        m = priority_study().model;
      } else if (*export_builtin == "peer") {
        m = peer_study().model;
      } else {
        throw UsageError("builtin: unknown model '" + *export_builtin + "' (expected priority or peer)");
      }
      save_model(m, export_out);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace transq::cli

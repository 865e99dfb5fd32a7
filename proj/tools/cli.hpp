#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "transq/experiment.hpp"

namespace transq::cli {

/// Flags of the `run` subcommand (without the subcommand itself). A --config
/// file is read first and any flag given on the command line wins.
/// Throws UsageError.
[[nodiscard]] ExperimentConfig parse_run_args(const std::vector<std::string>& args);

/// Full command line without the program name: run | report | export.
/// Returns the process exit code (0 ok, 2 usage, 3 numerical).
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace transq::cli

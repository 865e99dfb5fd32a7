#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "transq/model.hpp"

namespace transq {

// JSON model documents. Layout (see docs/model.schema.json):
//
//   { "dimension": 2, "horizon": 20, "initial_state": [0, 0],
//     "transitions": [
//       { "jump": [1, 0],
//         "coefficient": { "breakpoints": [0, 2], "values": [45, 55], "end": 20 },
//         "kernel": { "variant": "min_threshold", "indices": [0],
//                     "threshold": { "breakpoints": [0], "values": [50] } } } ] }
//
// "end" is optional on every schedule; omitted means unbounded. Linear kernels
// carry "coeffs" instead of "indices"; constant kernels carry neither.

/// Throws UsageError naming the offending field.
[[nodiscard]] NetworkModel model_from_json(std::string_view text);
[[nodiscard]] std::string model_to_json(const NetworkModel& m);

[[nodiscard]] NetworkModel load_model(const std::filesystem::path& path);
void save_model(const NetworkModel& m, const std::filesystem::path& path);

}  // namespace transq

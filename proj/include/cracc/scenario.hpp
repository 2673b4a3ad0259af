#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cracc/simulation.hpp"

namespace cracc {

/// A list of simulation cells read from a TOML file.
///
///   name = "study"
///   [defaults]        # any scenario key, applied to every cell
///   [generator]       # beta, gamma, weibull_scale, weibull_shape, cause2_rate_scale
///   [grid]            # scenario keys with arrays; expanded as a full factorial
///   [[scenario]]      # explicit cells (may be combined with the grid)
///
/// Scenario keys: name, event1_fraction, censoring (none|medium|high), family,
/// n, replicates, span, bandwidth, kernel, methods, seed, tau, tau_quantile,
/// truth_datasets, calibration_size, max_undefined_fraction, threads,
/// threshold_ratio, threshold_shape, cox_coefficient, cox_shape.
struct Study {
  std::string name = "study";
  std::vector<ScenarioConfig> scenarios;
};

/// Throws InvalidConfig with the offending key or TOML position.
Study parse_study(std::string_view text, const std::string& source = "config");
Study load_study(const std::filesystem::path& path);

}  // namespace cracc

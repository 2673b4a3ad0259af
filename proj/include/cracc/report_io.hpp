#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cracc/accuracy_metrics.hpp"
#include "cracc/evaluate.hpp"
#include "cracc/inference.hpp"
#include "cracc/simulation.hpp"

namespace cracc {

/// Metrics of one method at one horizon, with optional bootstrap intervals.
struct MethodReport {
  Method method = Method::Proposed;
  AccuracyReport report;
  std::vector<BootstrapResult> intervals;
};

struct EstimateReport {
  std::size_t n = 0;
  int n_causes = 2;
  int cause_of_interest = 1;
  bool raw_marker = false;
  std::string kernel;
  DefinitionSet definitions{};
  std::size_t bootstrap_replicates = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<MethodReport> entries;
};

std::string describe(const KernelSpec& spec);

/// One row per method x tau x definition. Calibration columns repeat across
/// the definition rows of a method and horizon.
void write_estimate_csv(std::ostream& out, const EstimateReport& report);
void write_estimate_json(std::ostream& out, const EstimateReport& report);

/// Columns threshold, fpr, tpr; thresholds decreasing with +/-inf sentinels.
void write_roc_csv(std::ostream& out, const RocCurve& roc);

/// One row per scenario x method.
void write_scenario_csv(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_scenario_json(std::ostream& out, const std::string& study,
                         const std::vector<ScenarioResult>& results);

}  // namespace cracc

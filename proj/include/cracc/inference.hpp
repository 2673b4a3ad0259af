#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cracc/evaluate.hpp"

namespace cracc {

enum class Metric { AucA, AucB, Brier, Kl, AbsErr };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);
std::optional<double> metric_value(const AccuracyReport& report, Metric metric);

struct BootstrapOptions {
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Fail with TooManyFailures when more replicates than this fraction error out.
  double max_failure_fraction = 0.10;

  void validate() const;
};

struct BootstrapResult {
  Metric metric = Metric::AucA;
  double estimate = 0.0;
  std::vector<double> replicates;  ///< successful replicates, in replicate order
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  std::size_t failures = 0;
};

/// Type-7 sample quantile of unsorted values.
double sample_quantile(std::vector<double> values, double q);

/// Percentile intervals for several metrics from one set of resamples. The
/// whole pipeline (kernel neighbourhoods, censoring fits) is rerun on each
/// resample.
std::vector<BootstrapResult> bootstrap(const CompetingRiskSample& sample, Horizon tau,
                                       Method method, const EvaluateOptions& evaluate_options,
                                       std::span<const Metric> metrics,
                                       const BootstrapOptions& options);

BootstrapResult bootstrap_ci(const CompetingRiskSample& sample, Horizon tau, Method method,
                             const EvaluateOptions& evaluate_options, Metric metric,
                             const BootstrapOptions& options);

}  // namespace cracc

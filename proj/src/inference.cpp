#include "cracc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <fmt/format.h>

#include "cracc/error.hpp"
#include "cracc/parallel.hpp"

namespace cracc {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::AucA:
      return "auc_a";
    case Metric::AucB:
      return "auc_b";
    case Metric::Brier:
      return "brier";
    case Metric::Kl:
      return "kl";
    case Metric::AbsErr:
      return "abs_err";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (auto m : {Metric::AucA, Metric::AucB, Metric::Brier, Metric::Kl, Metric::AbsErr}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::optional<double> metric_value(const AccuracyReport& report, Metric metric) {
  switch (metric) {
    case Metric::AucA:
      return report.auc_a;
    case Metric::AucB:
      return report.auc_b;
    case Metric::Brier:
      return report.brier;
    case Metric::Kl:
      return report.kl;
    case Metric::AbsErr:
      return report.abs_err;
  }
  return std::nullopt;
}

void BootstrapOptions::validate() const {
  if (replicates < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_failure_fraction must lie in [0, 1)");
  }
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<BootstrapResult> bootstrap(const CompetingRiskSample& sample, Horizon tau,
                                       Method method, const EvaluateOptions& evaluate_options,
                                       std::span<const Metric> metrics,
                                       const BootstrapOptions& options) {
  options.validate();
  const auto point = evaluate(sample, tau, method, evaluate_options);
  std::vector<BootstrapResult> results(metrics.size());
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    const auto v = metric_value(point, metrics[k]);
    if (!v) {
      throw Error(ErrorCode::RawMarkerNotAllowed,
                  "metric " + std::string(to_string(metrics[k])) + " is unavailable for this sample");
    }
    results[k].metric = metrics[k];
    results[k].estimate = *v;
    results[k].alpha = options.alpha;
  }

  const std::size_t B = options.replicates;
  const std::size_t n = sample.size();
  std::vector<std::vector<double>> values(B);
  std::vector<std::string> errors(B);
  parallel_for(B, options.threads, [&](std::size_t b) {
    auto rng = stream_rng(options.seed, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    try {
      const auto rep = evaluate(resample(sample, idx), tau, method, evaluate_options);
      std::vector<double> row;
      row.reserve(metrics.size());
      for (auto m : metrics) row.push_back(*metric_value(rep, m));
      values[b] = std::move(row);
    } catch (const Error& e) {
      errors[b] = e.what();
    }
  });

  std::size_t failures = 0;
  std::string first_error;
  for (std::size_t b = 0; b < B; ++b) {
    if (values[b].empty()) {
      ++failures;
      if (first_error.empty()) first_error = errors[b];
    }
  }
  if (static_cast<double>(failures) > options.max_failure_fraction * static_cast<double>(B)) {
    throw Error(ErrorCode::TooManyFailures,
                fmt::format("{} of {} bootstrap replicates failed; first: {}", failures, B,
                            first_error));
  }

  for (std::size_t k = 0; k < metrics.size(); ++k) {
    auto& r = results[k];
    r.failures = failures;
    r.replicates.reserve(B - failures);
    for (std::size_t b = 0; b < B; ++b) {
      if (!values[b].empty()) r.replicates.push_back(values[b][k]);
    }
    r.lower = sample_quantile(r.replicates, options.alpha / 2.0);
    r.upper = sample_quantile(r.replicates, 1.0 - options.alpha / 2.0);
  }
  return results;
}

BootstrapResult bootstrap_ci(const CompetingRiskSample& sample, Horizon tau, Method method,
                             const EvaluateOptions& evaluate_options, Metric metric,
                             const BootstrapOptions& options) {
  const Metric one[] = {metric};
  return bootstrap(sample, tau, method, evaluate_options, one, options).front();
}

}  // namespace cracc

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cracc/accuracy_metrics.hpp"
#include "cracc/data_model.hpp"
#include "cracc/ipcw_baselines.hpp"
#include "cracc/kernel_estimators.hpp"

namespace cracc {

enum class Method { Proposed, IpcwKm, IpcwCox };

std::string_view to_string(Method method);
/// Accepts "proposed", "ipcw-km", "ipcw-cox". Throws InvalidArgument.
Method parse_method(std::string_view name);
/// Comma-separated list, duplicates rejected.
std::vector<Method> parse_methods(std::string_view list);

struct EvaluateOptions {
  KernelSpec kernel = KernelSpec::span(kDefaultSpan);
  UndefinedWeightPolicy policy = UndefinedWeightPolicy::Throw;
  DefinitionSet definitions{};
  CoxOptions cox{};
};

struct MethodMasses {
  OutcomeMasses masses;
  std::size_t n_undefined = 0;
};

/// Case/control masses of one estimator at tau.
MethodMasses method_masses(const CompetingRiskSample& sample, Horizon tau, Method method,
                           const EvaluateOptions& options = {});

/// All metrics of one estimator at tau. Calibration metrics are skipped for
/// raw-marker samples.
AccuracyReport evaluate(const CompetingRiskSample& sample, Horizon tau, Method method,
                        const EvaluateOptions& options = {});

RocCurve evaluate_roc(const CompetingRiskSample& sample, Horizon tau, Method method,
                      ControlDefinition def, const EvaluateOptions& options = {});

}  // namespace cracc

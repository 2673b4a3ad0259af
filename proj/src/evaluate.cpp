#include "cracc/evaluate.hpp"

#include <algorithm>
#include <string>

#include "cracc/error.hpp"

namespace cracc {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Proposed:
      return "proposed";
    case Method::IpcwKm:
      return "ipcw-km";
    case Method::IpcwCox:
      return "ipcw-cox";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::Proposed, Method::IpcwKm, Method::IpcwCox}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown method '" + std::string(name) + "' (expected proposed, ipcw-km, ipcw-cox)");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
    const auto m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) != out.end()) {
      throw Error(ErrorCode::InvalidArgument, "method listed twice: " + std::string(item));
    }
    out.push_back(m);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

MethodMasses method_masses(const CompetingRiskSample& sample, Horizon tau, Method method,
                           const EvaluateOptions& options) {
  MethodMasses out;
  switch (method) {
    case Method::Proposed: {
      const auto w = case_weights(sample, tau, options.kernel, options.policy);
      out.masses = outcome_masses(w);
      out.n_undefined = w.undefined_subjects.size();
      break;
    }
    case Method::IpcwKm:
      out.masses = ipcw_masses(ipcw_weights(fit_censoring_km(sample), sample, tau), sample);
      break;
    case Method::IpcwCox:
      out.masses =
          ipcw_masses(ipcw_weights(fit_censoring_cox(sample, options.cox), sample, tau), sample);
      break;
  }
  return out;
}

AccuracyReport evaluate(const CompetingRiskSample& sample, Horizon tau, Method method,
                        const EvaluateOptions& options) {
  const auto mm = method_masses(sample, tau, method, options);
  auto report = accuracy_report(mm.masses, sample.scores(), tau.value(), !sample.raw_marker(),
                                options.definitions);
  report.n_undefined_weights = mm.n_undefined;
  return report;
}

RocCurve evaluate_roc(const CompetingRiskSample& sample, Horizon tau, Method method,
                      ControlDefinition def, const EvaluateOptions& options) {
  const auto mm = method_masses(sample, tau, method, options);
  return roc_curve(mm.masses, sample.scores(), def, tau.value());
}

}  // namespace cracc

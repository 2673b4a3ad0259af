#pragma once

#include <cstddef>
#include <vector>

#include "cracc/accuracy_metrics.hpp"
#include "cracc/data_model.hpp"
#include "cracc/kernel_estimators.hpp"

namespace cracc {

/// Survival function of the censoring time, G(t) = P(C > t), either marginal
/// (reverse Kaplan-Meier) or conditional on the score through a Cox model.
struct CensoringModel {
  enum class Kind { KM, CoxOnScore };

  Kind kind = Kind::KM;
  /// KM: G itself. Cox: Breslow baseline cumulative hazard at the centred covariate.
  StepFunction curve;
  double coefficient = 0.0;
  double standard_error = 0.0;
  double center = 0.0;
  int iterations = 0;

  [[nodiscard]] double survival(double t, double score) const;
  /// G(t- | score)
  [[nodiscard]] double survival_left(double t, double score) const;
};

/// Reverse Kaplan-Meier: censoring is the event, any failure censors.
CensoringModel fit_censoring_km(const CompetingRiskSample& sample);

struct CoxOptions {
  double tolerance = 1e-8;
  int max_iterations = 50;
};

/// Univariate Cox model for the censoring hazard with the score as covariate.
/// Breslow ties and baseline. Throws SingularFit or NonConvergence.
CensoringModel fit_censoring_cox(const CompetingRiskSample& sample, const CoxOptions& options = {});

struct IpcwWeights {
  double tau = 0.0;
  /// 1/G(T-) for failures by tau, 1/G(tau) for subjects event-free at tau, 0 otherwise.
  std::vector<double> weights;
};

/// Throws ZeroCensoringProbability naming the first subject whose G is 0.
IpcwWeights ipcw_weights(const CensoringModel& model, const CompetingRiskSample& sample,
                         Horizon tau);

/// Case and control masses carried by each subject under IPCW.
OutcomeMasses ipcw_masses(const IpcwWeights& weights, const CompetingRiskSample& sample);

AccuracyReport ipcw_metrics(const IpcwWeights& weights, const CompetingRiskSample& sample,
                            DefinitionSet defs = {});

}  // namespace cracc

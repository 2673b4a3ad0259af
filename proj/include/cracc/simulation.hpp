#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cracc/data_model.hpp"
#include "cracc/evaluate.hpp"

namespace cracc {

/// Two-cause Fine-Gray generator. Covariates Z1 ~ N(0, 1), Z2 ~ Bernoulli(0.5).
/// Cause 1 has CIF F1(t|Z) = 1 - {1 - p(1 - exp(-lambda t^alpha))}^exp(Z beta);
/// given cause 2 the time is exponential with rate exp(Z gamma) * cause2_rate_scale.
struct FineGrayConfig {
  std::array<double, 2> beta{-0.6, 0.5};
  std::array<double, 2> gamma{-0.1, -0.2};
  double p = 0.61;
  double weibull_scale = 0.2;
  double weibull_shape = 1.0;
  double cause2_rate_scale = 0.5;

  /// Throws InvalidConfig.
  void validate() const;
  [[nodiscard]] double linear_predictor(double z1, double z2) const {
    return beta[0] * z1 + beta[1] * z2;
  }
  /// F1(t | Z) as a function of the linear predictor.
  [[nodiscard]] double cif1(double t, double eta) const;
  /// P(cause 1 | Z) = 1 - (1 - p)^exp(eta)
  [[nodiscard]] double cause1_probability(double eta) const;
};

/// Baseline mass parameter giving a target cause-1 fraction: 0.3, 0.5, 0.7.
/// Throws InvalidConfig for any other fraction.
double p_for_event_fraction(double fraction);

/// Mixture of uniforms on (0,3], (3,6], ..., (15,18].
struct MixtureUniformCensoring {
  std::array<double, 6> probabilities{1, 1, 1, 1, 1, 1};
};
/// Mixture with probabilities proportional to exp(tilt * j), j = 0..5.
MixtureUniformCensoring tilted_mixture(double tilt);

/// Weibull censoring whose mean is `a` when the linear predictor lies outside
/// [lower, upper] and `b` inside it.
struct ThresholdCensoring {
  double a = 10.0;
  double b = 1.0;
  double shape = 5.0;
  double lower = -0.6;
  double upper = 0.4;
};

/// Cox model on the linear predictor with Weibull baseline:
/// hazard rate * shape * t^(shape - 1) * exp(coefficient * eta).
struct CoxCensoring {
  double coefficient = 1.0;
  double rate = 0.1;
  double shape = 1.0;
};

struct NoCensoring {};

using CensoringConfig =
    std::variant<NoCensoring, MixtureUniformCensoring, ThresholdCensoring, CoxCensoring>;

void validate(const CensoringConfig& censoring);
std::string describe(const CensoringConfig& censoring);

/// Unobserved quantities of one simulated subject.
struct LatentRecord {
  double z1 = 0.0;
  double z2 = 0.0;
  double eta = 0.0;
  double event_time = 0.0;
  int cause = 1;
  double censor_time = 0.0;
};

struct SimulatedData {
  CompetingRiskSample sample;
  /// Aligned with the (time-sorted) sample.
  std::vector<LatentRecord> latent;
  double tau = 0.0;
};

/// One dataset with scores U = F1(tau | Z). Deterministic in (seed, stream).
SimulatedData generate_dataset(const FineGrayConfig& config, const CensoringConfig& censoring,
                               std::size_t n, Horizon tau, std::uint64_t seed,
                               std::uint64_t stream = 0);

/// Censoring fraction of a simulated population (common random numbers, so
/// the result is a smooth monotone function of the censoring parameters).
double censoring_fraction(const FineGrayConfig& config, const CensoringConfig& censoring,
                          std::uint64_t seed, std::size_t n = 100000);

enum class CensoringLevel { None, Medium, High };
std::string_view to_string(CensoringLevel level);
CensoringLevel parse_censoring_level(std::string_view name);
/// Target censoring fraction: Medium 0.275, High 0.475.
double censoring_target(CensoringLevel level);

enum class CensoringFamily { Independent, DependentThreshold, DependentCox };
std::string_view to_string(CensoringFamily family);
CensoringFamily parse_censoring_family(std::string_view name);

/// Free shape parameters of a censoring family; the remaining scale is calibrated.
struct CensoringTemplate {
  CensoringFamily family = CensoringFamily::Independent;
  double threshold_ratio = 10.0;  ///< a / b for DependentThreshold
  double threshold_shape = 5.0;
  double cox_coefficient = 1.0;
  double cox_shape = 1.0;
};

/// Bisection on the single free scale of the family so the population
/// censoring fraction hits `target`. Throws InvalidConfig when unreachable.
CensoringConfig calibrate_censoring(const FineGrayConfig& config, const CensoringTemplate& family,
                                    double target, std::uint64_t seed, std::size_t n = 100000);

/// Quantile (default 65%) of observed times in a large calibration population.
Horizon select_tau(const FineGrayConfig& config, const CensoringConfig& censoring,
                   std::uint64_t seed, std::size_t n = 100000, double quantile = 0.65);

struct TrueValues {
  double auc_a = 0.0, auc_b = 0.0, brier = 0.0;
  double auc_a_se = 0.0, auc_b_se = 0.0, brier_se = 0.0;
  std::size_t datasets = 0;
};

/// Averages of the empirical AUC_A, AUC_B and Brier over uncensored datasets.
TrueValues true_values(const FineGrayConfig& config, Horizon tau, std::size_t n_datasets,
                       std::size_t n_per_dataset, std::uint64_t seed, unsigned threads = 0);

struct ScenarioConfig {
  std::string name = "scenario";
  double event1_fraction = 0.7;
  CensoringLevel level = CensoringLevel::Medium;
  CensoringTemplate censoring{};
  std::size_t n = 300;
  std::size_t replicates = 200;
  KernelSpec kernel = KernelSpec::span(kDefaultSpan);
  std::vector<Method> methods{Method::Proposed, Method::IpcwKm, Method::IpcwCox};
  std::uint64_t seed = 20240601;
  double tau_quantile = 0.65;
  std::optional<double> tau;  ///< fixed horizon instead of the quantile rule
  std::size_t truth_datasets = 20000;
  std::size_t calibration_size = 100000;
  /// A replicate fails for the proposed method when more than this fraction
  /// of subjects have an undefined case weight.
  double max_undefined_fraction = 0.05;
  FineGrayConfig generator{};  ///< p is overwritten from event1_fraction
  unsigned threads = 0;

  void validate() const;
};

struct MetricSummary {
  double mean = 0.0;
  double bias_pct = 0.0;
  double mse = 0.0;
  double mc_se = 0.0;
};

struct MethodSummary {
  Method method = Method::Proposed;
  MetricSummary auc_a, auc_b, brier;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  std::string first_failure;
};

struct ScenarioResult {
  ScenarioConfig config;
  FineGrayConfig generator;
  CensoringConfig censoring;
  double tau = 0.0;
  double censoring_rate = 0.0;
  double event1_rate = 0.0;
  TrueValues truth;
  std::vector<MethodSummary> methods;

  [[nodiscard]] const MethodSummary& method(Method m) const;
};

/// Calibrates censoring, picks tau, computes truth, then evaluates every method
/// on `replicates` datasets. Identical for a fixed seed at any thread count.
ScenarioResult run_scenario(const ScenarioConfig& scenario);

}  // namespace cracc

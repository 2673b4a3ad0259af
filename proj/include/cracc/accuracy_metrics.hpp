#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cracc/kernel_estimators.hpp"

namespace cracc {

/// Control group at the horizon. A: everyone who is not a case of interest
/// (includes subjects with a competing event). B: event-free subjects only.
enum class ControlDefinition { A, B };

std::string_view to_string(ControlDefinition def);

/// Per-subject case mass and control masses under both definitions. All
/// weighting estimators reduce to this table: the conditional-probability
/// weights give fractional masses, IPCW gives 0 or 1/G.
struct OutcomeMasses {
  std::vector<double> case_mass;
  std::vector<double> control_a;
  std::vector<double> control_b;
  /// Divisor for the calibration averages (subjects not excluded).
  std::size_t n_effective = 0;

  [[nodiscard]] std::size_t size() const noexcept { return case_mass.size(); }
  [[nodiscard]] std::span<const double> control(ControlDefinition def) const {
    return def == ControlDefinition::A ? control_a : control_b;
  }
};

OutcomeMasses outcome_masses(const CaseWeightMatrix& weights);

struct RocPoint {
  double threshold;
  double sensitivity;
  double specificity;
};

struct RocCurve {
  ControlDefinition definition = ControlDefinition::A;
  double tau = 0.0;
  /// Thresholds in decreasing order: +inf, each distinct score, -inf.
  std::vector<RocPoint> points;
  double auc_trapezoid = 0.0;
};

/// How the concordance AUC pairs case and control mass.
enum class AucPairing {
  CaseControl,  ///< case mass of i times control mass of j (the concordance definition)
  SameSubject   ///< W_1i (1 - W_1i) as literally printed; kept only for comparison
};

double sensitivity(const OutcomeMasses& m, std::span<const double> scores, double c);
double specificity(const OutcomeMasses& m, std::span<const double> scores, double c,
                   ControlDefinition def);
RocCurve roc_curve(const OutcomeMasses& m, std::span<const double> scores, ControlDefinition def,
                   double tau = 0.0);
/// Weighted Mann-Whitney statistic over all ordered pairs, ties counted 1/2.
double auc_concordance(const OutcomeMasses& m, std::span<const double> scores,
                       ControlDefinition def);

double brier(const OutcomeMasses& m, std::span<const double> scores);

struct KlScore {
  double value = 0.0;
  std::size_t clipped = 0;  ///< scores pulled into [kKlClip, 1 - kKlClip]
};
inline constexpr double kKlClip = 1e-12;
KlScore kullback_leibler(const OutcomeMasses& m, std::span<const double> scores);

double abs_err(const OutcomeMasses& m, std::span<const double> scores);

// Convenience overloads on the conditional-probability weights.
double sensitivity(const CaseWeightMatrix& w, std::span<const double> scores, double c);
double specificity(const CaseWeightMatrix& w, std::span<const double> scores, double c,
                   ControlDefinition def);
RocCurve roc_curve(const CaseWeightMatrix& w, std::span<const double> scores,
                   ControlDefinition def);
double auc_concordance(const CaseWeightMatrix& w, std::span<const double> scores,
                       ControlDefinition def, AucPairing pairing = AucPairing::CaseControl);
double brier(const CaseWeightMatrix& w, std::span<const double> scores);
KlScore kullback_leibler(const CaseWeightMatrix& w, std::span<const double> scores);
double abs_err(const CaseWeightMatrix& w, std::span<const double> scores);

struct DefinitionSet {
  bool a = true;
  bool b = true;
};

struct AccuracyReport {
  double tau = 0.0;
  std::optional<double> auc_a, auc_b;
  std::optional<double> auc_a_trapezoid, auc_b_trapezoid;
  // absent for raw-marker samples
  std::optional<double> brier, kl, abs_err;
  std::size_t kl_clipped = 0;
  std::size_t n_undefined_weights = 0;
};

/// Discrimination for the requested definitions plus calibration when the
/// scores are probabilities.
AccuracyReport accuracy_report(const OutcomeMasses& m, std::span<const double> scores, double tau,
                               bool calibration, DefinitionSet defs = {});

}  // namespace cracc

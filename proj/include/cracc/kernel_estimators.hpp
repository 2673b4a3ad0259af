#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cracc/data_model.hpp"

namespace cracc {

/// Right-continuous step function: `initial` before the first knot, then
/// values[i] on [knots[i], knots[i+1]).
struct StepFunction {
  std::vector<double> knots;
  std::vector<double> values;
  double initial = 0.0;

  [[nodiscard]] double at(double t) const;
  /// Left limit f(t-).
  [[nodiscard]] double left_limit(double t) const;
};

/// Kernel-weighted overall survival and cause-specific cumulative incidence
/// curves around one anchor subject's risk score.
struct ConditionalCurves {
  std::size_t anchor = 0;
  std::vector<double> grid;                ///< distinct event times with positive weight
  std::vector<double> survival;            ///< S(t | U_anchor) on the grid
  std::vector<std::vector<double>> cif;    ///< cif[k - 1][g] = F_k(grid[g] | U_anchor)

  [[nodiscard]] double survival_at(double t) const;
  [[nodiscard]] double cif_at(int cause, double t) const;
  [[nodiscard]] StepFunction survival_function() const;
  [[nodiscard]] StepFunction cif_function(int cause) const;
};

struct WeightedSubject {
  std::size_t index;
  double weight;
};

/// Neighbourhood queries over the risk score of a fixed sample.
///
/// Span mode ranks the scores (mid-ranks for ties) and keeps the ceil(n * span)
/// subjects closest in rank to the anchor; every subject tied in rank distance
/// with the last one admitted is also kept, so the neighbourhood can be a little
/// larger than the target. Only the ordering of the scores is used, which makes
/// everything downstream invariant to monotone score transforms.
///
/// Bandwidth mode weights subject j by K((U_j - U_anchor) / h) / h.
class ScoreNeighborhoods {
 public:
  ScoreNeighborhoods(const CompetingRiskSample& sample, const KernelSpec& spec);

  /// Subjects with positive weight, ordered by sample index (that is, by time).
  /// Throws DegenerateNeighborhood in span mode when fewer than 2 are selected.
  void neighbors(std::size_t anchor, std::vector<WeightedSubject>& out) const;

  [[nodiscard]] std::size_t target_size() const noexcept { return target_; }

 private:
  void span_neighbors(std::size_t anchor, std::vector<WeightedSubject>& out) const;
  void bandwidth_neighbors(std::size_t anchor, std::vector<WeightedSubject>& out) const;

  const CompetingRiskSample* sample_;
  KernelSpec spec_;
  std::size_t target_ = 0;
  // span mode: subjects ordered by score, grouped by tied score
  std::vector<std::size_t> by_score_;
  std::vector<std::size_t> group_begin_;  // size = groups + 1
  std::vector<std::size_t> group_of_;
  std::vector<long long> twice_rank_;     // 2 * mid-rank per group (exact)
};

/// Full weight vector (length n) for one anchor.
std::vector<double> kernel_weights(const CompetingRiskSample& sample, std::size_t anchor,
                                   const KernelSpec& spec);

/// Weighted product-limit survival and Aalen-Johansen CIFs from an explicit
/// weighted subset of the sample (members sorted by index).
ConditionalCurves weighted_curves(const CompetingRiskSample& sample,
                                  std::span<const WeightedSubject> members,
                                  std::size_t anchor = 0);

ConditionalCurves conditional_curves(const CompetingRiskSample& sample, std::size_t anchor,
                                     const KernelSpec& spec);

StepFunction conditional_survival(const CompetingRiskSample& sample, std::size_t anchor,
                                  const KernelSpec& spec);

StepFunction conditional_cif(const CompetingRiskSample& sample, std::size_t anchor, int cause,
                             const KernelSpec& spec);

enum class UndefinedWeightPolicy {
  Throw,   ///< raise UndefinedWeight at the first subject with S(T_i | U_i) ~ 0
  Exclude  ///< drop such subjects from every metric and report them
};

/// Per-subject, per-cause probability of being a case by tau given the observed
/// data. Row-major n x K.
struct CaseWeightMatrix {
  double tau = 0.0;
  std::size_t n_subjects = 0;
  int n_causes = 0;
  int cause_of_interest = 1;
  std::vector<double> weights;
  std::vector<std::size_t> undefined_subjects;
  std::vector<bool> excluded;
  /// Largest amount any entry or row sum had to be pulled back into [0, 1].
  double max_clamp_adjustment = 0.0;

  [[nodiscard]] double operator()(std::size_t i, int cause) const {
    return weights[i * static_cast<std::size_t>(n_causes) + static_cast<std::size_t>(cause - 1)];
  }
  [[nodiscard]] double case_weight(std::size_t i) const { return (*this)(i, cause_of_interest); }
  [[nodiscard]] double row_sum(std::size_t i) const;
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {weights.data() + i * static_cast<std::size_t>(n_causes),
            static_cast<std::size_t>(n_causes)};
  }
};

inline constexpr double kUndefinedSurvival = 1e-12;

CaseWeightMatrix case_weights(const CompetingRiskSample& sample, Horizon tau,
                              const KernelSpec& spec,
                              UndefinedWeightPolicy policy = UndefinedWeightPolicy::Throw);

}  // namespace cracc

#include "cracc/kernel_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "cracc/error.hpp"

namespace cracc {

namespace {

std::size_t step_position(const std::vector<double>& knots, double t) {
  // number of knots <= t
  return static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin());
}

double kernel_value(KernelShape shape, double x) {
  switch (shape) {
    case KernelShape::Uniform:
      return std::abs(x) <= 1.0 ? 0.5 : 0.0;
    case KernelShape::Epanechnikov:
      return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
    case KernelShape::Gaussian:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

// Weighted Aalen-Johansen recursion over a time-ordered weighted subset.
// Events at a time are processed before censorings at that time, which the
// sample ordering already guarantees.
class AalenJohansen {
 public:
  void load(const CompetingRiskSample& sample, std::span<const WeightedSubject> members) {
    n_causes_ = static_cast<std::size_t>(sample.n_causes());
    times_.clear();
    total_.clear();
    events_.clear();
    by_cause_.clear();
    const auto t = sample.times();
    const auto status = sample.statuses();
    for (const auto& m : members) {
      if (times_.empty() || t[m.index] != times_.back()) {
        times_.push_back(t[m.index]);
        total_.push_back(0.0);
        events_.push_back(0.0);
        by_cause_.resize(by_cause_.size() + n_causes_, 0.0);
      }
      total_.back() += m.weight;
      if (status[m.index] != 0) {
        events_.back() += m.weight;
        by_cause_[(times_.size() - 1) * n_causes_ + static_cast<std::size_t>(status[m.index] - 1)] +=
            m.weight;
      }
    }
    at_risk_.assign(times_.size(), 0.0);
    double suffix = 0.0;
    for (std::size_t g = times_.size(); g-- > 0;) {
      suffix += total_[g];
      at_risk_[g] = suffix;
    }
  }

  // Calls visit(time, survival, cif) after each event time, in time order.
  // Returning false from visit stops the recursion.
  template <class Visit>
  void run(Visit&& visit) {
    cif_.assign(n_causes_, 0.0);
    double survival = 1.0;
    for (std::size_t g = 0; g < times_.size(); ++g) {
      const double d = events_[g];
      if (d <= 0.0) continue;
      const double y = at_risk_[g];
      // zero risk set: no hazard contribution, curve stays frozen
      if (y <= 0.0) continue;
      for (std::size_t k = 0; k < n_causes_; ++k) {
        cif_[k] += survival * by_cause_[g * n_causes_ + k] / y;
      }
      survival = d >= y ? 0.0 : std::max(0.0, survival * (1.0 - d / y));
      if (!visit(times_[g], survival, std::span<const double>(cif_))) return;
    }
  }

 private:
  std::size_t n_causes_ = 0;
  std::vector<double> times_, total_, events_, by_cause_, at_risk_, cif_;
};

}  // namespace

double StepFunction::at(double t) const {
  const auto pos = step_position(knots, t);
  return pos == 0 ? initial : values[pos - 1];
}

double StepFunction::left_limit(double t) const {
  const auto pos =
      static_cast<std::size_t>(std::lower_bound(knots.begin(), knots.end(), t) - knots.begin());
  return pos == 0 ? initial : values[pos - 1];
}

double ConditionalCurves::survival_at(double t) const {
  const auto pos = step_position(grid, t);
  return pos == 0 ? 1.0 : survival[pos - 1];
}

double ConditionalCurves::cif_at(int cause, double t) const {
  const auto pos = step_position(grid, t);
  return pos == 0 ? 0.0 : cif.at(static_cast<std::size_t>(cause - 1))[pos - 1];
}

StepFunction ConditionalCurves::survival_function() const { return {grid, survival, 1.0}; }

StepFunction ConditionalCurves::cif_function(int cause) const {
  return {grid, cif.at(static_cast<std::size_t>(cause - 1)), 0.0};
}

ScoreNeighborhoods::ScoreNeighborhoods(const CompetingRiskSample& sample, const KernelSpec& spec)
    : sample_(&sample), spec_(spec) {
  const std::size_t n = sample.size();
  if (!spec.is_span()) return;

  const double raw = static_cast<double>(n) * spec.span_fraction();
  // guard against 600 * 0.05 = 30.000000000000004
  target_ = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  target_ = std::clamp<std::size_t>(target_, 1, n);

  const auto scores = sample.scores();
  by_score_.resize(n);
  std::iota(by_score_.begin(), by_score_.end(), std::size_t{0});
  std::sort(by_score_.begin(), by_score_.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
  });
  group_of_.resize(n);
  group_begin_.clear();
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (pos == 0 || scores[by_score_[pos]] != scores[by_score_[pos - 1]]) {
      group_begin_.push_back(pos);
    }
    group_of_[by_score_[pos]] = group_begin_.size() - 1;
  }
  group_begin_.push_back(n);
  const std::size_t groups = group_begin_.size() - 1;
  twice_rank_.resize(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    // 1-based positions begin+1 .. end, mid-rank = (begin + 1 + end) / 2
    twice_rank_[g] = static_cast<long long>(group_begin_[g] + 1 + group_begin_[g + 1]);
  }
}

void ScoreNeighborhoods::neighbors(std::size_t anchor, std::vector<WeightedSubject>& out) const {
  if (anchor >= sample_->size()) {
    throw Error(ErrorCode::InvalidArgument, "anchor index out of range");
  }
  out.clear();
  if (spec_.is_span()) {
    span_neighbors(anchor, out);
  } else {
    bandwidth_neighbors(anchor, out);
  }
}

void ScoreNeighborhoods::span_neighbors(std::size_t anchor,
                                        std::vector<WeightedSubject>& out) const {
  const auto groups = static_cast<long long>(group_begin_.size() - 1);
  const auto g = static_cast<long long>(group_of_[anchor]);
  auto group_size = [&](long long h) {
    return group_begin_[static_cast<std::size_t>(h) + 1] - group_begin_[static_cast<std::size_t>(h)];
  };
  constexpr long long kFar = std::numeric_limits<long long>::max();

  long long left = g - 1;
  long long right = g + 1;
  std::size_t count = group_size(g);
  while (count < target_ && (left >= 0 || right < groups)) {
    const long long dl = left >= 0 ? twice_rank_[g] - twice_rank_[left] : kFar;
    const long long dr = right < groups ? twice_rank_[right] - twice_rank_[g] : kFar;
    if (dl <= dr) count += group_size(left--);
    if (dr <= dl) count += group_size(right++);
  }
  if (count < 2) {
    throw Error(ErrorCode::DegenerateNeighborhood,
                "span neighbourhood of subject " + std::to_string(anchor) +
                    " holds fewer than 2 subjects; widen the span",
                anchor);
  }
  const std::size_t begin = group_begin_[static_cast<std::size_t>(left + 1)];
  const std::size_t end = group_begin_[static_cast<std::size_t>(right)];
  out.reserve(end - begin);
  for (std::size_t pos = begin; pos < end; ++pos) out.push_back({by_score_[pos], 1.0});
  std::sort(out.begin(), out.end(),
            [](const WeightedSubject& a, const WeightedSubject& b) { return a.index < b.index; });
}

void ScoreNeighborhoods::bandwidth_neighbors(std::size_t anchor,
                                             std::vector<WeightedSubject>& out) const {
  const auto& bw = spec_.bandwidth_params();
  const auto scores = sample_->scores();
  const double center = scores[anchor];
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double w = kernel_value(bw.shape, (scores[j] - center) / bw.h) / bw.h;
    if (w > 0.0) out.push_back({j, w});
  }
}

std::vector<double> kernel_weights(const CompetingRiskSample& sample, std::size_t anchor,
                                   const KernelSpec& spec) {
  ScoreNeighborhoods hood(sample, spec);
  std::vector<WeightedSubject> members;
  hood.neighbors(anchor, members);
  std::vector<double> w(sample.size(), 0.0);
  for (const auto& m : members) w[m.index] = m.weight;
  return w;
}

ConditionalCurves weighted_curves(const CompetingRiskSample& sample,
                                  std::span<const WeightedSubject> members, std::size_t anchor) {
  AalenJohansen aj;
  aj.load(sample, members);
  ConditionalCurves curves;
  curves.anchor = anchor;
  curves.cif.resize(static_cast<std::size_t>(sample.n_causes()));
  aj.run([&](double time, double survival, std::span<const double> cif) {
    curves.grid.push_back(time);
    curves.survival.push_back(survival);
    for (std::size_t k = 0; k < cif.size(); ++k) curves.cif[k].push_back(cif[k]);
    return true;
  });
  return curves;
}

ConditionalCurves conditional_curves(const CompetingRiskSample& sample, std::size_t anchor,
                                     const KernelSpec& spec) {
  ScoreNeighborhoods hood(sample, spec);
  std::vector<WeightedSubject> members;
  hood.neighbors(anchor, members);
  return weighted_curves(sample, members, anchor);
}

StepFunction conditional_survival(const CompetingRiskSample& sample, std::size_t anchor,
                                  const KernelSpec& spec) {
  return conditional_curves(sample, anchor, spec).survival_function();
}

StepFunction conditional_cif(const CompetingRiskSample& sample, std::size_t anchor, int cause,
                             const KernelSpec& spec) {
  if (cause < 1 || cause > sample.n_causes()) {
    throw Error(ErrorCode::InvalidArgument, "cause out of range");
  }
  return conditional_curves(sample, anchor, spec).cif_function(cause);
}

double CaseWeightMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (double w : row(i)) s += w;
  return s;
}

CaseWeightMatrix case_weights(const CompetingRiskSample& sample, Horizon tau,
                              const KernelSpec& spec, UndefinedWeightPolicy policy) {
  const std::size_t n = sample.size();
  const auto n_causes = static_cast<std::size_t>(sample.n_causes());
  const double horizon = tau.value();
  const auto times = sample.times();
  const auto status = sample.statuses();

  CaseWeightMatrix out;
  out.tau = horizon;
  out.n_subjects = n;
  out.n_causes = sample.n_causes();
  out.cause_of_interest = sample.cause_of_interest();
  out.weights.assign(n * n_causes, 0.0);
  out.excluded.assign(n, false);

  // observed status is known for everyone except subjects censored by tau
  bool any_censored_before = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] > horizon) continue;
    if (status[i] != 0) {
      out.weights[i * n_causes + static_cast<std::size_t>(status[i] - 1)] = 1.0;
    } else {
      any_censored_before = true;
    }
  }
  if (!any_censored_before) return out;

  ScoreNeighborhoods hood(sample, spec);
  AalenJohansen aj;
  std::vector<WeightedSubject> members;
  std::vector<double> cif_at_censoring(n_causes), cif_at_tau(n_causes);

  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] > horizon || status[i] != 0) continue;
    hood.neighbors(i, members);
    aj.load(sample, members);

    double surv_at_censoring = 1.0;
    std::fill(cif_at_censoring.begin(), cif_at_censoring.end(), 0.0);
    std::fill(cif_at_tau.begin(), cif_at_tau.end(), 0.0);
    const double censored_at = times[i];
    aj.run([&](double time, double survival, std::span<const double> cif) {
      if (time > horizon) return false;
      if (time <= censored_at) {
        surv_at_censoring = survival;
        std::copy(cif.begin(), cif.end(), cif_at_censoring.begin());
      }
      std::copy(cif.begin(), cif.end(), cif_at_tau.begin());
      return true;
    });

    if (surv_at_censoring < kUndefinedSurvival) {
      if (policy == UndefinedWeightPolicy::Throw) {
        throw Error(ErrorCode::UndefinedWeight,
                    "conditional survival is zero at the censoring time of subject " +
                        std::to_string(i) + "; widen the span",
                    i);
      }
      out.undefined_subjects.push_back(i);
      out.excluded[i] = true;
      continue;
    }

    double row_total = 0.0;
    for (std::size_t k = 0; k < n_causes; ++k) {
      const double raw = (cif_at_tau[k] - cif_at_censoring[k]) / surv_at_censoring;
      const double clamped = std::clamp(raw, 0.0, 1.0);
      out.max_clamp_adjustment = std::max(out.max_clamp_adjustment, std::abs(raw - clamped));
      out.weights[i * n_causes + k] = clamped;
      row_total += clamped;
    }
    if (row_total > 1.0) {
      out.max_clamp_adjustment = std::max(out.max_clamp_adjustment, row_total - 1.0);
      for (std::size_t k = 0; k < n_causes; ++k) out.weights[i * n_causes + k] /= row_total;
    }
  }
  return out;
}

}  // namespace cracc

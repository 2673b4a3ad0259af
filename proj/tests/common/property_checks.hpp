#pragma once

// Randomised invariants shared by the unit suite and the acceptance run.
// Each check builds its own input from a case index and returns an empty
// string on success, otherwise a description of the first violation.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "common/helpers.hpp"
#include "cracc/accuracy_metrics.hpp"
#include "cracc/kernel_estimators.hpp"

namespace props {

using namespace cracc;

inline testing::RandomSpec spec_for(int k) {
  testing::RandomSpec s;
  s.n_min = 10;
  s.n_max = 80;
  s.n_causes = 2 + k % 2;
  s.censor_prob = 0.15 + 0.1 * (k % 4);
  s.integer_times = k % 3 == 0;
  s.integer_scores = k % 5 == 0;
  return s;
}

inline double horizon_for(const CompetingRiskSample& s, Rng& rng) {
  return s.max_time() * (0.2 + 0.9 * uniform_open(rng));
}

inline KernelSpec kernel_for(int k) {
  switch (k % 3) {
    case 0: return KernelSpec::span(0.2);
    case 1: return KernelSpec::span(0.5);
    default: return KernelSpec::bandwidth(0.3, KernelShape::Gaussian);
  }
}

inline std::uint64_t key(int k) { return static_cast<std::uint64_t>(k); }

/// Entries in [0, 1], row sums at most 1, and 0/1 rows for known outcomes.
inline std::string weight_bounds(int k) {
  auto rng = stream_rng(101, key(k));
  const auto s = testing::random_sample(rng, spec_for(k));
  const double tau = horizon_for(s, rng);
  const auto w = case_weights(s, Horizon(tau), kernel_for(k), UndefinedWeightPolicy::Exclude);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double sum = 0.0;
    for (int c = 1; c <= s.n_causes(); ++c) {
      const double v = w(i, c);
      if (!(v >= 0.0 && v <= 1.0)) return fmt::format("W[{}][{}] = {}", i, c, v);
      sum += v;
    }
    if (sum > 1.0 + 1e-12) return fmt::format("row {} sums to {}", i, sum);
    const bool known = s[i].time > tau || s[i].status != 0;
    if (!known || w.excluded[i]) continue;
    for (int c = 1; c <= s.n_causes(); ++c) {
      const double expect = (s[i].time <= tau && s[i].status == c) ? 1.0 : 0.0;
      if (w(i, c) != expect) return fmt::format("known row {} cause {} is {}", i, c, w(i, c));
    }
  }
  return {};
}

/// ROC runs from (0, 0) to (1, 1) monotonically; AUC in [0, 1] and equal to the trapezoid.
inline std::string roc_monotone(int k) {
  auto rng = stream_rng(202, key(k));
  const auto s = testing::random_sample(rng, spec_for(k));
  const double tau = horizon_for(s, rng);
  const auto w = case_weights(s, Horizon(tau), kernel_for(k), UndefinedWeightPolicy::Exclude);
  const auto m = outcome_masses(w);
  for (auto def : {ControlDefinition::A, ControlDefinition::B}) {
    double cases = 0.0, controls = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      cases += m.case_mass[i];
      controls += m.control(def)[i];
    }
    if (!(cases > 0.0) || !(controls > 0.0)) continue;
    const auto roc = roc_curve(m, s.scores(), def);
    const auto& first = roc.points.front();
    const auto& last = roc.points.back();
    if (first.sensitivity != 0.0 || first.specificity != 1.0) return "ROC does not start at (0, 0)";
    if (std::abs(last.sensitivity - 1.0) > 1e-12 || std::abs(last.specificity) > 1e-12) {
      return "ROC does not end at (1, 1)";
    }
    for (std::size_t p = 1; p < roc.points.size(); ++p) {
      const auto& a = roc.points[p - 1];
      const auto& b = roc.points[p];
      if (!(b.threshold < a.threshold)) return fmt::format("thresholds not decreasing at {}", p);
      if (b.sensitivity < a.sensitivity - 1e-12) return fmt::format("Se drops at {}", p);
      if (b.specificity > a.specificity + 1e-12) return fmt::format("Sp rises at {}", p);
    }
    const double auc = auc_concordance(m, s.scores(), def);
    if (!(auc >= 0.0 && auc <= 1.0)) return fmt::format("AUC {} outside [0, 1]", auc);
    if (std::abs(auc - roc.auc_trapezoid) > 1e-10) {
      return fmt::format("AUC {} vs trapezoid {}", auc, roc.auc_trapezoid);
    }
  }
  return {};
}

/// Span mode sees only ranks: cubing the scores changes nothing, bit for bit.
inline std::string rank_invariance(int k) {
  auto rng = stream_rng(303, key(k));
  const auto s = testing::random_sample(rng, spec_for(k));
  const double tau = horizon_for(s, rng);
  std::vector<SubjectRecord> moved(s.records().begin(), s.records().end());
  for (auto& r : moved) r.score = std::pow(r.score, 3.0);
  const auto t = validate_sample(std::move(moved), s.options());
  const auto spec = KernelSpec::span(k % 2 ? 0.2 : 0.35);
  const auto w1 = case_weights(s, Horizon(tau), spec, UndefinedWeightPolicy::Exclude);
  const auto w2 = case_weights(t, Horizon(tau), spec, UndefinedWeightPolicy::Exclude);
  if (w1.weights != w2.weights || w1.excluded != w2.excluded) return "weights differ";
  const auto m1 = outcome_masses(w1);
  const auto m2 = outcome_masses(w2);
  for (auto def : {ControlDefinition::A, ControlDefinition::B}) {
    bool ok1 = true, ok2 = true;
    double a1 = 0.0, a2 = 0.0;
    try {
      a1 = auc_concordance(m1, s.scores(), def);
    } catch (const Error&) {
      ok1 = false;
    }
    try {
      a2 = auc_concordance(m2, t.scores(), def);
    } catch (const Error&) {
      ok2 = false;
    }
    if (ok1 != ok2 || a1 != a2) return fmt::format("AUC_{} {} vs {}", to_string(def), a1, a2);
  }
  return {};
}

/// Span 1 puts everyone in every neighbourhood: weights come from pooled KM and AJ.
inline std::string span_one_reduction(int k) {
  auto rng = stream_rng(404, key(k));
  const auto s = testing::random_sample(rng, spec_for(k));
  const auto d = testing::to_oracle(s);
  const double tau = horizon_for(s, rng);
  const auto w =
      case_weights(s, Horizon(tau), KernelSpec::span(1.0), UndefinedWeightPolicy::Exclude);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].time > tau || s[i].status != 0 || w.excluded[i]) continue;
    const double c = s[i].time;
    const double surv = oracle::km(d, c);
    for (int cause = 1; cause <= s.n_causes(); ++cause) {
      const double expect =
          std::clamp((oracle::aj(d, cause, tau) - oracle::aj(d, cause, c)) / surv, 0.0, 1.0);
      if (std::abs(w(i, cause) - expect) > 1e-12) {
        return fmt::format("subject {} cause {}: {} vs {}", i, cause, w(i, cause), expect);
      }
    }
  }
  return {};
}

/// S + sum_k F_k = 1 on the grid of every conditional estimate.
inline std::string aj_identity(int k) {
  auto rng = stream_rng(505, key(k));
  const auto s = testing::random_sample(rng, spec_for(k));
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  const auto curves = conditional_curves(s, pick(rng), kernel_for(k));
  for (std::size_t g = 0; g < curves.grid.size(); ++g) {
    double total = curves.survival[g];
    for (const auto& f : curves.cif) total += f[g];
    if (std::abs(total - 1.0) > 1e-10) return fmt::format("sum {} at t = {}", total, curves.grid[g]);
  }
  return {};
}

}  // namespace props

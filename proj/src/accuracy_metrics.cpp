#include "cracc/accuracy_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cracc/error.hpp"

namespace cracc {

namespace {

void check_sizes(const OutcomeMasses& m, std::span<const double> scores) {
  if (m.size() != scores.size() || m.control_a.size() != scores.size() ||
      m.control_b.size() != scores.size()) {
    throw Error(ErrorCode::InvalidArgument, "masses and scores differ in length");
  }
}

void check_probabilities(std::span<const double> scores) {
  for (double u : scores) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw Error(ErrorCode::RawMarkerNotAllowed,
                  "calibration metrics need scores that are probabilities in [0, 1]");
    }
  }
}

double total(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Indices ordered by score, ties broken by index so the order is reproducible.
std::vector<std::size_t> score_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
  });
  return order;
}

}  // namespace

std::string_view to_string(ControlDefinition def) { return def == ControlDefinition::A ? "A" : "B"; }

OutcomeMasses outcome_masses(const CaseWeightMatrix& weights) {
  OutcomeMasses m;
  const std::size_t n = weights.n_subjects;
  m.case_mass.resize(n);
  m.control_a.resize(n);
  m.control_b.resize(n);
  m.n_effective = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!weights.excluded.empty() && weights.excluded[i]) {
      m.case_mass[i] = m.control_a[i] = m.control_b[i] = 0.0;
      continue;
    }
    ++m.n_effective;
    const double w_case = weights.case_weight(i);
    m.case_mass[i] = w_case;
    m.control_a[i] = 1.0 - w_case;
    m.control_b[i] = std::max(0.0, 1.0 - weights.row_sum(i));
  }
  return m;
}

double sensitivity(const OutcomeMasses& m, std::span<const double> scores, double c) {
  check_sizes(m, scores);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    den += m.case_mass[i];
    if (scores[i] > c) num += m.case_mass[i];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::NoCases, "no case mass at this horizon");
  return num / den;
}

double specificity(const OutcomeMasses& m, std::span<const double> scores, double c,
                   ControlDefinition def) {
  check_sizes(m, scores);
  const auto control = m.control(def);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    den += control[i];
    if (scores[i] <= c) num += control[i];
  }
  if (!(den > 0.0)) {
    throw Error(ErrorCode::NoControls,
                "no control mass under definition " + std::string(to_string(def)));
  }
  return num / den;
}

RocCurve roc_curve(const OutcomeMasses& m, std::span<const double> scores, ControlDefinition def,
                   double tau) {
  check_sizes(m, scores);
  const auto control = m.control(def);
  const double case_total = total(m.case_mass);
  const double control_total = total(control);
  if (!(case_total > 0.0)) throw Error(ErrorCode::NoCases, "no case mass at this horizon");
  if (!(control_total > 0.0)) {
    throw Error(ErrorCode::NoControls,
                "no control mass under definition " + std::string(to_string(def)));
  }

  auto order = score_order(scores);
  std::reverse(order.begin(), order.end());

  RocCurve roc;
  roc.definition = def;
  roc.tau = tau;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  roc.points.push_back({kInf, 0.0, 1.0});
  double case_above = 0.0, control_above = 0.0;
  for (std::size_t pos = 0; pos < order.size();) {
    const double c = scores[order[pos]];
    // Se(c) and Sp(c) only see subjects strictly above c
    roc.points.push_back(
        {c, case_above / case_total, (control_total - control_above) / control_total});
    for (; pos < order.size() && scores[order[pos]] == c; ++pos) {
      case_above += m.case_mass[order[pos]];
      control_above += control[order[pos]];
    }
  }
  roc.points.push_back({-kInf, 1.0, 0.0});

  double area = 0.0;
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto& p = roc.points[k - 1];
    const auto& q = roc.points[k];
    const double dx = (1.0 - q.specificity) - (1.0 - p.specificity);
    area += 0.5 * dx * (p.sensitivity + q.sensitivity);
  }
  roc.auc_trapezoid = area;
  return roc;
}

double auc_concordance(const OutcomeMasses& m, std::span<const double> scores,
                       ControlDefinition def) {
  check_sizes(m, scores);
  const auto control = m.control(def);
  const auto order = score_order(scores);
  double num = 0.0, control_below = 0.0, case_total = 0.0;
  for (std::size_t pos = 0; pos < order.size();) {
    const double c = scores[order[pos]];
    double case_here = 0.0, control_here = 0.0;
    for (; pos < order.size() && scores[order[pos]] == c; ++pos) {
      case_here += m.case_mass[order[pos]];
      control_here += control[order[pos]];
    }
    num += case_here * (control_below + 0.5 * control_here);
    control_below += control_here;
    case_total += case_here;
  }
  const double pairs = case_total * control_below;
  if (!(pairs > 0.0)) {
    throw Error(ErrorCode::NoPairs, case_total > 0.0 ? "no control mass" : "no case mass");
  }
  return num / pairs;
}

double brier(const OutcomeMasses& m, std::span<const double> scores) {
  check_sizes(m, scores);
  check_probabilities(scores);
  if (m.n_effective == 0) throw Error(ErrorCode::EmptySample, "no subjects to average over");
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double u = scores[i];
    loss += m.case_mass[i] * (1.0 - u) * (1.0 - u) + m.control_a[i] * u * u;
  }
  return loss / static_cast<double>(m.n_effective);
}

KlScore kullback_leibler(const OutcomeMasses& m, std::span<const double> scores) {
  check_sizes(m, scores);
  check_probabilities(scores);
  if (m.n_effective == 0) throw Error(ErrorCode::EmptySample, "no subjects to average over");
  KlScore kl;
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double u = scores[i];
    if (u < kKlClip || u > 1.0 - kKlClip) {
      u = std::clamp(u, kKlClip, 1.0 - kKlClip);
      ++kl.clipped;
    }
    loss -= m.case_mass[i] * std::log(u) + m.control_a[i] * std::log1p(-u);
  }
  kl.value = loss / static_cast<double>(m.n_effective);
  return kl;
}

double abs_err(const OutcomeMasses& m, std::span<const double> scores) {
  check_sizes(m, scores);
  check_probabilities(scores);
  if (m.n_effective == 0) throw Error(ErrorCode::EmptySample, "no subjects to average over");
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    loss += m.case_mass[i] * (1.0 - scores[i]) + m.control_a[i] * scores[i];
  }
  return loss / static_cast<double>(m.n_effective);
}

double sensitivity(const CaseWeightMatrix& w, std::span<const double> scores, double c) {
  return sensitivity(outcome_masses(w), scores, c);
}

double specificity(const CaseWeightMatrix& w, std::span<const double> scores, double c,
                   ControlDefinition def) {
  return specificity(outcome_masses(w), scores, c, def);
}

RocCurve roc_curve(const CaseWeightMatrix& w, std::span<const double> scores,
                   ControlDefinition def) {
  return roc_curve(outcome_masses(w), scores, def, w.tau);
}

double auc_concordance(const CaseWeightMatrix& w, std::span<const double> scores,
                       ControlDefinition def, AucPairing pairing) {
  if (pairing == AucPairing::CaseControl) return auc_concordance(outcome_masses(w), scores, def);

  // sum_i sum_j W_1i * control_i * [1(U_i > U_j) + 0.5 * 1(U_i = U_j)], both factors on i
  const auto m = outcome_masses(w);
  check_sizes(m, scores);
  const auto control = m.control(def);
  const auto order = score_order(scores);
  double num = 0.0, mass_total = 0.0, below = 0.0;
  for (std::size_t pos = 0; pos < order.size();) {
    const double c = scores[order[pos]];
    double mass_here = 0.0, count_here = 0.0;
    for (; pos < order.size() && scores[order[pos]] == c; ++pos) {
      const auto i = order[pos];
      if (!w.excluded.empty() && w.excluded[i]) continue;
      mass_here += m.case_mass[i] * control[i];
      count_here += 1.0;
    }
    num += mass_here * (below + 0.5 * count_here);
    below += count_here;
    mass_total += mass_here;
  }
  const double pairs = mass_total * below;
  if (!(pairs > 0.0)) throw Error(ErrorCode::NoPairs, "no subject carries both case and control mass");
  return num / pairs;
}

double brier(const CaseWeightMatrix& w, std::span<const double> scores) {
  return brier(outcome_masses(w), scores);
}

KlScore kullback_leibler(const CaseWeightMatrix& w, std::span<const double> scores) {
  return kullback_leibler(outcome_masses(w), scores);
}

double abs_err(const CaseWeightMatrix& w, std::span<const double> scores) {
  return abs_err(outcome_masses(w), scores);
}

AccuracyReport accuracy_report(const OutcomeMasses& m, std::span<const double> scores, double tau,
                               bool calibration, DefinitionSet defs) {
  AccuracyReport r;
  r.tau = tau;
  if (defs.a) {
    const auto roc = roc_curve(m, scores, ControlDefinition::A, tau);
    r.auc_a = auc_concordance(m, scores, ControlDefinition::A);
    r.auc_a_trapezoid = roc.auc_trapezoid;
  }
  if (defs.b) {
    const auto roc = roc_curve(m, scores, ControlDefinition::B, tau);
    r.auc_b = auc_concordance(m, scores, ControlDefinition::B);
    r.auc_b_trapezoid = roc.auc_trapezoid;
  }
  if (calibration) {
    r.brier = brier(m, scores);
    const auto kl = kullback_leibler(m, scores);
    r.kl = kl.value;
    r.kl_clipped = kl.clipped;
    r.abs_err = abs_err(m, scores);
  }
  return r;
}

}  // namespace cracc

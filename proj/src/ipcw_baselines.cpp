#include "cracc/ipcw_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cracc/error.hpp"

namespace cracc {

namespace {

// Distinct censoring times with their risk-set positions. Risk set at t is
// every subject with observed time >= t, so failures tied with a censoring
// still count as at risk for it.
struct CensoringGroup {
  double time;
  std::size_t first_at_risk;  // index of the first subject with time >= t
  std::size_t begin, end;     // censored subjects at t: [begin, end)
};

std::vector<CensoringGroup> censoring_groups(const CompetingRiskSample& sample) {
  const auto t = sample.times();
  const auto status = sample.statuses();
  std::vector<CensoringGroup> groups;
  std::size_t first = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (i == 0 || t[i] != t[i - 1]) first = i;
    if (status[i] != 0) continue;
    if (!groups.empty() && groups.back().time == t[i]) {
      groups.back().end = i + 1;
    } else {
      groups.push_back({t[i], first, i, i + 1});
    }
  }
  return groups;
}

constexpr double kMaxLogHazardRatio = 30.0;

struct PartialLikelihood {
  double loglik = 0.0;
  double score = 0.0;
  double information = 0.0;
};

PartialLikelihood evaluate(std::span<const double> x, const std::vector<CensoringGroup>& groups,
                           double beta) {
  // suffix sums of exp(beta x), x exp(beta x), x^2 exp(beta x)
  const std::size_t n = x.size();
  std::vector<double> s0(n + 1, 0.0), s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const double r = std::exp(beta * x[i]);
    s0[i] = s0[i + 1] + r;
    s1[i] = s1[i + 1] + r * x[i];
    s2[i] = s2[i + 1] + r * x[i] * x[i];
  }
  PartialLikelihood pl;
  for (const auto& g : groups) {
    const double d = static_cast<double>(g.end - g.begin);
    double xsum = 0.0;
    for (std::size_t i = g.begin; i < g.end; ++i) xsum += x[i];
    const double a0 = s0[g.first_at_risk], a1 = s1[g.first_at_risk], a2 = s2[g.first_at_risk];
    const double mean = a1 / a0;
    pl.loglik += beta * xsum - d * std::log(a0);
    pl.score += xsum - d * mean;
    pl.information += d * (a2 / a0 - mean * mean);
  }
  return pl;
}

}  // namespace

double CensoringModel::survival(double t, double score) const {
  if (kind == Kind::KM) return curve.at(t);
  return std::exp(-curve.at(t) * std::exp(coefficient * (score - center)));
}

double CensoringModel::survival_left(double t, double score) const {
  if (kind == Kind::KM) return curve.left_limit(t);
  return std::exp(-curve.left_limit(t) * std::exp(coefficient * (score - center)));
}

CensoringModel fit_censoring_km(const CompetingRiskSample& sample) {
  CensoringModel model;
  model.kind = CensoringModel::Kind::KM;
  model.curve.initial = 1.0;
  const double n = static_cast<double>(sample.size());
  double g = 1.0;
  for (const auto& grp : censoring_groups(sample)) {
    const double at_risk = n - static_cast<double>(grp.first_at_risk);
    g *= 1.0 - static_cast<double>(grp.end - grp.begin) / at_risk;
    model.curve.knots.push_back(grp.time);
    model.curve.values.push_back(g);
  }
  return model;
}

CensoringModel fit_censoring_cox(const CompetingRiskSample& sample, const CoxOptions& options) {
  const auto groups = censoring_groups(sample);
  CensoringModel model;
  model.kind = CensoringModel::Kind::CoxOnScore;
  model.curve.initial = 0.0;
  // Nothing censored: the partial likelihood is flat and the Breslow
  // baseline is identically zero, so G = 1 whatever the coefficient.
  if (groups.empty()) return model;

  const auto scores = sample.scores();
  std::size_t n_censored = 0;
  double cmin = scores[groups.front().begin], cmax = cmin;
  for (const auto& g : groups) {
    n_censored += g.end - g.begin;
    for (std::size_t i = g.begin; i < g.end; ++i) {
      cmin = std::min(cmin, scores[i]);
      cmax = std::max(cmax, scores[i]);
    }
  }
  if (n_censored < 2) {
    throw Error(ErrorCode::SingularFit, "censoring model needs at least 2 censored subjects");
  }
  if (!(cmax > cmin)) {
    throw Error(ErrorCode::SingularFit, "scores do not vary among censored subjects");
  }

  double center = 0.0;
  for (double u : scores) center += u;
  center /= static_cast<double>(scores.size());
  std::vector<double> x(scores.begin(), scores.end());
  for (double& v : x) v -= center;

  double beta = 0.0;
  auto pl = evaluate(x, groups, beta);
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (std::abs(pl.score) < options.tolerance) {
      converged = true;
      break;
    }
    if (!(pl.information > 0.0) || !std::isfinite(pl.information)) {
      throw Error(ErrorCode::SingularFit, "censoring model information is not positive");
    }
    double step = pl.score / pl.information;
    auto next = evaluate(x, groups, beta + step);
    // halve until the likelihood does not drop
    for (int h = 0; h < 30 && !(next.loglik >= pl.loglik - 1e-12 * std::abs(pl.loglik)); ++h) {
      step *= 0.5;
      next = evaluate(x, groups, beta + step);
    }
    beta += step;
    pl = next;
    if (std::abs(step) < options.tolerance * 1e-2 && std::abs(pl.score) < 1e3 * options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(beta)) {
    throw Error(ErrorCode::NonConvergence, "censoring model did not converge in " +
                                               std::to_string(options.max_iterations) +
                                               " iterations");
  }
  // Under (quasi-)separation the score vanishes only because beta ran off to
  // infinity; a hazard ratio above e^kMaxLogHazardRatio across the observed
  // scores is treated as divergence.
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  if (std::abs(beta) * (*xmax - *xmin) > kMaxLogHazardRatio) {
    throw Error(ErrorCode::NonConvergence,
                "censoring model coefficient diverges (monotone likelihood)");
  }

  model.coefficient = beta;
  model.center = center;
  model.iterations = iter;
  model.standard_error = pl.information > 0.0 ? 1.0 / std::sqrt(pl.information) : 0.0;

  std::vector<double> s0(x.size() + 1, 0.0);
  for (std::size_t i = x.size(); i-- > 0;) s0[i] = s0[i + 1] + std::exp(beta * x[i]);
  double cumhaz = 0.0;
  for (const auto& g : groups) {
    cumhaz += static_cast<double>(g.end - g.begin) / s0[g.first_at_risk];
    model.curve.knots.push_back(g.time);
    model.curve.values.push_back(cumhaz);
  }
  return model;
}

IpcwWeights ipcw_weights(const CensoringModel& model, const CompetingRiskSample& sample,
                         Horizon tau) {
  IpcwWeights w;
  w.tau = tau.value();
  w.weights.assign(sample.size(), 0.0);
  const auto t = sample.times();
  const auto status = sample.statuses();
  const auto u = sample.scores();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double g;
    if (t[i] <= w.tau && status[i] != 0) {
      g = model.survival_left(t[i], u[i]);
    } else if (t[i] > w.tau) {
      g = model.survival(w.tau, u[i]);
    } else {
      continue;
    }
    if (!(g > 0.0)) {
      throw Error(ErrorCode::ZeroCensoringProbability,
                  "estimated censoring survival is 0 for subject " + std::to_string(i), i);
    }
    w.weights[i] = 1.0 / g;
  }
  return w;
}

OutcomeMasses ipcw_masses(const IpcwWeights& weights, const CompetingRiskSample& sample) {
  const std::size_t n = sample.size();
  if (weights.weights.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "IPCW weights do not match the sample");
  }
  OutcomeMasses m;
  m.case_mass.assign(n, 0.0);
  m.control_a.assign(n, 0.0);
  m.control_b.assign(n, 0.0);
  m.n_effective = n;
  const auto t = sample.times();
  const auto status = sample.statuses();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.weights[i];
    if (w == 0.0) continue;
    if (t[i] > weights.tau) {
      m.control_a[i] = w;
      m.control_b[i] = w;
    } else if (status[i] == sample.cause_of_interest()) {
      m.case_mass[i] = w;
    } else {
      m.control_a[i] = w;
    }
  }
  return m;
}

AccuracyReport ipcw_metrics(const IpcwWeights& weights, const CompetingRiskSample& sample,
                            DefinitionSet defs) {
  return accuracy_report(ipcw_masses(weights, sample), sample.scores(), weights.tau,
                         !sample.raw_marker(), defs);
}

}  // namespace cracc

#include "cracc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <fmt/format.h>

#include "cracc/error.hpp"
#include "cracc/parallel.hpp"

namespace cracc {

namespace {

// Stream ids below 2^60 belong to replicates.
constexpr std::uint64_t kPopulationStream = 1ull << 62;
constexpr std::uint64_t kTruthStream = 1ull << 61;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::InvalidConfig, message);
}

// Latent draws for one subject. Censoring uniforms are drawn whatever the
// censoring family so that every family sees the same cohort.
struct Draw {
  LatentRecord latent;
  double v1 = 0.0, v2 = 0.0;
};

Draw draw_subject(const FineGrayConfig& c, Rng& rng, std::normal_distribution<double>& normal) {
  Draw d;
  auto& l = d.latent;
  l.z1 = normal(rng);
  l.z2 = uniform_open(rng) < 0.5 ? 1.0 : 0.0;
  l.eta = c.linear_predictor(l.z1, l.z2);
  const double p1 = c.cause1_probability(l.eta);
  const double u_cause = uniform_open(rng);
  const double u_time = uniform_open(rng);
  if (u_cause < p1) {
    l.cause = 1;
    // invert F1(t|Z) = u * P1
    const double x = -std::expm1(std::exp(-l.eta) * std::log1p(-u_time * p1));
    const double h = -std::log1p(-x / c.p) / c.weibull_scale;
    l.event_time = std::pow(h, 1.0 / c.weibull_shape);
  } else {
    l.cause = 2;
    const double rate =
        std::exp(c.gamma[0] * l.z1 + c.gamma[1] * l.z2) * c.cause2_rate_scale;
    l.event_time = -std::log(u_time) / rate;
  }
  d.v1 = uniform_open(rng);
  d.v2 = uniform_open(rng);
  return d;
}

double censor_time(const CensoringConfig& censoring, double eta, double v1, double v2) {
  return std::visit(
      [&](const auto& cfg) -> double {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, NoCensoring>) {
          return std::numeric_limits<double>::infinity();
        } else if constexpr (std::is_same_v<T, MixtureUniformCensoring>) {
          const double total =
              std::accumulate(cfg.probabilities.begin(), cfg.probabilities.end(), 0.0);
          double cum = 0.0;
          std::size_t j = 0;
          for (; j + 1 < cfg.probabilities.size(); ++j) {
            cum += cfg.probabilities[j] / total;
            if (v1 <= cum) break;
          }
          return 3.0 * static_cast<double>(j) + 3.0 * v2;
        } else if constexpr (std::is_same_v<T, ThresholdCensoring>) {
          const double mean = (eta > cfg.upper || eta < cfg.lower) ? cfg.a : cfg.b;
          const double rate = std::pow(std::tgamma(1.0 + 1.0 / cfg.shape) / mean, cfg.shape);
          return std::pow(-std::log(v1) / rate, 1.0 / cfg.shape);
        } else {
          const double rate = cfg.rate * std::exp(cfg.coefficient * eta);
          return std::pow(-std::log(v1) / rate, 1.0 / cfg.shape);
        }
      },
      censoring);
}

std::vector<Draw> draw_population(const FineGrayConfig& config, std::size_t n, std::uint64_t seed,
                                  std::uint64_t stream) {
  auto rng = stream_rng(seed, stream);
  std::normal_distribution<double> normal;
  std::vector<Draw> out(n);
  for (auto& d : out) d = draw_subject(config, rng, normal);
  return out;
}

double population_censoring(const std::vector<Draw>& pop, const CensoringConfig& censoring) {
  std::size_t censored = 0;
  for (const auto& d : pop) {
    if (censor_time(censoring, d.latent.eta, d.v1, d.v2) < d.latent.event_time) ++censored;
  }
  return static_cast<double>(censored) / static_cast<double>(pop.size());
}

// type-7 quantile
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Monotone bisection for f(x) = target, on log(x) when `log_scale`.
// `increasing` gives the direction of f.
double bisect(double lo, double hi, bool increasing, bool log_scale, double target,
              const std::function<double(double)>& f, const std::string& what) {
  const double flo = f(lo), fhi = f(hi);
  const double fmin = std::min(flo, fhi), fmax = std::max(flo, fhi);
  if (target < fmin || target > fmax) {
    config_error(fmt::format("censoring fraction {:.3f} is unreachable for {} (range {:.3f} to {:.3f})",
                             target, what, fmin, fmax));
  }
  const auto to_x = [&](double y) { return log_scale ? std::exp(y) : y; };
  double a = log_scale ? std::log(lo) : lo, b = log_scale ? std::log(hi) : hi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + b);
    const double v = f(to_x(mid));
    if ((v < target) == increasing) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return to_x(0.5 * (a + b));
}

MetricSummary summarize(const std::vector<double>& values, double truth) {
  MetricSummary s;
  if (values.empty()) return s;
  const double m = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= m;
  double ss = 0.0;
  for (double v : values) {
    s.mse += (v - truth) * (v - truth);
    ss += (v - s.mean) * (v - s.mean);
  }
  s.mse /= m;
  s.mc_se = values.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  s.bias_pct = truth != 0.0 ? 100.0 * (s.mean - truth) / truth : 0.0;
  return s;
}

}  // namespace

void FineGrayConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) config_error("p must lie in (0, 1)");
  if (!(weibull_scale > 0.0) || !(weibull_shape > 0.0)) {
    config_error("Weibull scale and shape must be positive");
  }
  if (!(cause2_rate_scale > 0.0)) config_error("cause-2 rate scale must be positive");
  for (double v : {beta[0], beta[1], gamma[0], gamma[1]}) {
    if (!std::isfinite(v)) config_error("regression coefficients must be finite");
  }
}

double FineGrayConfig::cif1(double t, double eta) const {
  if (t <= 0.0) return 0.0;
  const double base = p * -std::expm1(-weibull_scale * std::pow(t, weibull_shape));
  return -std::expm1(std::exp(eta) * std::log1p(-base));
}

double FineGrayConfig::cause1_probability(double eta) const {
  return -std::expm1(std::exp(eta) * std::log1p(-p));
}

double p_for_event_fraction(double fraction) {
  if (std::abs(fraction - 0.3) < 1e-9) return 0.22;
  if (std::abs(fraction - 0.5) < 1e-9) return 0.42;
  if (std::abs(fraction - 0.7) < 1e-9) return 0.61;
  config_error(fmt::format("event1_fraction must be 0.3, 0.5 or 0.7 (got {})", fraction));
}

MixtureUniformCensoring tilted_mixture(double tilt) {
  MixtureUniformCensoring m;
  double total = 0.0;
  for (std::size_t j = 0; j < m.probabilities.size(); ++j) {
    m.probabilities[j] = std::exp(tilt * static_cast<double>(j));
    total += m.probabilities[j];
  }
  for (double& q : m.probabilities) q /= total;
  return m;
}

void validate(const CensoringConfig& censoring) {
  std::visit(
      [](const auto& cfg) {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, MixtureUniformCensoring>) {
          double total = 0.0;
          for (double q : cfg.probabilities) {
            if (!(q >= 0.0) || !std::isfinite(q)) config_error("mixture probabilities must be >= 0");
            total += q;
          }
          if (!(total > 0.0)) config_error("mixture probabilities sum to zero");
        } else if constexpr (std::is_same_v<T, ThresholdCensoring>) {
          if (!(cfg.a > 0.0 && cfg.b > 0.0 && cfg.shape > 0.0)) {
            config_error("threshold censoring needs a, b, shape > 0");
          }
          if (!(cfg.lower <= cfg.upper)) config_error("threshold bounds are reversed");
        } else if constexpr (std::is_same_v<T, CoxCensoring>) {
          if (!(cfg.rate > 0.0 && cfg.shape > 0.0) || !std::isfinite(cfg.coefficient)) {
            config_error("Cox censoring needs rate, shape > 0 and a finite coefficient");
          }
        }
      },
      censoring);
}

std::string describe(const CensoringConfig& censoring) {
  return std::visit(
      [](const auto& cfg) -> std::string {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, NoCensoring>) {
          return "none";
        } else if constexpr (std::is_same_v<T, MixtureUniformCensoring>) {
          return fmt::format("mixture-uniform probabilities [{:.4f}]",
                             fmt::join(cfg.probabilities, ", "));
        } else if constexpr (std::is_same_v<T, ThresholdCensoring>) {
          return fmt::format("threshold a={:.4f} b={:.4f} shape={}", cfg.a, cfg.b, cfg.shape);
        } else {
          return fmt::format("cox coefficient={} rate={:.6g} shape={}", cfg.coefficient, cfg.rate,
                             cfg.shape);
        }
      },
      censoring);
}

SimulatedData generate_dataset(const FineGrayConfig& config, const CensoringConfig& censoring,
                               std::size_t n, Horizon tau, std::uint64_t seed,
                               std::uint64_t stream) {
  config.validate();
  validate(censoring);
  if (n == 0) config_error("dataset size must be positive");
  const auto draws = draw_population(config, n, seed, stream);

  std::vector<SubjectRecord> records(n);
  std::vector<LatentRecord> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = draws[i].latent;
    auto& l = latent[i];
    l.censor_time = censor_time(censoring, l.eta, draws[i].v1, draws[i].v2);
    const bool observed = l.event_time <= l.censor_time;
    records[i] = {observed ? l.event_time : l.censor_time, observed ? l.cause : 0,
                  config.cif1(tau.value(), l.eta)};
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return record_order_less(records[a], records[b]);
  });
  std::vector<SubjectRecord> sorted_records(n);
  SimulatedData out{CompetingRiskSample{}, std::vector<LatentRecord>(n), tau.value()};
  for (std::size_t i = 0; i < n; ++i) {
    sorted_records[i] = records[order[i]];
    out.latent[i] = latent[order[i]];
  }
  out.sample = validate_sample(std::move(sorted_records), SampleOptions{});
  return out;
}

double censoring_fraction(const FineGrayConfig& config, const CensoringConfig& censoring,
                          std::uint64_t seed, std::size_t n) {
  config.validate();
  validate(censoring);
  return population_censoring(draw_population(config, n, seed, kPopulationStream), censoring);
}

std::string_view to_string(CensoringLevel level) {
  switch (level) {
    case CensoringLevel::None:
      return "none";
    case CensoringLevel::Medium:
      return "medium";
    case CensoringLevel::High:
      return "high";
  }
  return "unknown";
}

CensoringLevel parse_censoring_level(std::string_view name) {
  for (auto l : {CensoringLevel::None, CensoringLevel::Medium, CensoringLevel::High}) {
    if (name == to_string(l)) return l;
  }
  config_error("censoring level must be none, medium or high (got '" + std::string(name) + "')");
}

double censoring_target(CensoringLevel level) {
  switch (level) {
    case CensoringLevel::None:
      return 0.0;
    case CensoringLevel::Medium:
      return 0.275;
    case CensoringLevel::High:
      return 0.475;
  }
  return 0.0;
}

std::string_view to_string(CensoringFamily family) {
  switch (family) {
    case CensoringFamily::Independent:
      return "independent";
    case CensoringFamily::DependentThreshold:
      return "dependent-threshold";
    case CensoringFamily::DependentCox:
      return "dependent-cox";
  }
  return "unknown";
}

CensoringFamily parse_censoring_family(std::string_view name) {
  for (auto f : {CensoringFamily::Independent, CensoringFamily::DependentThreshold,
                 CensoringFamily::DependentCox}) {
    if (name == to_string(f)) return f;
  }
  config_error("censoring family must be independent, dependent-threshold or dependent-cox (got '" +
               std::string(name) + "')");
}

CensoringConfig calibrate_censoring(const FineGrayConfig& config, const CensoringTemplate& family,
                                    double target, std::uint64_t seed, std::size_t n) {
  config.validate();
  if (!(target > 0.0 && target < 1.0)) config_error("censoring target must lie in (0, 1)");
  const auto pop = draw_population(config, n, seed, kPopulationStream);
  switch (family.family) {
    case CensoringFamily::Independent: {
      const auto f = [&](double tilt) { return population_censoring(pop, tilted_mixture(tilt)); };
      return tilted_mixture(bisect(-15.0, 15.0, false, false, target, f, "the uniform mixture"));
    }
    case CensoringFamily::DependentThreshold: {
      const auto make = [&](double b) {
        return ThresholdCensoring{family.threshold_ratio * b, b, family.threshold_shape, -0.6, 0.4};
      };
      validate(make(1.0));
      const auto f = [&](double b) { return population_censoring(pop, make(b)); };
      return make(bisect(1e-4, 1e5, false, true, target, f, "threshold censoring"));
    }
    case CensoringFamily::DependentCox: {
      const auto make = [&](double rate) {
        return CoxCensoring{family.cox_coefficient, rate, family.cox_shape};
      };
      validate(make(1.0));
      const auto f = [&](double rate) { return population_censoring(pop, make(rate)); };
      return make(bisect(1e-10, 1e6, true, true, target, f, "Cox censoring"));
    }
  }
  config_error("unknown censoring family");
}

Horizon select_tau(const FineGrayConfig& config, const CensoringConfig& censoring,
                   std::uint64_t seed, std::size_t n, double q) {
  config.validate();
  validate(censoring);
  if (!(q > 0.0 && q < 1.0)) config_error("tau quantile must lie in (0, 1)");
  const auto pop = draw_population(config, n, seed, kPopulationStream);
  std::vector<double> observed(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& l = pop[i].latent;
    observed[i] = std::min(l.event_time, censor_time(censoring, l.eta, pop[i].v1, pop[i].v2));
  }
  return Horizon(quantile(std::move(observed), q));
}

TrueValues true_values(const FineGrayConfig& config, Horizon tau, std::size_t n_datasets,
                       std::size_t n_per_dataset, std::uint64_t seed, unsigned threads) {
  config.validate();
  if (n_datasets == 0 || n_per_dataset < 2) config_error("truth needs datasets >= 1 and n >= 2");
  std::vector<double> auc_a(n_datasets), auc_b(n_datasets), brier_v(n_datasets);
  std::vector<char> ok(n_datasets, 0);
  const double t = tau.value();
  parallel_for(n_datasets, threads, [&](std::size_t d) {
    const auto draws = draw_population(config, n_per_dataset, seed, kTruthStream + d);
    OutcomeMasses m;
    m.case_mass.resize(n_per_dataset);
    m.control_a.resize(n_per_dataset);
    m.control_b.resize(n_per_dataset);
    m.n_effective = n_per_dataset;
    std::vector<double> u(n_per_dataset);
    double cases = 0.0, controls_b = 0.0;
    for (std::size_t i = 0; i < n_per_dataset; ++i) {
      const auto& l = draws[i].latent;
      const bool is_case = l.event_time <= t && l.cause == 1;
      m.case_mass[i] = is_case ? 1.0 : 0.0;
      m.control_a[i] = is_case ? 0.0 : 1.0;
      m.control_b[i] = l.event_time > t ? 1.0 : 0.0;
      u[i] = config.cif1(t, l.eta);
      cases += m.case_mass[i];
      controls_b += m.control_b[i];
    }
    // datasets without a case or a control have no empirical AUC
    if (cases == 0.0 || cases == static_cast<double>(n_per_dataset) || controls_b == 0.0) return;
    auc_a[d] = auc_concordance(m, u, ControlDefinition::A);
    auc_b[d] = auc_concordance(m, u, ControlDefinition::B);
    brier_v[d] = brier(m, u);
    ok[d] = 1;
  });

  TrueValues tv;
  std::vector<double> a, b, br;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    if (!ok[d]) continue;
    a.push_back(auc_a[d]);
    b.push_back(auc_b[d]);
    br.push_back(brier_v[d]);
  }
  if (a.empty()) config_error("no truth dataset had both cases and controls");
  const auto sa = summarize(a, 0.0), sb = summarize(b, 0.0), sbr = summarize(br, 0.0);
  tv.auc_a = sa.mean;
  tv.auc_b = sb.mean;
  tv.brier = sbr.mean;
  tv.auc_a_se = sa.mc_se;
  tv.auc_b_se = sb.mc_se;
  tv.brier_se = sbr.mc_se;
  tv.datasets = a.size();
  return tv;
}

void ScenarioConfig::validate() const {
  if (replicates < 1) config_error("replicates must be at least 1");
  if (n < 10) config_error("n must be at least 10");
  if (methods.empty()) config_error("at least one method is required");
  if (truth_datasets < 1) config_error("truth_datasets must be at least 1");
  if (calibration_size < 100) config_error("calibration_size must be at least 100");
  if (!(tau_quantile > 0.0 && tau_quantile < 1.0)) config_error("tau_quantile must lie in (0, 1)");
  if (tau && !(*tau > 0.0)) config_error("tau must be positive");
  if (!(max_undefined_fraction >= 0.0 && max_undefined_fraction <= 1.0)) {
    config_error("max_undefined_fraction must lie in [0, 1]");
  }
  p_for_event_fraction(event1_fraction);
}

const MethodSummary& ScenarioResult::method(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "method not part of this scenario");
}

ScenarioResult run_scenario(const ScenarioConfig& scenario) {
  scenario.validate();
  ScenarioResult result;
  result.config = scenario;
  result.generator = scenario.generator;
  result.generator.p = p_for_event_fraction(scenario.event1_fraction);
  const auto& gen = result.generator;
  gen.validate();

  if (scenario.level == CensoringLevel::None) {
    result.censoring = NoCensoring{};
  } else {
    result.censoring = calibrate_censoring(gen, scenario.censoring, censoring_target(scenario.level),
                                           scenario.seed, scenario.calibration_size);
  }
  const Horizon tau = scenario.tau ? Horizon(*scenario.tau)
                                   : select_tau(gen, result.censoring, scenario.seed,
                                                scenario.calibration_size, scenario.tau_quantile);
  result.tau = tau.value();
  {
    const auto pop = draw_population(gen, scenario.calibration_size, scenario.seed, kPopulationStream);
    result.censoring_rate = population_censoring(pop, result.censoring);
    std::size_t c1 = 0;
    for (const auto& d : pop) c1 += d.latent.cause == 1 ? 1 : 0;
    result.event1_rate = static_cast<double>(c1) / static_cast<double>(pop.size());
  }
  result.truth = true_values(gen, tau, scenario.truth_datasets, scenario.n, scenario.seed,
                             scenario.threads);

  struct Outcome {
    bool ok = false;
    double auc_a = 0.0, auc_b = 0.0, brier = 0.0;
    std::string error;
  };
  const std::size_t n_methods = scenario.methods.size();
  std::vector<Outcome> outcomes(scenario.replicates * n_methods);

  EvaluateOptions options;
  options.kernel = scenario.kernel;
  options.policy = UndefinedWeightPolicy::Exclude;

  parallel_for(scenario.replicates, scenario.threads, [&](std::size_t r) {
    Outcome* row = &outcomes[r * n_methods];
    std::optional<SimulatedData> data;
    try {
      data = generate_dataset(gen, result.censoring, scenario.n, tau, scenario.seed, r);
    } catch (const Error& e) {
      for (std::size_t k = 0; k < n_methods; ++k) row[k].error = e.what();
      return;
    }
    for (std::size_t k = 0; k < n_methods; ++k) {
      try {
        const auto rep = evaluate(data->sample, tau, scenario.methods[k], options);
        if (static_cast<double>(rep.n_undefined_weights) >
            scenario.max_undefined_fraction * static_cast<double>(scenario.n)) {
          row[k].error = fmt::format("{} subjects with undefined case weight",
                                     rep.n_undefined_weights);
          continue;
        }
        row[k] = {true, *rep.auc_a, *rep.auc_b, *rep.brier, {}};
      } catch (const Error& e) {
        row[k].error = e.what();
      }
    }
  });

  for (std::size_t k = 0; k < n_methods; ++k) {
    MethodSummary s;
    s.method = scenario.methods[k];
    std::vector<double> a, b, br;
    for (std::size_t r = 0; r < scenario.replicates; ++r) {
      const auto& o = outcomes[r * n_methods + k];
      if (!o.ok) {
        ++s.n_failed;
        if (s.first_failure.empty()) s.first_failure = o.error;
        continue;
      }
      a.push_back(o.auc_a);
      b.push_back(o.auc_b);
      br.push_back(o.brier);
    }
    s.n_ok = a.size();
    s.auc_a = summarize(a, result.truth.auc_a);
    s.auc_b = summarize(b, result.truth.auc_b);
    s.brier = summarize(br, result.truth.brier);
    result.methods.push_back(std::move(s));
  }
  return result;
}

}  // namespace cracc

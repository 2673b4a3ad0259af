#include "cracc/report_io.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace cracc {

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

const BootstrapResult* find_interval(const MethodReport& m, Metric metric) {
  for (const auto& r : m.intervals) {
    if (r.metric == metric) return &r;
  }
  return nullptr;
}

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json summary_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"bias_pct", s.bias_pct}, {"mse", s.mse}, {"mc_se", s.mc_se}};
}

}  // namespace

std::string describe(const KernelSpec& spec) {
  if (spec.is_span()) return fmt::format("span={}", spec.span_fraction());
  const auto& b = spec.bandwidth_params();
  const char* shape = b.shape == KernelShape::Uniform        ? "uniform"
                      : b.shape == KernelShape::Epanechnikov ? "epanechnikov"
                                                             : "gaussian";
  return fmt::format("bandwidth={} kernel={}", b.h, shape);
}

void write_estimate_csv(std::ostream& out, const EstimateReport& report) {
  out << "method,tau,definition,auc,auc_trapezoid,auc_lower,auc_upper,brier,brier_lower,"
         "brier_upper,kl,kl_lower,kl_upper,abs_err,abs_err_lower,abs_err_upper,kl_clipped,"
         "n_undefined_weights\n";
  for (const auto& m : report.entries) {
    const auto& r = m.report;
    for (auto def : {ControlDefinition::A, ControlDefinition::B}) {
      if ((def == ControlDefinition::A && !report.definitions.a) ||
          (def == ControlDefinition::B && !report.definitions.b)) {
        continue;
      }
      const bool a = def == ControlDefinition::A;
      const auto ci = [&](Metric metric) -> std::pair<std::string, std::string> {
        const auto* b = find_interval(m, metric);
        if (!b) return {"", ""};
        return {num(b->lower), num(b->upper)};
      };
      const auto auc_ci = ci(a ? Metric::AucA : Metric::AucB);
      const auto brier_ci = ci(Metric::Brier);
      const auto kl_ci = ci(Metric::Kl);
      const auto abs_ci = ci(Metric::AbsErr);
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                         to_string(m.method), num(r.tau), to_string(def),
                         opt(a ? r.auc_a : r.auc_b),
                         opt(a ? r.auc_a_trapezoid : r.auc_b_trapezoid), auc_ci.first,
                         auc_ci.second, opt(r.brier), brier_ci.first, brier_ci.second, opt(r.kl),
                         kl_ci.first, kl_ci.second, opt(r.abs_err), abs_ci.first, abs_ci.second,
                         r.kl_clipped, r.n_undefined_weights);
    }
  }
}

void write_estimate_json(std::ostream& out, const EstimateReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["n_causes"] = report.n_causes;
  j["cause_of_interest"] = report.cause_of_interest;
  j["raw_marker"] = report.raw_marker;
  j["kernel"] = report.kernel;
  j["bootstrap"] = {{"replicates", report.bootstrap_replicates},
                    {"alpha", report.alpha},
                    {"seed", report.seed}};
  ordered_json results = ordered_json::array();
  for (const auto& m : report.entries) {
    const auto& r = m.report;
    ordered_json e;
    e["method"] = to_string(m.method);
    e["tau"] = r.tau;
    if (report.definitions.a) {
      e["auc_a"] = opt_json(r.auc_a);
      e["auc_a_trapezoid"] = opt_json(r.auc_a_trapezoid);
    }
    if (report.definitions.b) {
      e["auc_b"] = opt_json(r.auc_b);
      e["auc_b_trapezoid"] = opt_json(r.auc_b_trapezoid);
    }
    e["brier"] = opt_json(r.brier);
    e["kl"] = opt_json(r.kl);
    e["abs_err"] = opt_json(r.abs_err);
    e["kl_clipped"] = r.kl_clipped;
    e["n_undefined_weights"] = r.n_undefined_weights;
    if (!m.intervals.empty()) {
      ordered_json ci = ordered_json::object();
      for (const auto& b : m.intervals) {
        ci[std::string(to_string(b.metric))] = {{"estimate", b.estimate},
                                                {"lower", b.lower},
                                                {"upper", b.upper},
                                                {"replicates", b.replicates.size()},
                                                {"failures", b.failures}};
      }
      e["intervals"] = std::move(ci);
    }
    results.push_back(std::move(e));
  }
  j["results"] = std::move(results);
  out << j.dump(2) << '\n';
}

void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : roc.points) {
    out << fmt::format("{},{},{}\n", num(p.threshold), num(1.0 - p.specificity), num(p.sensitivity));
  }
}

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "scenario,family,event1_fraction,censoring,n,kernel,replicates,tau,censoring_rate,"
         "method,n_ok,n_failed,"
         "true_auc_a,mean_auc_a,bias_pct_auc_a,mse1e3_auc_a,"
         "true_auc_b,mean_auc_b,bias_pct_auc_b,mse1e3_auc_b,"
         "true_brier,mean_brier,bias_pct_brier,mse1e3_brier\n";
  for (const auto& r : results) {
    const auto& c = r.config;
    for (const auto& m : r.methods) {
      out << fmt::format(
          "{},{},{},{},{},{},{},{:.6f},{:.4f},{},{},{},"
          "{:.6f},{:.6f},{:.3f},{:.4f},{:.6f},{:.6f},{:.3f},{:.4f},{:.6f},{:.6f},{:.3f},{:.4f}\n",
          c.name, to_string(c.censoring.family), c.event1_fraction, to_string(c.level), c.n,
          describe(c.kernel), c.replicates, r.tau, r.censoring_rate, to_string(m.method), m.n_ok,
          m.n_failed, r.truth.auc_a, m.auc_a.mean, m.auc_a.bias_pct, 1e3 * m.auc_a.mse,
          r.truth.auc_b, m.auc_b.mean, m.auc_b.bias_pct, 1e3 * m.auc_b.mse, r.truth.brier,
          m.brier.mean, m.brier.bias_pct, 1e3 * m.brier.mse);
    }
  }
}

void write_scenario_json(std::ostream& out, const std::string& study,
                         const std::vector<ScenarioResult>& results) {
  ordered_json j;
  j["study"] = study;
  ordered_json cells = ordered_json::array();
  for (const auto& r : results) {
    const auto& c = r.config;
    ordered_json cell;
    cell["name"] = c.name;
    cell["family"] = to_string(c.censoring.family);
    cell["event1_fraction"] = c.event1_fraction;
    cell["censoring"] = to_string(c.level);
    cell["censoring_model"] = describe(r.censoring);
    cell["n"] = c.n;
    cell["kernel"] = describe(c.kernel);
    cell["replicates"] = c.replicates;
    cell["seed"] = c.seed;
    cell["p"] = r.generator.p;
    cell["tau"] = r.tau;
    cell["censoring_rate"] = r.censoring_rate;
    cell["event1_rate"] = r.event1_rate;
    cell["truth"] = {{"auc_a", r.truth.auc_a},       {"auc_b", r.truth.auc_b},
                     {"brier", r.truth.brier},       {"auc_a_se", r.truth.auc_a_se},
                     {"auc_b_se", r.truth.auc_b_se}, {"brier_se", r.truth.brier_se},
                     {"datasets", r.truth.datasets}};
    ordered_json methods = ordered_json::array();
    for (const auto& m : r.methods) {
      methods.push_back({{"method", to_string(m.method)},
                         {"n_ok", m.n_ok},
                         {"n_failed", m.n_failed},
                         {"first_failure", m.first_failure},
                         {"auc_a", summary_json(m.auc_a)},
                         {"auc_b", summary_json(m.auc_b)},
                         {"brier", summary_json(m.brier)}});
    }
    cell["methods"] = std::move(methods);
    cells.push_back(std::move(cell));
  }
  j["scenarios"] = std::move(cells);
  out << j.dump(2) << '\n';
}

}  // namespace cracc

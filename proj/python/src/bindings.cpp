#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "cracc/error.hpp"
#include "cracc/evaluate.hpp"
#include "cracc/inference.hpp"
#include "cracc/simulation.hpp"

namespace py = pybind11;
using namespace cracc;

namespace {

CompetingRiskSample make_sample(const std::vector<double>& time, const std::vector<int>& status,
                                const std::vector<double>& score, std::optional<int> n_causes,
                                int cause, bool raw_marker) {
  if (time.size() != status.size() || time.size() != score.size()) {
    throw Error(ErrorCode::InvalidArgument, "time, status and score must have the same length");
  }
  std::vector<SubjectRecord> recs(time.size());
  int max_status = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i] = {time[i], status[i], score[i]};
    max_status = std::max(max_status, status[i]);
  }
  SampleOptions opt;
  opt.n_causes = n_causes.value_or(std::max(2, max_status));
  opt.cause_of_interest = cause;
  opt.scale = raw_marker ? ScoreScale::RawMarker : ScoreScale::Probability;
  return validate_sample(std::move(recs), opt);
}

KernelShape parse_shape(const std::string& name) {
  if (name == "uniform") return KernelShape::Uniform;
  if (name == "epanechnikov") return KernelShape::Epanechnikov;
  if (name == "gaussian") return KernelShape::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + name + "'");
}

EvaluateOptions make_options(std::optional<double> span, std::optional<double> bandwidth,
                             const std::string& kernel, const std::string& definition,
                             bool exclude_undefined) {
  if (span && bandwidth) throw Error(ErrorCode::InvalidArgument, "give span or bandwidth, not both");
  EvaluateOptions opt;
  opt.kernel = bandwidth ? KernelSpec::bandwidth(*bandwidth, parse_shape(kernel))
                         : KernelSpec::span(span.value_or(kDefaultSpan));
  if (definition == "A") {
    opt.definitions = {true, false};
  } else if (definition == "B") {
    opt.definitions = {false, true};
  } else if (definition != "both") {
    throw Error(ErrorCode::InvalidArgument, "definition must be A, B or both");
  }
  opt.policy = exclude_undefined ? UndefinedWeightPolicy::Exclude : UndefinedWeightPolicy::Throw;
  return opt;
}

py::dict report_dict(const AccuracyReport& r) {
  py::dict d;
  auto put = [&](const char* key, const std::optional<double>& v) {
    d[key] = v ? py::cast(*v) : py::none();
  };
  d["tau"] = r.tau;
  put("auc_a", r.auc_a);
  put("auc_b", r.auc_b);
  put("auc_a_trapezoid", r.auc_a_trapezoid);
  put("auc_b_trapezoid", r.auc_b_trapezoid);
  put("brier", r.brier);
  put("kl", r.kl);
  put("abs_err", r.abs_err);
  d["kl_clipped"] = r.kl_clipped;
  d["n_undefined_weights"] = r.n_undefined_weights;
  return d;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_cracc, m) {
  m.doc() = "Time-dependent accuracy of risk scores under competing risks";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def(
      "evaluate",
      [](const std::vector<double>& time, const std::vector<int>& status,
         const std::vector<double>& score, double tau, const std::string& method,
         std::optional<double> span, std::optional<double> bandwidth, const std::string& kernel,
         const std::string& definition, std::optional<int> n_causes, int cause, bool raw_marker,
         bool exclude_undefined) {
        const auto s = make_sample(time, status, score, n_causes, cause, raw_marker);
        const auto opt = make_options(span, bandwidth, kernel, definition, exclude_undefined);
        return report_dict(evaluate(s, Horizon(tau), parse_method(method), opt));
      },
      py::arg("time"), py::arg("status"), py::arg("score"), py::arg("tau"),
      py::arg("method") = "proposed", py::arg("span") = py::none(),
      py::arg("bandwidth") = py::none(), py::arg("kernel") = "epanechnikov",
      py::arg("definition") = "both", py::arg("n_causes") = py::none(), py::arg("cause") = 1,
      py::arg("raw_marker") = false, py::arg("exclude_undefined") = false,
      "AUC under both control definitions plus calibration metrics at tau.");

  m.def(
      "roc",
      [](const std::vector<double>& time, const std::vector<int>& status,
         const std::vector<double>& score, double tau, const std::string& method,
         std::optional<double> span, std::optional<double> bandwidth, const std::string& kernel,
         const std::string& definition, std::optional<int> n_causes, int cause, bool raw_marker,
         bool exclude_undefined) {
        const auto s = make_sample(time, status, score, n_causes, cause, raw_marker);
        const auto opt = make_options(span, bandwidth, kernel, "both", exclude_undefined);
        if (definition != "A" && definition != "B") {
          throw Error(ErrorCode::InvalidArgument, "roc needs definition A or B");
        }
        const auto def = definition == "A" ? ControlDefinition::A : ControlDefinition::B;
        const auto roc = evaluate_roc(s, Horizon(tau), parse_method(method), def, opt);
        std::vector<double> thr, fpr, tpr;
        for (const auto& p : roc.points) {
          thr.push_back(p.threshold);
          fpr.push_back(1.0 - p.specificity);
          tpr.push_back(p.sensitivity);
        }
        py::dict d;
        d["threshold"] = to_array(thr);
        d["fpr"] = to_array(fpr);
        d["tpr"] = to_array(tpr);
        d["auc"] = roc.auc_trapezoid;
        return d;
      },
      py::arg("time"), py::arg("status"), py::arg("score"), py::arg("tau"),
      py::arg("method") = "proposed", py::arg("span") = py::none(),
      py::arg("bandwidth") = py::none(), py::arg("kernel") = "epanechnikov",
      py::arg("definition") = "A", py::arg("n_causes") = py::none(), py::arg("cause") = 1,
      py::arg("raw_marker") = false, py::arg("exclude_undefined") = false,
      "ROC points (threshold, fpr, tpr) from +inf down to -inf.");

  m.def(
      "case_weights",
      [](const std::vector<double>& time, const std::vector<int>& status,
         const std::vector<double>& score, double tau, std::optional<double> span,
         std::optional<double> bandwidth, const std::string& kernel, std::optional<int> n_causes,
         bool exclude_undefined) {
        const auto s = make_sample(time, status, score, n_causes, 1, false);
        const auto opt = make_options(span, bandwidth, kernel, "both", exclude_undefined);
        const auto w = case_weights(s, Horizon(tau), opt.kernel, opt.policy);
        // back to input order: validate_sample sorts stably by time
        std::vector<std::size_t> order(time.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return record_order_less({time[a], status[a], score[a]}, {time[b], status[b], score[b]});
        });
        const auto k = static_cast<std::size_t>(w.n_causes);
        py::array_t<double> out({static_cast<py::ssize_t>(w.n_subjects),
                                  static_cast<py::ssize_t>(k)});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t sorted = 0; sorted < order.size(); ++sorted) {
          for (std::size_t c = 0; c < k; ++c) {
            view(static_cast<py::ssize_t>(order[sorted]), static_cast<py::ssize_t>(c)) =
                w.weights[sorted * k + c];
          }
        }
        return out;
      },
      py::arg("time"), py::arg("status"), py::arg("score"), py::arg("tau"),
      py::arg("span") = py::none(), py::arg("bandwidth") = py::none(),
      py::arg("kernel") = "epanechnikov", py::arg("n_causes") = py::none(),
      py::arg("exclude_undefined") = false,
      "n x K matrix of P(cause k by tau | data), rows in input order.");

  m.def(
      "bootstrap",
      [](const std::vector<double>& time, const std::vector<int>& status,
         const std::vector<double>& score, double tau, const std::vector<std::string>& metrics,
         const std::string& method, std::optional<double> span, std::optional<double> bandwidth,
         const std::string& kernel, std::size_t replicates, double alpha, std::uint64_t seed,
         unsigned threads) {
        const auto s = make_sample(time, status, score, std::nullopt, 1, false);
        const auto opt = make_options(span, bandwidth, kernel, "both", true);
        std::vector<Metric> ms;
        for (const auto& name : metrics) ms.push_back(parse_metric(name));
        BootstrapOptions b;
        b.replicates = replicates;
        b.alpha = alpha;
        b.seed = seed;
        b.threads = threads;
        py::dict out;
        for (const auto& r : bootstrap(s, Horizon(tau), parse_method(method), opt, ms, b)) {
          py::dict d;
          d["estimate"] = r.estimate;
          d["lower"] = r.lower;
          d["upper"] = r.upper;
          d["failures"] = r.failures;
          d["replicates"] = to_array(r.replicates);
          out[py::str(std::string(to_string(r.metric)))] = d;
        }
        return out;
      },
      py::arg("time"), py::arg("status"), py::arg("score"), py::arg("tau"),
      py::arg("metrics") = std::vector<std::string>{"auc_a", "auc_b", "brier"},
      py::arg("method") = "proposed", py::arg("span") = py::none(),
      py::arg("bandwidth") = py::none(), py::arg("kernel") = "epanechnikov",
      py::arg("replicates") = 1000, py::arg("alpha") = 0.05, py::arg("seed") = 1,
      py::arg("threads") = 0, "Percentile bootstrap intervals, one entry per metric.");

  m.def(
      "generate",
      [](double event_fraction, const std::string& censoring, const std::string& family,
         std::size_t n, std::optional<double> tau, std::uint64_t seed) {
        FineGrayConfig g;
        g.p = p_for_event_fraction(event_fraction);
        CensoringTemplate t;
        t.family = parse_censoring_family(family);
        const auto level = parse_censoring_level(censoring);
        const CensoringConfig cens = level == CensoringLevel::None
                                         ? CensoringConfig{NoCensoring{}}
                                         : calibrate_censoring(g, t, censoring_target(level), seed);
        const Horizon h = tau ? Horizon(*tau) : select_tau(g, cens, seed);
        const auto data = generate_dataset(g, cens, n, h, seed);
        std::vector<double> time, score;
        std::vector<int> status;
        for (const auto& r : data.sample.records()) {
          time.push_back(r.time);
          status.push_back(r.status);
          score.push_back(r.score);
        }
        py::dict d;
        d["time"] = to_array(time);
        d["status"] = to_array(status);
        d["score"] = to_array(score);
        d["tau"] = h.value();
        return d;
      },
      py::arg("event_fraction") = 0.7, py::arg("censoring") = "medium",
      py::arg("family") = "independent", py::arg("n") = 300, py::arg("tau") = py::none(),
      py::arg("seed") = 1, "One simulated dataset from the Fine-Gray design.");

  m.def(
      "true_values",
      [](double event_fraction, double tau, std::size_t n, std::size_t datasets,
         std::uint64_t seed, unsigned threads) {
        FineGrayConfig g;
        g.p = p_for_event_fraction(event_fraction);
        const auto t = true_values(g, Horizon(tau), datasets, n, seed, threads);
        py::dict d;
        d["auc_a"] = t.auc_a;
        d["auc_b"] = t.auc_b;
        d["brier"] = t.brier;
        d["auc_a_se"] = t.auc_a_se;
        d["auc_b_se"] = t.auc_b_se;
        d["brier_se"] = t.brier_se;
        return d;
      },
      py::arg("event_fraction"), py::arg("tau"), py::arg("n") = 300, py::arg("datasets") = 2000,
      py::arg("seed") = 1, py::arg("threads") = 0,
      "Monte Carlo averages of the empirical AUC_A, AUC_B and Brier without censoring.");
}

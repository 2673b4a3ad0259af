#include "cracc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cracc/csv_io.hpp"
#include "cracc/error.hpp"
#include "cracc/evaluate.hpp"
#include "cracc/inference.hpp"
#include "cracc/report_io.hpp"
#include "cracc/scenario.hpp"
#include "cracc/simulation.hpp"

namespace cracc {

namespace fs = std::filesystem;

namespace {

constexpr const char* kStatusHelp =
    "Input CSV: header 'time,status,score'; status 0 = censored, 1..K = cause of failure.";

struct SmoothingFlags {
  std::optional<double> span;
  std::optional<double> bandwidth;
  std::string kernel = "epanechnikov";

  KernelSpec spec() const {
    if (bandwidth) {
      KernelShape shape;
      if (kernel == "uniform") {
        shape = KernelShape::Uniform;
      } else if (kernel == "epanechnikov") {
        shape = KernelShape::Epanechnikov;
      } else if (kernel == "gaussian") {
        shape = KernelShape::Gaussian;
      } else {
        throw Error(ErrorCode::InvalidConfig, "--kernel must be uniform, epanechnikov or gaussian");
      }
      return KernelSpec::bandwidth(*bandwidth, shape);
    }
    return KernelSpec::span(span.value_or(kDefaultSpan));
  }
};

struct DataFlags {
  std::string input;
  std::vector<double> taus;
  std::string methods = "proposed";
  std::string definition = "both";
  int cause = 1;
  int causes = 0;
  std::size_t boot = 0;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = ".";
  SmoothingFlags smoothing;
};

struct SimFlags {
  double event_fraction = 0.7;
  std::string level = "medium";
  std::string family = "independent";
  std::size_t n = 300;
  std::size_t datasets = 20000;
  std::optional<double> tau;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
};

DefinitionSet parse_definitions(const std::string& s) {
  if (s == "A") return {true, false};
  if (s == "B") return {false, true};
  if (s == "both") return {true, true};
  throw Error(ErrorCode::InvalidConfig, "--definition must be A, B or both");
}

void add_smoothing(CLI::App& cmd, SmoothingFlags& f) {
  auto* span = cmd.add_option("--span", f.span, "Fraction of nearest-in-score subjects (default 0.05)");
  auto* bw = cmd.add_option("--bandwidth", f.bandwidth, "Kernel bandwidth on the score scale");
  span->excludes(bw);
  cmd.add_option("--kernel", f.kernel, "Kernel for --bandwidth: uniform, epanechnikov, gaussian");
}

void add_data_flags(CLI::App& cmd, DataFlags& f) {
  cmd.add_option("--input", f.input, "CSV file with time,status,score")->required();
  cmd.add_option("--tau", f.taus, "Prediction horizon(s), comma separated")
      ->required()
      ->delimiter(',');
  cmd.add_option("--method", f.methods, "proposed, ipcw-km, ipcw-cox (comma separated)");
  cmd.add_option("--definition", f.definition, "Control definition: A, B or both");
  cmd.add_option("--cause", f.cause, "Cause of interest (default 1)");
  cmd.add_option("--causes", f.causes, "Number of causes (default: largest status, at least 2)");
  add_smoothing(cmd, f.smoothing);
  cmd.add_option("--seed", f.seed, "Random seed for the bootstrap");
  cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  cmd.add_option("--out", f.out, "Output directory");
}

void add_sim_flags(CLI::App& cmd, SimFlags& f) {
  cmd.add_option("--event-fraction", f.event_fraction, "Cause-1 fraction: 0.3, 0.5 or 0.7");
  cmd.add_option("--censoring", f.level, "none, medium or high");
  cmd.add_option("--family", f.family, "independent, dependent-threshold or dependent-cox");
  cmd.add_option("--n", f.n, "Subjects per dataset");
  cmd.add_option("--tau", f.tau, "Horizon (default: 65% quantile of observed times)");
  cmd.add_option("--seed", f.seed, "Random seed");
  cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

CompetingRiskSample load_sample(const DataFlags& f, std::ostream& err) {
  auto records = read_sample_csv(f.input);
  int max_status = 0;
  bool probabilities = true;
  for (const auto& r : records) {
    max_status = std::max(max_status, r.status);
    probabilities = probabilities && r.score >= 0.0 && r.score <= 1.0;
  }
  SampleOptions options;
  options.n_causes = f.causes > 0 ? f.causes : std::max(2, max_status);
  options.cause_of_interest = f.cause;
  options.scale = probabilities ? ScoreScale::Probability : ScoreScale::RawMarker;
  if (!probabilities) {
    err << "note: scores fall outside [0, 1]; treating them as a raw marker and skipping "
           "Brier, KL and absolute error\n";
  }
  return validate_sample(std::move(records), options);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  return out;
}

fs::path output_dir(const std::string& dir) {
  fs::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::InvalidConfig, "cannot create " + p.string() + ": " + ec.message());
  return p;
}

std::string tau_label(double tau) { return fmt::format("{}", tau); }

int cmd_estimate(const DataFlags& f, std::ostream& out, std::ostream& err) {
  const auto sample = load_sample(f, err);
  const auto methods = parse_methods(f.methods);
  EvaluateOptions options;
  options.kernel = f.smoothing.spec();
  options.definitions = parse_definitions(f.definition);
  BootstrapOptions boot;
  boot.replicates = f.boot;
  boot.alpha = f.alpha;
  boot.seed = f.seed;
  boot.threads = f.threads;
  if (f.boot > 0) boot.validate();

  EstimateReport report;
  report.n = sample.size();
  report.n_causes = sample.n_causes();
  report.cause_of_interest = sample.cause_of_interest();
  report.raw_marker = sample.raw_marker();
  report.kernel = describe(options.kernel);
  report.definitions = options.definitions;
  report.bootstrap_replicates = f.boot;
  report.alpha = f.alpha;
  report.seed = f.seed;

  std::vector<Metric> metrics;
  if (options.definitions.a) metrics.push_back(Metric::AucA);
  if (options.definitions.b) metrics.push_back(Metric::AucB);
  if (!sample.raw_marker()) {
    metrics.insert(metrics.end(), {Metric::Brier, Metric::Kl, Metric::AbsErr});
  }

  for (double t : f.taus) {
    const Horizon tau(t);
    if (horizon_beyond_data(sample, tau)) {
      err << fmt::format("warning: tau {} is beyond the last observed time {}\n", t,
                         sample.max_time());
    }
    for (auto m : methods) {
      MethodReport entry;
      entry.method = m;
      entry.report = evaluate(sample, tau, m, options);
      if (f.boot > 0) entry.intervals = bootstrap(sample, tau, m, options, metrics, boot);
      report.entries.push_back(std::move(entry));
    }
  }

  const auto dir = output_dir(f.out);
  {
    auto csv = open_output(dir / "report.csv");
    write_estimate_csv(csv, report);
  }
  {
    auto json = open_output(dir / "report.json");
    write_estimate_json(json, report);
  }
  for (const auto& e : report.entries) {
    const auto& r = e.report;
    out << fmt::format("{:<9} tau={:<8} AUC_A={:<10} AUC_B={:<10} Brier={}\n", to_string(e.method),
                       tau_label(r.tau), r.auc_a ? fmt::format("{:.4f}", *r.auc_a) : "-",
                       r.auc_b ? fmt::format("{:.4f}", *r.auc_b) : "-",
                       r.brier ? fmt::format("{:.4f}", *r.brier) : "-");
  }
  out << "wrote " << (dir / "report.csv").string() << " and " << (dir / "report.json").string()
      << '\n';
  return kExitOk;
}

int cmd_roc(const DataFlags& f, std::ostream& out, std::ostream& err) {
  const auto sample = load_sample(f, err);
  const auto methods = parse_methods(f.methods);
  EvaluateOptions options;
  options.kernel = f.smoothing.spec();
  const auto defs = parse_definitions(f.definition);
  const auto dir = output_dir(f.out);
  for (double t : f.taus) {
    const Horizon tau(t);
    for (auto m : methods) {
      for (auto def : {ControlDefinition::A, ControlDefinition::B}) {
        if ((def == ControlDefinition::A && !defs.a) || (def == ControlDefinition::B && !defs.b)) {
          continue;
        }
        const auto roc = evaluate_roc(sample, tau, m, def, options);
        const auto path =
            dir / fmt::format("roc_{}_tau{}_{}.csv", to_string(m), tau_label(t), to_string(def));
        auto file = open_output(path);
        write_roc_csv(file, roc);
        out << fmt::format("{} ({} points, AUC {:.4f})\n", path.string(), roc.points.size(),
                           roc.auc_trapezoid);
      }
    }
  }
  return kExitOk;
}

struct SimulateFlags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> truth_datasets;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  auto study = load_study(f.config);
  std::vector<ScenarioResult> results;
  for (auto& s : study.scenarios) {
    if (f.seed) s.seed = *f.seed;
    if (f.replicates) s.replicates = *f.replicates;
    if (f.truth_datasets) s.truth_datasets = *f.truth_datasets;
    if (f.threads > 0) s.threads = f.threads;
    s.validate();
    results.push_back(run_scenario(s));
    const auto& r = results.back();
    out << fmt::format("{}: tau={:.4f} censored={:.3f} truth AUC_A={:.4f} AUC_B={:.4f} Brier={:.4f}\n",
                       s.name, r.tau, r.censoring_rate, r.truth.auc_a, r.truth.auc_b, r.truth.brier);
    for (const auto& m : r.methods) {
      out << fmt::format("  {:<9} bias% AUC_A={:+.3f} AUC_B={:+.3f} Brier={:+.3f}  failed={}\n",
                         to_string(m.method), m.auc_a.bias_pct, m.auc_b.bias_pct,
                         m.brier.bias_pct, m.n_failed);
    }
  }
  const auto dir = output_dir(f.out);
  {
    auto csv = open_output(dir / "simulation.csv");
    write_scenario_csv(csv, results);
  }
  {
    auto json = open_output(dir / "simulation.json");
    write_scenario_json(json, study.name, results);
  }
  out << "wrote " << (dir / "simulation.csv").string() << '\n';
  return kExitOk;
}

struct SimSetup {
  FineGrayConfig generator;
  CensoringConfig censoring;
  Horizon tau;
};

SimSetup sim_setup(const SimFlags& f) {
  FineGrayConfig gen;
  gen.p = p_for_event_fraction(f.event_fraction);
  const auto level = parse_censoring_level(f.level);
  CensoringTemplate tmpl;
  tmpl.family = parse_censoring_family(f.family);
  CensoringConfig censoring = NoCensoring{};
  if (level != CensoringLevel::None) {
    censoring = calibrate_censoring(gen, tmpl, censoring_target(level), f.seed);
  }
  const Horizon tau = f.tau ? Horizon(*f.tau) : select_tau(gen, censoring, f.seed);
  return {gen, censoring, tau};
}

int cmd_truth(const SimFlags& f, std::ostream& out) {
  const auto setup = sim_setup(f);
  const auto tv = true_values(setup.generator, setup.tau, f.datasets, f.n, f.seed, f.threads);
  nlohmann::ordered_json j = {{"event1_fraction", f.event_fraction},
                              {"p", setup.generator.p},
                              {"censoring", f.level},
                              {"family", f.family},
                              {"tau", setup.tau.value()},
                              {"n", f.n},
                              {"datasets", tv.datasets},
                              {"auc_a", tv.auc_a},
                              {"auc_a_se", tv.auc_a_se},
                              {"auc_b", tv.auc_b},
                              {"auc_b_se", tv.auc_b_se},
                              {"brier", tv.brier},
                              {"brier_se", tv.brier_se}};
  out << fmt::format("tau={:.4f} AUC_A={:.4f} ({:.4f}) AUC_B={:.4f} ({:.4f}) Brier={:.4f} ({:.4f})\n",
                     setup.tau.value(), tv.auc_a, tv.auc_a_se, tv.auc_b, tv.auc_b_se, tv.brier,
                     tv.brier_se);
  if (!f.out.empty()) {
    const auto dir = output_dir(f.out);
    auto file = open_output(dir / "truth.json");
    file << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_generate(const SimFlags& f, std::ostream& out) {
  if (f.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out FILE is required");
  const auto setup = sim_setup(f);
  const auto data = generate_dataset(setup.generator, setup.censoring, f.n, setup.tau, f.seed);
  write_sample_csv(fs::path(f.out), data.sample.records());
  out << fmt::format("wrote {} subjects to {} (tau {:.6g})\n", f.n, f.out, setup.tau.value());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-dependent accuracy of risk scores under competing risks", "cracc"};
  app.footer(kStatusHelp);
  app.require_subcommand(1);

  DataFlags est_flags, roc_flags;
  auto* estimate = app.add_subcommand("estimate", "ROC/AUC, Brier, KL and absolute error at tau");
  add_data_flags(*estimate, est_flags);
  estimate->add_option("--boot", est_flags.boot, "Bootstrap replicates (0 = none)");
  estimate->add_option("--alpha", est_flags.alpha, "Interval level is 1 - alpha");

  auto* roc = app.add_subcommand("roc", "Write ROC curve points (threshold, fpr, tpr)");
  add_data_flags(*roc, roc_flags);

  SimulateFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation study from a TOML config");
  simulate->add_option("--config", sim_flags.config, "Scenario file")->required();
  simulate->add_option("--seed", sim_flags.seed, "Override the seed of every scenario");
  simulate->add_option("--replicates", sim_flags.replicates, "Override the replicate count");
  simulate->add_option("--truth-datasets", sim_flags.truth_datasets,
                       "Override the number of uncensored datasets used for the truth");
  simulate->add_option("--threads", sim_flags.threads, "Worker threads (0 = all cores)");
  simulate->add_option("--out", sim_flags.out, "Output directory");

  SimFlags truth_flags, gen_flags;
  auto* truth = app.add_subcommand("truth", "Monte Carlo true AUC and Brier for a design");
  add_sim_flags(*truth, truth_flags);
  truth->add_option("--datasets", truth_flags.datasets, "Uncensored datasets to average");
  truth->add_option("--out", truth_flags.out, "Directory for truth.json");

  auto* generate = app.add_subcommand("generate", "Write one simulated dataset as CSV");
  add_sim_flags(*generate, gen_flags);
  generate->add_option("--out", gen_flags.out, "Output CSV file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*estimate) return cmd_estimate(est_flags, out, err);
    if (*roc) return cmd_roc(roc_flags, out, err);
    if (*simulate) return cmd_simulate(sim_flags, out);
    if (*truth) return cmd_truth(truth_flags, out);
    if (*generate) return cmd_generate(gen_flags, out);
  } catch (const CsvParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool config_error =
        e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::InvalidArgument;
    return config_error ? kExitConfig : kExitEstimator;
  }
  return kExitConfig;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace cracc

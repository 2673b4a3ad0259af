#include "cracc/scenario.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <tomlplusplus/toml.hpp>

#include "cracc/error.hpp"

namespace cracc {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::InvalidConfig, message);
}

// Kernel choice is collected separately so a later span can override an
// earlier bandwidth and vice versa.
struct Cell {
  ScenarioConfig config;
  std::optional<double> span = kDefaultSpan;
  std::optional<double> bandwidth;
  KernelShape shape = KernelShape::Epanechnikov;
  bool named = false;
};

double as_double(const toml::node& node, std::string_view key) {
  if (auto v = node.value<double>()) return *v;
  fail(fmt::format("'{}' must be a number", key));
}

std::int64_t as_int(const toml::node& node, std::string_view key) {
  if (auto v = node.value<std::int64_t>()) return *v;
  fail(fmt::format("'{}' must be an integer", key));
}

std::size_t as_count(const toml::node& node, std::string_view key) {
  const auto v = as_int(node, key);
  if (v < 0) fail(fmt::format("'{}' must not be negative", key));
  return static_cast<std::size_t>(v);
}

std::string as_string(const toml::node& node, std::string_view key) {
  if (auto v = node.value<std::string>()) return *v;
  fail(fmt::format("'{}' must be a string", key));
}

KernelShape parse_shape(std::string_view name) {
  if (name == "uniform") return KernelShape::Uniform;
  if (name == "epanechnikov") return KernelShape::Epanechnikov;
  if (name == "gaussian") return KernelShape::Gaussian;
  fail(fmt::format("kernel must be uniform, epanechnikov or gaussian (got '{}')", name));
}

void apply(Cell& cell, std::string_view key, const toml::node& node) {
  auto& c = cell.config;
  try {
    if (key == "name") {
      c.name = as_string(node, key);
      cell.named = true;
    } else if (key == "event1_fraction") {
      c.event1_fraction = as_double(node, key);
    } else if (key == "censoring") {
      c.level = parse_censoring_level(as_string(node, key));
    } else if (key == "family") {
      c.censoring.family = parse_censoring_family(as_string(node, key));
    } else if (key == "n") {
      c.n = as_count(node, key);
    } else if (key == "replicates") {
      c.replicates = as_count(node, key);
    } else if (key == "span") {
      cell.span = as_double(node, key);
      cell.bandwidth.reset();
    } else if (key == "bandwidth") {
      cell.bandwidth = as_double(node, key);
      cell.span.reset();
    } else if (key == "kernel") {
      cell.shape = parse_shape(as_string(node, key));
    } else if (key == "methods") {
      const auto* arr = node.as_array();
      if (!arr) fail("'methods' must be an array of strings");
      std::string joined;
      for (const auto& m : *arr) {
        if (!joined.empty()) joined += ',';
        joined += as_string(m, key);
      }
      c.methods = parse_methods(joined);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(as_int(node, key));
    } else if (key == "tau") {
      c.tau = as_double(node, key);
    } else if (key == "tau_quantile") {
      c.tau_quantile = as_double(node, key);
    } else if (key == "truth_datasets") {
      c.truth_datasets = as_count(node, key);
    } else if (key == "calibration_size") {
      c.calibration_size = as_count(node, key);
    } else if (key == "max_undefined_fraction") {
      c.max_undefined_fraction = as_double(node, key);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(as_count(node, key));
    } else if (key == "threshold_ratio") {
      c.censoring.threshold_ratio = as_double(node, key);
    } else if (key == "threshold_shape") {
      c.censoring.threshold_shape = as_double(node, key);
    } else if (key == "cox_coefficient") {
      c.censoring.cox_coefficient = as_double(node, key);
    } else if (key == "cox_shape") {
      c.censoring.cox_shape = as_double(node, key);
    } else {
      fail(fmt::format("unknown scenario key '{}'", key));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    fail(fmt::format("'{}': {}", key, e.what()));
  }
}

void apply_table(Cell& cell, const toml::table& table) {
  for (const auto& [key, node] : table) apply(cell, key.str(), node);
}

void apply_generator(FineGrayConfig& g, const toml::table& table) {
  for (const auto& [k, node] : table) {
    const auto key = k.str();
    if (key == "beta" || key == "gamma") {
      const auto* arr = node.as_array();
      if (!arr || arr->size() != 2) fail(fmt::format("'{}' must be an array of two numbers", key));
      auto& target = key == "beta" ? g.beta : g.gamma;
      target = {as_double((*arr)[0], key), as_double((*arr)[1], key)};
    } else if (key == "weibull_scale") {
      g.weibull_scale = as_double(node, key);
    } else if (key == "weibull_shape") {
      g.weibull_shape = as_double(node, key);
    } else if (key == "cause2_rate_scale") {
      g.cause2_rate_scale = as_double(node, key);
    } else {
      fail(fmt::format("unknown generator key '{}'", key));
    }
  }
}

std::string default_name(const Cell& cell) {
  const auto& c = cell.config;
  std::string kernel = cell.span ? fmt::format("span{}", *cell.span)
                                 : fmt::format("h{}", cell.bandwidth.value_or(0.0));
  return fmt::format("{}-e{}-{}-n{}-{}", to_string(c.censoring.family), c.event1_fraction,
                     to_string(c.level), c.n, kernel);
}

ScenarioConfig finish(Cell cell) {
  try {
    cell.config.kernel = cell.span ? KernelSpec::span(*cell.span)
                                   : KernelSpec::bandwidth(*cell.bandwidth, cell.shape);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!cell.named) cell.config.name = default_name(cell);
  cell.config.validate();
  return cell.config;
}

// Grid axes expand in this order first (outermost), then any others by name.
constexpr std::string_view kAxisOrder[] = {"family", "event1_fraction", "censoring", "n", "span",
                                           "bandwidth"};

void expand_grid(const Cell& base, const toml::table& grid, std::vector<ScenarioConfig>& out) {
  std::vector<std::pair<std::string, const toml::array*>> axes;
  std::map<std::string, const toml::array*> rest;
  for (const auto& [k, node] : grid) {
    const auto* arr = node.as_array();
    if (!arr || arr->empty()) fail(fmt::format("grid axis '{}' must be a non-empty array", k.str()));
    rest.emplace(std::string(k.str()), arr);
  }
  for (auto key : kAxisOrder) {
    if (auto it = rest.find(std::string(key)); it != rest.end()) {
      axes.emplace_back(*it);
      rest.erase(it);
    }
  }
  for (auto& kv : rest) axes.emplace_back(kv);

  std::vector<std::size_t> pos(axes.size(), 0);
  for (;;) {
    Cell cell = base;
    for (std::size_t a = 0; a < axes.size(); ++a) apply(cell, axes[a].first, (*axes[a].second)[pos[a]]);
    out.push_back(finish(std::move(cell)));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].second->size()) break;
      pos[a] = 0;
      if (a == 0) return;
    }
    if (axes.empty()) return;
  }
}

}  // namespace

Study parse_study(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    fail(fmt::format("{}:{}:{}: {}", source, where.line, where.column, e.description()));
  }

  Study study;
  Cell base;
  for (const auto& [k, node] : root) {
    const auto key = k.str();
    if (key == "name") {
      study.name = as_string(node, key);
    } else if (key != "defaults" && key != "generator" && key != "grid" && key != "scenario") {
      fail(fmt::format("unknown top-level key '{}'", key));
    }
  }
  if (const auto* gen = root["generator"].as_table()) apply_generator(base.config.generator, *gen);
  if (const auto* defaults = root["defaults"].as_table()) apply_table(base, *defaults);

  if (const auto* grid = root["grid"].as_table()) expand_grid(base, *grid, study.scenarios);
  if (const auto* cells = root["scenario"].as_array()) {
    for (const auto& node : *cells) {
      const auto* t = node.as_table();
      if (!t) fail("each [[scenario]] entry must be a table");
      Cell cell = base;
      apply_table(cell, *t);
      study.scenarios.push_back(finish(std::move(cell)));
    }
  }
  if (study.scenarios.empty()) fail("config defines no scenarios (add [grid] or [[scenario]])");
  return study;
}

Study load_study(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_study(text.str(), path.string());
}

}  // namespace cracc

#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <tuple>
#include <vector>

#include "cracc/data_model.hpp"
#include "cracc/error.hpp"
#include "cracc/parallel.hpp"
#include "oracle/oracle.hpp"

namespace testing {

using Row = std::tuple<double, int, double>;

inline std::vector<cracc::SubjectRecord> rows(std::initializer_list<Row> list) {
  std::vector<cracc::SubjectRecord> out;
  for (const auto& [t, s, u] : list) out.push_back({t, s, u});
  return out;
}

inline cracc::CompetingRiskSample sample(std::initializer_list<Row> list, int n_causes = 2) {
  return cracc::validate_sample(rows(list), n_causes);
}

inline oracle::Data to_oracle(const cracc::CompetingRiskSample& s) {
  oracle::Data d;
  for (const auto& r : s.records()) {
    d.time.push_back(r.time);
    d.status.push_back(r.status);
    d.score.push_back(r.score);
  }
  return d;
}

struct RandomSpec {
  std::size_t n_min = 20, n_max = 120;
  int n_causes = 2;
  double censor_prob = 0.3;
  bool integer_times = false;   // produces ties
  bool integer_scores = false;  // produces tied scores
};

// Random valid sample; at least one event of cause 1 is forced.
inline cracc::CompetingRiskSample random_sample(cracc::Rng& rng, const RandomSpec& spec = {}) {
  std::uniform_int_distribution<std::size_t> size(spec.n_min, spec.n_max);
  std::uniform_int_distribution<int> cause(1, spec.n_causes);
  std::uniform_int_distribution<int> small(1, 8);
  const std::size_t n = size(rng);
  std::vector<cracc::SubjectRecord> recs(n);
  for (auto& r : recs) {
    r.time = spec.integer_times ? small(rng) : -std::log(cracc::uniform_open(rng)) * 3.0;
    r.status = cracc::uniform_open(rng) < spec.censor_prob ? 0 : cause(rng);
    r.score = spec.integer_scores ? small(rng) / 8.0 : cracc::uniform_open(rng);
  }
  recs.front().status = 1;
  return cracc::validate_sample(std::move(recs), spec.n_causes);
}

}  // namespace testing

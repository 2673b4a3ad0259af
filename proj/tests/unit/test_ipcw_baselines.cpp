#include <doctest.h>

#include <cmath>
#include <random>

#include "cracc/evaluate.hpp"
#include "cracc/ipcw_baselines.hpp"
#include "common/helpers.hpp"

using namespace cracc;

namespace {

// Breslow partial log-likelihood of the censoring hazard, written out directly.
double breslow_loglik(const CompetingRiskSample& s, double beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].status != 0) continue;
    double denom = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j].time >= s[i].time) denom += std::exp(beta * s[j].score);
    }
    ll += beta * s[i].score - std::log(denom);
  }
  return ll;
}

CompetingRiskSample cox_censored(std::uint64_t seed, std::size_t n, double theta) {
  Rng rng = stream_rng(seed, 0);
  std::vector<SubjectRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform_open(rng);
    const double t = -std::log(uniform_open(rng)) / 0.5;
    const double c = -std::log(uniform_open(rng)) / (0.4 * std::exp(theta * u));
    const int cause = uniform_open(rng) < 0.6 ? 1 : 2;
    recs.push_back({std::min(t, c), t <= c ? cause : 0, u});
  }
  return validate_sample(std::move(recs), 2);
}

}  // namespace

TEST_SUITE("ipcw_baselines") {
  TEST_CASE("reverse KM by hand") {
    const auto s = testing::sample({{1, 1, 0.2}, {2, 0, 0.5}, {3, 1, 0.7}});
    const auto g = fit_censoring_km(s);
    CHECK(g.survival(0.0, 0) == 1.0);
    CHECK(g.survival(1.9, 0) == 1.0);
    CHECK(g.survival(2.0, 0) == doctest::Approx(0.5));
    CHECK(g.survival(10.0, 0) == doctest::Approx(0.5));
    CHECK(g.survival_left(2.0, 0) == 1.0);

    const auto w = ipcw_weights(g, s, Horizon(5));
    CHECK(w.weights[0] == 1.0);
    CHECK(w.weights[1] == 0.0);
    CHECK(w.weights[2] == doctest::Approx(2.0));
  }

  TEST_CASE("no censoring gives unit weights") {
    const auto s = testing::sample({{1, 1, 0.2}, {2, 2, 0.5}, {3, 1, 0.7}, {4, 2, 0.1}});
    for (const auto& model : {fit_censoring_km(s), fit_censoring_cox(s)}) {
      CHECK(model.survival(100.0, 0.3) == 1.0);
      const auto w = ipcw_weights(model, s, Horizon(2.5));
      for (double v : w.weights) CHECK(v == 1.0);
    }
  }

  TEST_CASE("reverse KM matches the flipped-status oracle") {
    Rng rng = stream_rng(21, 0);
    for (int rep = 0; rep < 30; ++rep) {
      const auto s = testing::random_sample(rng, {.integer_times = rep % 2 == 0});
      const auto d = testing::to_oracle(s);
      const auto g = fit_censoring_km(s);
      for (double t : {0.5, 1.0, 2.0, 3.0, 4.5, 7.0, 20.0}) {
        CHECK(std::abs(g.survival(t, 0) - oracle::reverse_km(d, t)) < 1e-12);
        CHECK(std::abs(g.survival_left(t, 0) - oracle::reverse_km_left(d, t)) < 1e-12);
      }
    }
  }

  TEST_CASE("Cox fit maximises the partial likelihood") {
    const auto s = cox_censored(5, 150, 1.5);
    const auto m = fit_censoring_cox(s);
    const double b = m.coefficient;
    const double ll = breslow_loglik(s, b);
    CHECK(ll >= breslow_loglik(s, b + 1e-4));
    CHECK(ll >= breslow_loglik(s, b - 1e-4));
    CHECK(m.standard_error > 0.0);
    // G is a proper survival function
    double prev = 1.0;
    for (double t = 0.0; t < 10.0; t += 0.25) {
      const double g = m.survival(t, 0.5);
      CHECK(g <= prev + 1e-15);
      CHECK(g >= 0.0);
      prev = g;
    }
    CHECK(m.survival(0.0, 0.9) == 1.0);
  }

  TEST_CASE("Cox coefficient is recovered") {
    const double theta = 1.2;
    const auto s = cox_censored(6, 3000, theta);
    const auto m = fit_censoring_cox(s);
    CHECK(std::abs(m.coefficient - theta) < 3.0 * m.standard_error);
  }

  TEST_CASE("independent censoring gives a null coefficient") {
    const auto s = cox_censored(7, 3000, 0.0);
    const auto m = fit_censoring_cox(s);
    CHECK(std::abs(m.coefficient) < 3.0 * m.standard_error);
    const auto km = fit_censoring_km(s);
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(std::abs(m.survival(t, 0.5) - km.survival(t, 0.5)) < 0.03);
    }
  }

  TEST_CASE("degenerate Cox fits") {
    const auto one = testing::sample({{1, 1, 0.2}, {2, 0, 0.5}, {3, 1, 0.7}});
    try {
      fit_censoring_cox(one);
      FAIL("expected SingularFit");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularFit);
    }
    const auto flat = testing::sample({{1, 1, 0.2}, {2, 0, 0.5}, {3, 0, 0.5}, {4, 1, 0.7}});
    CHECK_THROWS_AS(fit_censoring_cox(flat), Error);
    // perfect separation: everyone with a high score is censored first
    const auto sep = testing::sample(
        {{1, 0, 0.9}, {2, 0, 0.8}, {3, 0, 0.7}, {4, 1, 0.3}, {5, 1, 0.2}, {6, 2, 0.1}});
    try {
      fit_censoring_cox(sep);
      FAIL("expected NonConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonConvergence);
    }
  }

  TEST_CASE("zero censoring probability names the subject") {
    // a reverse KM never reaches 0 before a failure or survivor, so use a hand-made model
    CensoringModel model;
    model.curve = {{1.5}, {0.0}, 1.0};
    const auto s = testing::sample({{1, 1, 0.2}, {2, 1, 0.5}, {3, 2, 0.6}});
    try {
      ipcw_weights(model, s, Horizon(2.5));
      FAIL("expected ZeroCensoringProbability");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroCensoringProbability);
      REQUIRE(e.subject().has_value());
      CHECK(*e.subject() == 1);
    }
  }

  TEST_CASE("uncensored data: every method equals the empirical metrics") {
    Rng rng = stream_rng(8, 0);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = testing::random_sample(rng, {.censor_prob = 0.0});
      const auto d = testing::to_oracle(s);
      const auto l = oracle::labels(d, 2.0);
      double cases = 0;
      for (double c : l.is_case) cases += c;
      if (cases == 0 || cases == d.size()) continue;
      const auto base = evaluate(s, Horizon(2.0), Method::Proposed, {.kernel = KernelSpec::span(1.0)});
      for (auto m : {Method::IpcwKm, Method::IpcwCox}) {
        const auto r = evaluate(s, Horizon(2.0), m);
        CHECK(*r.auc_a == doctest::Approx(*base.auc_a).epsilon(1e-12));
        CHECK(*r.brier == doctest::Approx(*base.brier).epsilon(1e-12));
        CHECK(*r.auc_a == doctest::Approx(oracle::auc(d.score, l.is_case, l.control_a)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("method names") {
    CHECK(parse_method("ipcw-km") == Method::IpcwKm);
    CHECK(parse_methods("proposed,ipcw-cox").size() == 2);
    CHECK_THROWS_AS(parse_method("nne"), Error);
    CHECK_THROWS_AS(parse_methods("proposed,proposed"), Error);
  }
}

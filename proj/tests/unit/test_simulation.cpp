#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cracc/simulation.hpp"
#include "common/helpers.hpp"

using namespace cracc;

TEST_SUITE("simulation") {
  TEST_CASE("cause-1 fraction for the 30% design") {
    FineGrayConfig g;
    g.p = p_for_event_fraction(0.3);
    CHECK(g.p == 0.22);
    const auto d = generate_dataset(g, NoCensoring{}, 100000, Horizon(2.0), 1);
    double c1 = 0;
    for (const auto& l : d.latent) c1 += l.cause == 1;
    CHECK(std::abs(c1 / 1e5 - 0.30) < 0.01);
  }

  TEST_CASE("late censoring mixture censors almost nobody") {
    FineGrayConfig g;
    g.weibull_scale = 2.0;
    MixtureUniformCensoring late;
    late.probabilities = {0, 0, 0, 0, 0, 1};
    CHECK(censoring_fraction(g, late, 3, 20000) < 0.01);
  }

  TEST_CASE("cause-1 times follow the closed-form subdistribution") {
    FineGrayConfig g;
    g.beta = {0.0, 0.0};  // every subject has Z beta = 0
    const auto d = generate_dataset(g, NoCensoring{}, 30000, Horizon(2.0), 4);
    std::vector<double> t;
    for (const auto& l : d.latent) {
      if (l.cause == 1) t.push_back(l.event_time);
    }
    REQUIRE(t.size() > 10000);
    std::sort(t.begin(), t.end());
    const double p1 = g.cause1_probability(0.0);
    double dmax = 0.0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double f = g.cif1(t[i], 0.0) / p1;
      dmax = std::max({dmax, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    // Kolmogorov p > 0.01
    CHECK(dmax * std::sqrt(n) < 1.628);
  }

  TEST_CASE("datasets are reproducible and aligned with their latent record") {
    FineGrayConfig g;
    const auto cens = tilted_mixture(-0.3);
    const auto a = generate_dataset(g, cens, 500, Horizon(2.5), 9, 3);
    const auto b = generate_dataset(g, cens, 500, Horizon(2.5), 9, 3);
    CHECK(a.sample == b.sample);
    const auto c = generate_dataset(g, cens, 500, Horizon(2.5), 9, 4);
    CHECK_FALSE(a.sample == c.sample);
    for (std::size_t i = 0; i < a.sample.size(); ++i) {
      const auto& l = a.latent[i];
      CHECK(a.sample[i].time == std::min(l.event_time, l.censor_time));
      CHECK(a.sample[i].status == (l.event_time <= l.censor_time ? l.cause : 0));
      CHECK(a.sample[i].score == g.cif1(2.5, l.eta));
    }
  }

  TEST_CASE("tau selection") {
    FineGrayConfig g;
    const auto medium = calibrate_censoring(g, {}, 0.275, 5, 50000);
    const auto high = calibrate_censoring(g, {}, 0.475, 5, 50000);
    CHECK(std::abs(censoring_fraction(g, medium, 5, 50000) - 0.275) < 0.002);
    CHECK(std::abs(censoring_fraction(g, high, 5, 50000) - 0.475) < 0.002);
    const auto t1 = select_tau(g, medium, 5, 50000);
    const auto t2 = select_tau(g, medium, 5, 50000);
    CHECK(t1 == t2);
    CHECK(select_tau(g, high, 5, 50000).value() < t1.value());

    // censoring inactive: tau is the quantile of event times
    MixtureUniformCensoring late;
    late.probabilities = {0, 0, 0, 0, 0, 1};
    FineGrayConfig fast = g;
    fast.weibull_scale = 5.0;
    fast.cause2_rate_scale = 5.0;
    const auto a = select_tau(fast, late, 6, 20000);
    const auto b = select_tau(fast, NoCensoring{}, 6, 20000);
    CHECK(a.value() == b.value());
  }

  TEST_CASE("truth for the 70% medium design") {
    FineGrayConfig g;
    g.p = p_for_event_fraction(0.7);
    const auto cens = calibrate_censoring(g, {}, 0.275, 20240601);
    const auto tau = select_tau(g, cens, 20240601);
    const auto tv = true_values(g, tau, 2000, 600, 11, 1);
    CHECK(tv.auc_a == doctest::Approx(0.698).epsilon(0.015 / 0.698));
    CHECK(tv.brier == doctest::Approx(0.195).epsilon(0.02 / 0.195));
    CHECK(tv.auc_b > tv.auc_a - 0.1);
    CHECK(tv.auc_a_se > 0.0);
  }

  TEST_CASE("uninformative scores have AUC one half") {
    FineGrayConfig g;
    g.beta = {0.0, 0.0};
    const auto tv = true_values(g, Horizon(2.0), 50, 200, 12, 1);
    CHECK(tv.auc_a == 0.5);
    CHECK(tv.auc_b == 0.5);
  }

  TEST_CASE("invalid configs") {
    FineGrayConfig g;
    g.p = 1.2;
    CHECK_THROWS_AS(g.validate(), Error);
    CHECK_THROWS_AS(p_for_event_fraction(0.4), Error);
    ScenarioConfig sc;
    sc.replicates = 0;
    CHECK_THROWS_AS(sc.validate(), Error);
    CHECK_THROWS_AS(validate(ThresholdCensoring{-1, 1, 2}), Error);
    // a target that the family cannot reach
    CHECK_THROWS_AS(calibrate_censoring(FineGrayConfig{}, {}, 0.99, 1, 5000), Error);
  }

  TEST_CASE("dependent censoring families calibrate") {
    FineGrayConfig g;
    CensoringTemplate t;
    t.family = CensoringFamily::DependentThreshold;
    const auto a = calibrate_censoring(g, t, 0.275, 3, 30000);
    CHECK(std::abs(censoring_fraction(g, a, 3, 30000) - 0.275) < 0.002);
    const auto& th = std::get<ThresholdCensoring>(a);
    CHECK(th.a == doctest::Approx(10.0 * th.b));
    t.family = CensoringFamily::DependentCox;
    const auto b = calibrate_censoring(g, t, 0.275, 3, 30000);
    CHECK(std::abs(censoring_fraction(g, b, 3, 30000) - 0.275) < 0.002);
  }

  TEST_CASE("scenario results do not depend on the thread count") {
    ScenarioConfig sc;
    sc.n = 120;
    sc.replicates = 6;
    sc.truth_datasets = 40;
    sc.calibration_size = 5000;
    sc.kernel = KernelSpec::span(0.2);
    sc.threads = 1;
    const auto one = run_scenario(sc);
    sc.threads = 3;
    const auto three = run_scenario(sc);
    REQUIRE(one.methods.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(one.methods[k].auc_a.mean == three.methods[k].auc_a.mean);
      CHECK(one.methods[k].brier.mse == three.methods[k].brier.mse);
      CHECK(one.methods[k].n_ok + one.methods[k].n_failed == 6);
    }
    CHECK(one.tau == three.tau);
    CHECK(one.truth.auc_a == three.truth.auc_a);
  }
}

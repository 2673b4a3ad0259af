#include <doctest.h>

#include <cmath>

#include "cracc/kernel_estimators.hpp"
#include "common/helpers.hpp"

using namespace cracc;

namespace {

// n = 10; the censored anchor at t = 2 sees F1(2) = 0.1, S(2) = 0.6, F1(5) = 0.4
CompetingRiskSample weight_example() {
  return testing::sample({{1, 1, 0.10},
                          {1, 2, 0.20},
                          {1, 2, 0.30},
                          {1, 2, 0.40},
                          {2, 0, 0.50},
                          {2, 0, 0.60},
                          {3, 1, 0.70},
                          {3, 1, 0.80},
                          {6, 0, 0.90},
                          {6, 2, 0.95}});
}

}  // namespace

TEST_SUITE("kernel_estimators") {
  TEST_CASE("span window keeps the nearest ranks") {
    std::vector<SubjectRecord> recs;
    for (int i = 0; i < 10; ++i) recs.push_back({1.0 + i, i == 0 ? 1 : 0, 0.05 + 0.1 * i});
    const auto s = validate_sample(recs, 2);
    // anchor rank 5 (index 4): ranks 3..7
    const auto w = kernel_weights(s, 4, KernelSpec::span(0.5));
    for (std::size_t j = 0; j < 10; ++j) CHECK(w[j] == ((j >= 2 && j <= 6) ? 1.0 : 0.0));
    // at the edge the window extends one way
    const auto edge = kernel_weights(s, 0, KernelSpec::span(0.3));
    for (std::size_t j = 0; j < 10; ++j) CHECK(edge[j] == (j < 3 ? 1.0 : 0.0));
  }

  TEST_CASE("span window admits every subject tied in rank distance") {
    // anchor in the middle with a symmetric pair at distance 1: target 2 -> 3 kept
    const auto s = testing::sample({{1, 1, 0.1}, {2, 0, 0.2}, {3, 0, 0.3}, {4, 2, 0.4}});
    const auto w = kernel_weights(s, 1, KernelSpec::span(0.5));
    CHECK(w == std::vector<double>{1, 1, 1, 0});
    // tied scores enter together
    const auto t = testing::sample({{1, 1, 0.1}, {2, 0, 0.5}, {3, 0, 0.5}, {4, 2, 0.5}, {5, 0, 0.9}});
    const auto wt = kernel_weights(t, 0, KernelSpec::span(0.4));
    CHECK(wt == std::vector<double>{1, 1, 1, 1, 0});
  }

  TEST_CASE("span one reduces to the pooled estimators") {
    const auto s = testing::sample({{1, 1, 0.3}, {2, 0, 0.6}, {3, 2, 0.9}});
    const auto surv = conditional_survival(s, 0, KernelSpec::span(1.0));
    CHECK(surv.at(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(surv.at(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(surv.at(3) == 0.0);
    CHECK(surv.at(0.5) == 1.0);

    const auto c = testing::sample({{1, 1, 0.3}, {2, 2, 0.6}, {3, 0, 0.9}});
    CHECK(conditional_cif(c, 2, 1, KernelSpec::span(1.0)).at(3) == doctest::Approx(1.0 / 3.0));
    CHECK(conditional_cif(c, 2, 2, KernelSpec::span(1.0)).at(3) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("neighbourhood without events has flat curves") {
    const auto s = testing::sample({{1, 0, 0.1}, {2, 0, 0.2}, {3, 0, 0.3}, {9, 1, 0.99}});
    const auto curves = conditional_curves(s, 0, KernelSpec::span(0.5));
    CHECK(curves.survival_at(5) == 1.0);
    CHECK(curves.cif_at(1, 5) == 0.0);
    CHECK(curves.cif_at(2, 5) == 0.0);
  }

  TEST_CASE("constant scores with a Gaussian kernel match span one") {
    const auto s = testing::sample(
        {{1, 1, 0.4}, {2, 0, 0.4}, {2.5, 2, 0.4}, {3, 1, 0.4}, {4, 0, 0.4}, {5, 2, 0.4}});
    const auto a = conditional_curves(s, 1, KernelSpec::bandwidth(0.2, KernelShape::Gaussian));
    const auto b = conditional_curves(s, 1, KernelSpec::span(1.0));
    REQUIRE(a.grid == b.grid);
    for (std::size_t g = 0; g < a.grid.size(); ++g) {
      CHECK(a.survival[g] == doctest::Approx(b.survival[g]).epsilon(1e-14));
      CHECK(a.cif[0][g] == doctest::Approx(b.cif[0][g]).epsilon(1e-14));
      CHECK(a.cif[1][g] == doctest::Approx(b.cif[1][g]).epsilon(1e-14));
    }
  }

  TEST_CASE("case weights: known status and the censored example") {
    const auto s = weight_example();
    const auto w = case_weights(s, Horizon(5), KernelSpec::span(1.0));
    // observed cause-1 case by tau
    CHECK(w(0, 1) == 1.0);
    CHECK(w(0, 2) == 0.0);
    // survivor past tau
    CHECK(w(8, 1) == 0.0);
    CHECK(w(8, 2) == 0.0);
    // censored at 2: (0.4 - 0.1) / 0.6
    CHECK(w(4, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w(4, 2) == doctest::Approx(0.0).epsilon(1e-14));

    const auto curves = conditional_curves(s, 4, KernelSpec::span(1.0));
    CHECK(curves.cif_at(1, 5) == doctest::Approx(0.4));
    CHECK(curves.cif_at(1, 2) == doctest::Approx(0.1));
    CHECK(curves.survival_at(2) == doctest::Approx(0.6));
  }

  TEST_CASE("undefined weight policy") {
    // the neighbourhood of the late censored subject has no one left at risk
    // after its last event, but the anchor itself keeps S > 0
    const auto s = testing::sample({{1, 1, 0.1}, {2, 1, 0.2}, {3, 0, 0.3}, {4, 2, 0.9}});
    const auto w = case_weights(s, Horizon(5), KernelSpec::span(0.5));
    CHECK(w.undefined_subjects.empty());
    CHECK(w.row_sum(2) <= 1.0 + 1e-12);
  }

  TEST_CASE("degenerate span neighbourhood") {
    const auto s = testing::sample({{1, 1, 0.1}, {2, 0, 0.2}, {3, 0, 0.3}, {4, 2, 0.9}});
    CHECK_THROWS_AS(case_weights(s, Horizon(5), KernelSpec::span(0.1)), Error);
  }

  TEST_CASE("bad cause for a CIF") {
    const auto s = weight_example();
    CHECK_THROWS_AS(conditional_cif(s, 0, 3, KernelSpec::span(1.0)), Error);
  }
}

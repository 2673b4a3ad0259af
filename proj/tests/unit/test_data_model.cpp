#include <doctest.h>

#include <algorithm>

#include "cracc/data_model.hpp"
#include "common/helpers.hpp"

using namespace cracc;

TEST_SUITE("data_model") {
  TEST_CASE("sorted input is kept as given") {
    const auto s = testing::sample({{1, 1, 0.9}, {2, 0, 0.5}, {3, 2, 0.1}});
    REQUIRE(s.size() == 3);
    CHECK(s[0] == SubjectRecord{1, 1, 0.9});
    CHECK(s[1] == SubjectRecord{2, 0, 0.5});
    CHECK(s[2] == SubjectRecord{3, 2, 0.1});
    CHECK(s.n_causes() == 2);
    CHECK(s.max_time() == 3);
  }

  TEST_CASE("event precedes censoring at a tied time") {
    const auto s = testing::sample({{2, 0, 0.5}, {2, 1, 0.9}});
    CHECK(s[0] == SubjectRecord{2, 1, 0.9});
    CHECK(s[1] == SubjectRecord{2, 0, 0.5});
  }

  TEST_CASE("rejections carry the right code") {
    auto code_of = [](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        return e.code();
      }
      FAIL("no error thrown");
      return ErrorCode::InvalidArgument;
    };
    CHECK(code_of([] { testing::sample({{1, 3, 0.5}}); }) == ErrorCode::InvalidStatusCode);
    CHECK(code_of([] { testing::sample({{1, -1, 0.5}, {2, 1, 0.5}}); }) ==
          ErrorCode::InvalidStatusCode);
    CHECK(code_of([] { validate_sample({}, 2); }) == ErrorCode::EmptySample);
    CHECK(code_of([] { testing::sample({{NAN, 1, 0.5}}); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([] { testing::sample({{1, 1, INFINITY}}); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([] { testing::sample({{-1, 1, 0.5}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { testing::sample({{1, 1, 1.5}}); }) == ErrorCode::ScoreOutOfRange);
    CHECK(code_of([] { testing::sample({{1, 2, 0.5}, {2, 0, 0.1}}); }) ==
          ErrorCode::NoEventsOfInterest);
    CHECK(code_of([] { validate_sample(testing::rows({{1, 1, 0.5}}), 1); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { validate_sample(testing::rows({{1, 1, 0.5}}), 2, 3); }) ==
          ErrorCode::InvalidArgument);
  }

  TEST_CASE("invalid status names the subject") {
    try {
      testing::sample({{1, 1, 0.5}, {2, 7, 0.5}});
      FAIL("expected an error");
    } catch (const Error& e) {
      REQUIRE(e.subject().has_value());
      CHECK(*e.subject() == 1);
    }
  }

  TEST_CASE("raw marker scores are accepted when flagged") {
    SampleOptions opt;
    opt.scale = ScoreScale::RawMarker;
    const auto s = validate_sample(testing::rows({{1, 1, 42.0}, {2, 0, -3.0}}), opt);
    CHECK(s.raw_marker());
    CHECK(s[0].score == 42.0);
  }

  TEST_CASE("validation is idempotent and a permutation") {
    Rng rng = stream_rng(11, 0);
    for (int rep = 0; rep < 50; ++rep) {
      const auto s = testing::random_sample(rng, {.integer_times = true});
      std::vector<SubjectRecord> copy(s.records().begin(), s.records().end());
      const auto again = validate_sample(copy, s.options());
      CHECK(again == s);
      for (std::size_t i = 1; i < s.size(); ++i) CHECK_FALSE(record_order_less(s[i], s[i - 1]));
    }
    auto recs = testing::rows({{3, 1, 0.1}, {1, 0, 0.2}, {2, 2, 0.3}, {1, 1, 0.4}});
    const auto s = validate_sample(recs, 2);
    auto sorted_in = recs;
    std::vector<SubjectRecord> out(s.records().begin(), s.records().end());
    auto key = [](const SubjectRecord& a, const SubjectRecord& b) {
      return std::tie(a.time, a.status, a.score) < std::tie(b.time, b.status, b.score);
    };
    std::sort(sorted_in.begin(), sorted_in.end(), key);
    std::sort(out.begin(), out.end(), key);
    CHECK(sorted_in == out);
  }

  TEST_CASE("resample revalidates") {
    const auto s = testing::sample({{1, 1, 0.9}, {2, 0, 0.5}, {3, 2, 0.1}});
    const std::size_t idx[] = {2, 0, 0};
    const auto r = resample(s, idx);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == s[0]);
    CHECK(r[1] == s[0]);
    CHECK(r[2] == s[2]);
  }

  TEST_CASE("horizon and kernel spec arguments") {
    CHECK_THROWS_AS(Horizon(0.0), Error);
    CHECK_THROWS_AS(Horizon(-1.0), Error);
    CHECK(Horizon(2.5).value() == 2.5);
    const auto s = testing::sample({{1, 1, 0.9}, {2, 0, 0.5}});
    CHECK(horizon_beyond_data(s, Horizon(3)));
    CHECK_FALSE(horizon_beyond_data(s, Horizon(2)));
    CHECK_THROWS_AS(KernelSpec::span(0.0), Error);
    CHECK_THROWS_AS(KernelSpec::span(1.5), Error);
    CHECK_THROWS_AS(KernelSpec::bandwidth(0.0), Error);
    CHECK(KernelSpec::span(1.0).is_span());
    CHECK(KernelSpec::bandwidth(0.1).bandwidth_params().shape == KernelShape::Epanechnikov);
  }
}

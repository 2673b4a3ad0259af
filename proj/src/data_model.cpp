#include "cracc/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cracc/error.hpp"

namespace cracc {

bool record_order_less(const SubjectRecord& a, const SubjectRecord& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.status != 0 && b.status == 0;
}

CompetingRiskSample validate_sample(std::vector<SubjectRecord> records,
                                    const SampleOptions& options) {
  if (options.n_causes < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "n_causes must be at least 2, got " + std::to_string(options.n_causes));
  }
  if (options.cause_of_interest < 1 || options.cause_of_interest > options.n_causes) {
    throw Error(ErrorCode::InvalidArgument,
                "cause_of_interest must lie in 1.." + std::to_string(options.n_causes));
  }
  if (records.empty()) throw Error(ErrorCode::EmptySample, "no records");

  bool has_event_of_interest = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!std::isfinite(r.time) || !std::isfinite(r.score)) {
      throw Error(ErrorCode::NonFiniteValue, "record " + std::to_string(i) + " is not finite", i);
    }
    if (r.time < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "record " + std::to_string(i) + " has negative time", i);
    }
    if (r.status < 0 || r.status > options.n_causes) {
      throw Error(ErrorCode::InvalidStatusCode,
                  "record " + std::to_string(i) + " has status " + std::to_string(r.status) +
                      " outside 0.." + std::to_string(options.n_causes),
                  i);
    }
    if (options.scale == ScoreScale::Probability && (r.score < 0.0 || r.score > 1.0)) {
      throw Error(ErrorCode::ScoreOutOfRange,
                  "record " + std::to_string(i) +
                      " has a score outside [0, 1]; flag the sample as a raw marker",
                  i);
    }
    has_event_of_interest |= r.status == options.cause_of_interest;
  }
  if (!has_event_of_interest) {
    throw Error(ErrorCode::NoEventsOfInterest,
                "no record has status " + std::to_string(options.cause_of_interest));
  }

  std::stable_sort(records.begin(), records.end(), record_order_less);

  CompetingRiskSample sample;
  sample.n_causes_ = options.n_causes;
  sample.cause_of_interest_ = options.cause_of_interest;
  sample.scale_ = options.scale;
  sample.times_.reserve(records.size());
  sample.statuses_.reserve(records.size());
  sample.scores_.reserve(records.size());
  for (const auto& r : records) {
    sample.times_.push_back(r.time);
    sample.statuses_.push_back(r.status);
    sample.scores_.push_back(r.score);
  }
  sample.records_ = std::move(records);
  return sample;
}

CompetingRiskSample validate_sample(std::vector<SubjectRecord> records, int n_causes,
                                    int cause_of_interest) {
  return validate_sample(std::move(records), SampleOptions{n_causes, cause_of_interest,
                                                           ScoreScale::Probability});
}

CompetingRiskSample resample(const CompetingRiskSample& sample,
                             std::span<const std::size_t> indices) {
  std::vector<SubjectRecord> records;
  records.reserve(indices.size());
  for (auto i : indices) records.push_back(sample[i]);
  return validate_sample(std::move(records), sample.options());
}

Horizon::Horizon(double tau) : tau_(tau) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be a positive finite number");
  }
}

bool horizon_beyond_data(const CompetingRiskSample& sample, Horizon tau) {
  return tau.value() > sample.max_time();
}

KernelSpec KernelSpec::span(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "span fraction must lie in (0, 1]");
  }
  return KernelSpec(Span{fraction});
}

KernelSpec KernelSpec::bandwidth(double h, KernelShape shape) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be strictly positive");
  }
  return KernelSpec(Bandwidth{h, shape});
}

double KernelSpec::span_fraction() const {
  if (const auto* s = std::get_if<Span>(&mode_)) return s->fraction;
  throw Error(ErrorCode::InvalidArgument, "kernel spec is in bandwidth mode");
}

const KernelSpec::Bandwidth& KernelSpec::bandwidth_params() const {
  if (const auto* b = std::get_if<Bandwidth>(&mode_)) return *b;
  throw Error(ErrorCode::InvalidArgument, "kernel spec is in span mode");
}

}  // namespace cracc

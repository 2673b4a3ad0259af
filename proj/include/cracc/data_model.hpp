#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace cracc {

/// One subject: observed time min(T, C), status (0 = censored, k >= 1 = cause k)
/// and the risk score under evaluation.
struct SubjectRecord {
  double time = 0.0;
  int status = 0;
  double score = 0.0;

  friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

/// Whether scores are predicted probabilities or an arbitrary marker.
/// Calibration metrics (Brier, KL, absolute error) need probabilities.
enum class ScoreScale { Probability, RawMarker };

struct SampleOptions {
  int n_causes = 2;
  int cause_of_interest = 1;
  ScoreScale scale = ScoreScale::Probability;
};

/// Ordering used by the product-limit estimators: ascending time, and at equal
/// times any event precedes any censoring.
bool record_order_less(const SubjectRecord& a, const SubjectRecord& b);

/// A validated, time-sorted competing-risks sample. Immutable once built.
class CompetingRiskSample {
 public:
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] int n_causes() const noexcept { return n_causes_; }
  [[nodiscard]] int cause_of_interest() const noexcept { return cause_of_interest_; }
  [[nodiscard]] ScoreScale scale() const noexcept { return scale_; }
  [[nodiscard]] bool raw_marker() const noexcept { return scale_ == ScoreScale::RawMarker; }

  [[nodiscard]] std::span<const SubjectRecord> records() const noexcept { return records_; }
  [[nodiscard]] const SubjectRecord& operator[](std::size_t i) const { return records_[i]; }

  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const int> statuses() const noexcept { return statuses_; }
  [[nodiscard]] std::span<const double> scores() const noexcept { return scores_; }

  [[nodiscard]] double max_time() const noexcept { return times_.empty() ? 0.0 : times_.back(); }
  [[nodiscard]] SampleOptions options() const noexcept {
    return {n_causes_, cause_of_interest_, scale_};
  }

  friend bool operator==(const CompetingRiskSample& a, const CompetingRiskSample& b) {
    return a.records_ == b.records_ && a.n_causes_ == b.n_causes_ &&
           a.cause_of_interest_ == b.cause_of_interest_ && a.scale_ == b.scale_;
  }

 private:
  friend CompetingRiskSample validate_sample(std::vector<SubjectRecord> records,
                                             const SampleOptions& options);

  std::vector<SubjectRecord> records_;
  std::vector<double> times_;
  std::vector<int> statuses_;
  std::vector<double> scores_;
  int n_causes_ = 2;
  int cause_of_interest_ = 1;
  ScoreScale scale_ = ScoreScale::Probability;
};

/// Checks every record and returns the sample sorted with record_order_less
/// (stable, so validating twice is a no-op).
///
/// Throws EmptySample, InvalidStatusCode, NonFiniteValue, ScoreOutOfRange
/// (probability scale with a score outside [0, 1]), NoEventsOfInterest, or
/// InvalidArgument for a bad cause inventory.
CompetingRiskSample validate_sample(std::vector<SubjectRecord> records,
                                    const SampleOptions& options = {});

CompetingRiskSample validate_sample(std::vector<SubjectRecord> records, int n_causes,
                                    int cause_of_interest = 1);

/// Re-validates a subset / resample of an existing sample with its options.
CompetingRiskSample resample(const CompetingRiskSample& sample,
                             std::span<const std::size_t> indices);

/// Prediction horizon tau > 0.
class Horizon {
 public:
  explicit Horizon(double tau);
  [[nodiscard]] double value() const noexcept { return tau_; }
  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  double tau_;
};

/// True when tau lies beyond the last observed time (allowed, but worth a warning).
bool horizon_beyond_data(const CompetingRiskSample& sample, Horizon tau);

enum class KernelShape { Uniform, Epanechnikov, Gaussian };

/// Smoothing over the risk score: either a rank neighbourhood holding a fixed
/// fraction of subjects (uniform kernel), or a metric kernel with bandwidth h.
class KernelSpec {
 public:
  struct Span {
    double fraction;
  };
  struct Bandwidth {
    double h;
    KernelShape shape;
  };

  static KernelSpec span(double fraction);
  static KernelSpec bandwidth(double h, KernelShape shape = KernelShape::Epanechnikov);

  [[nodiscard]] bool is_span() const noexcept { return std::holds_alternative<Span>(mode_); }
  [[nodiscard]] const std::variant<Span, Bandwidth>& mode() const noexcept { return mode_; }
  [[nodiscard]] double span_fraction() const;
  [[nodiscard]] const Bandwidth& bandwidth_params() const;

 private:
  explicit KernelSpec(std::variant<Span, Bandwidth> mode) : mode_(mode) {}
  std::variant<Span, Bandwidth> mode_;
};

inline constexpr double kDefaultSpan = 0.05;

}  // namespace cracc

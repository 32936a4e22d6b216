#pragma once

// Streaming quality metrics, ROC analysis and drift monitors.

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace rsindy {

/// Single-pass regression tally. SST is tracked with Welford's update so the
/// total sum of squares never suffers cancellation.
class RegressionTally {
 public:
  explicit RegressionTally(Eigen::Index p = 1, std::size_t history_capacity = 1 << 20);

  void add(double y, double prediction);

  long long n() const { return n_; }
  Eigen::Index p() const { return p_; }
  double sse() const { return sse_; }
  double sst() const { return m2_y_; }
  double mean_y() const { return mean_y_; }
  const std::deque<double>& residuals() const { return residuals_; }

 private:
  long long n_ = 0;
  Eigen::Index p_;
  double sse_ = 0.0;
  double mean_y_ = 0.0;
  double m2_y_ = 0.0;
  std::size_t capacity_;
  std::deque<double> residuals_;
};

struct RegressionMetrics {
  double sst;
  double sse;
  long long n;
  Eigen::Index p;
  double r2;
  double sigma_hat;
  double rmse;
};

/// r2 = 1 - sse/sst, sigma_hat = sqrt(sse/(n-p)), rmse = sqrt(sse/n).
RegressionMetrics regression_metrics(double sst, double sse, long long n, Eigen::Index p);
RegressionMetrics regression_metrics(const RegressionTally& t);

struct ConfusionTally {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;

  void add(int truth, int predicted);
  long long total() const { return tp + fp + tn + fn; }
};

/// Ratios whose denominator is zero are reported as empty optionals.
struct ClassificationMetrics {
  double accuracy;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<double> precision;
  std::optional<double> f1;
};

ClassificationMetrics classification_metrics(const ConfusionTally& c);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocResult {
  double auc;
  double optimal_threshold;  // maximizes Youden's J; ties go to the lower threshold
  double youden_j;
  std::vector<RocPoint> curve;
};

/// AUC via midranks (equal to the Mann-Whitney U statistic / n1 n0).
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Sum of per-step cross-entropy (natural log); probabilities are clamped at 1e-300.
double total_log_loss(const std::vector<double>& probabilities, const std::vector<int>& labels);

inline constexpr double kIChartConstant = 2.66;

/// Individuals chart: centre = mean, limits = centre ± 2.66 · mean moving range.
struct IChart {
  double center = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  long long basis_n = 0;
};

IChart ichart_fit(const std::vector<double>& residuals);

/// Incremental version of ichart_fit, for charts whose basis keeps growing.
class IChartAccumulator {
 public:
  void add(double residual);
  long long count() const { return n_; }
  IChart chart() const;

 private:
  long long n_ = 0;
  double sum_ = 0.0;
  double sum_moving_range_ = 0.0;
  double last_ = 0.0;
};

/// Nelson rule 1: strictly outside [lower, upper].
bool nelson_rule1(const IChart& chart, double residual);

enum class DriftStatus { Stable, Warning, Drift };

const char* to_string(DriftStatus s);

/// Error-rate trace of the drift detection method (DDM).
struct DdmTrace {
  long long step = 0;
  long long errors = 0;
  double p = 0.0;
  double s = 0.0;
  double p_min = 0.0;
  double s_min = 0.0;
  bool has_min = false;
};

struct DdmConfig {
  long long min_instances = 30;
  double warning_level = 2.0;
  double drift_level = 3.0;
  bool reset_on_drift = false;
};

struct DdmStep {
  DdmTrace trace;
  DriftStatus status;
};

DdmStep ddm_update(const DdmTrace& trace, int error, const DdmConfig& config = {});

struct IntervalBounds {
  double lo;
  double hi;
};

/// Fraction of truths inside [lo, hi] (inclusive).
double empirical_coverage(const std::vector<IntervalBounds>& intervals,
                          const std::vector<double>& truths);

}  // namespace rsindy

#include "rsindy/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsindy/error.hpp"

namespace rsindy {

RegressionTally::RegressionTally(Eigen::Index p, std::size_t history_capacity)
    : p_(p), capacity_(history_capacity) {
  if (p < 0) fail(ErrorCode::InvalidInput, "model dimension must be non-negative");
}

void RegressionTally::add(double y, double prediction) {
  if (!std::isfinite(y) || !std::isfinite(prediction)) {
    fail(ErrorCode::InvalidInput, "RegressionTally: non-finite observation");
  }
  const double residual = y - prediction;
  ++n_;
  sse_ += residual * residual;
  const double delta = y - mean_y_;
  mean_y_ += delta / static_cast<double>(n_);
  m2_y_ += delta * (y - mean_y_);
  if (capacity_ > 0) {
    if (residuals_.size() == capacity_) residuals_.pop_front();
    residuals_.push_back(residual);
  }
}

RegressionMetrics regression_metrics(double sst, double sse, long long n, Eigen::Index p) {
  if (n <= p) fail(ErrorCode::InsufficientData, "regression metrics need n > p");
  if (!(sst > 0.0)) fail(ErrorCode::DegenerateTarget, "total sum of squares is zero");
  RegressionMetrics m{};
  m.sst = sst;
  m.sse = sse;
  m.n = n;
  m.p = p;
  m.r2 = 1.0 - sse / sst;
  m.sigma_hat = std::sqrt(sse / static_cast<double>(n - p));
  m.rmse = std::sqrt(sse / static_cast<double>(n));
  return m;
}

RegressionMetrics regression_metrics(const RegressionTally& t) {
  return regression_metrics(t.sst(), t.sse(), t.n(), t.p());
}

void ConfusionTally::add(int truth, int predicted) {
  if ((truth != 0 && truth != 1) || (predicted != 0 && predicted != 1)) {
    fail(ErrorCode::InvalidInput, "ConfusionTally: labels must be 0 or 1");
  }
  if (truth == 1) {
    predicted == 1 ? ++tp : ++fn;
  } else {
    predicted == 1 ? ++fp : ++tn;
  }
}

namespace {
std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}
}  // namespace

ClassificationMetrics classification_metrics(const ConfusionTally& c) {
  if (c.total() == 0) fail(ErrorCode::InsufficientData, "empty confusion tally");
  ClassificationMetrics m{};
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.tpr = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.tnr = ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp));
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  if (m.tpr && m.precision && (*m.tpr + *m.precision) > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.tpr / (*m.precision + *m.tpr);
  }
  return m;
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) fail(ErrorCode::InvalidInput, "roc_auc: length mismatch");
  const std::size_t n = scores.size();
  long long n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) fail(ErrorCode::InvalidInput, "roc_auc: labels must be 0/1");
    if (!std::isfinite(scores[i])) fail(ErrorCode::InvalidInput, "roc_auc: non-finite score");
    n_pos += labels[i];
  }
  const long long n_neg = static_cast<long long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorCode::DegenerateLabels, "roc_auc needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midrank sum of positives.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  RocResult out{};
  out.auc = (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);

  // Sweep thresholds from high to low; positive iff score >= threshold.
  long long tp = 0;
  long long fp = 0;
  out.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  out.youden_j = -std::numeric_limits<double>::infinity();
  for (std::size_t i = n; i > 0;) {
    std::size_t j = i;
    const double thr = scores[order[i - 1]];
    while (j > 0 && scores[order[j - 1]] == thr) {
      (labels[order[j - 1]] == 1 ? tp : fp) += 1;
      --j;
    }
    const double tpr = static_cast<double>(tp) / np;
    const double fpr = static_cast<double>(fp) / nn;
    out.curve.push_back({thr, fpr, tpr});
    const double youden = tpr - fpr;
    // Descending sweep: >= moves ties to the lower threshold.
    if (youden >= out.youden_j) {
      out.youden_j = youden;
      out.optimal_threshold = thr;
    }
    i = j;
  }
  return out;
}

double total_log_loss(const std::vector<double>& probabilities, const std::vector<int>& labels) {
  if (probabilities.size() != labels.size()) {
    fail(ErrorCode::InvalidInput, "total_log_loss: length mismatch");
  }
  constexpr double floor = 1e-300;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probabilities[i];
    total -= labels[i] == 1 ? std::log(std::max(p, floor)) : std::log(std::max(1.0 - p, floor));
  }
  return total;
}

IChart ichart_fit(const std::vector<double>& residuals) {
  if (residuals.size() < 2) fail(ErrorCode::InsufficientData, "I-chart needs at least two points");
  IChartAccumulator acc;
  for (double r : residuals) acc.add(r);
  return acc.chart();
}

void IChartAccumulator::add(double residual) {
  if (!std::isfinite(residual)) fail(ErrorCode::InvalidInput, "I-chart: non-finite residual");
  if (n_ > 0) sum_moving_range_ += std::abs(residual - last_);
  sum_ += residual;
  last_ = residual;
  ++n_;
}

IChart IChartAccumulator::chart() const {
  if (n_ < 2) fail(ErrorCode::InsufficientData, "I-chart needs at least two points");
  IChart c;
  c.center = sum_ / static_cast<double>(n_);
  const double mr_bar = sum_moving_range_ / static_cast<double>(n_ - 1);
  c.upper = c.center + kIChartConstant * mr_bar;
  c.lower = c.center - kIChartConstant * mr_bar;
  c.basis_n = n_;
  return c;
}

bool nelson_rule1(const IChart& chart, double residual) {
  return residual > chart.upper || residual < chart.lower;
}

const char* to_string(DriftStatus s) {
  switch (s) {
    case DriftStatus::Stable: return "stable";
    case DriftStatus::Warning: return "warning";
    case DriftStatus::Drift: return "drift";
  }
  return "unknown";
}

DdmStep ddm_update(const DdmTrace& trace, int error, const DdmConfig& config) {
  if (error != 0 && error != 1) fail(ErrorCode::InvalidInput, "ddm_update: error flag must be 0/1");
  DdmTrace t = trace;
  t.step += 1;
  t.errors += error;
  const double n = static_cast<double>(t.step);
  t.p = static_cast<double>(t.errors) / n;
  t.s = std::sqrt(t.p * (1.0 - t.p) / n);

  DriftStatus status = DriftStatus::Stable;
  if (t.step >= config.min_instances) {
    if (!t.has_min || t.p + t.s < t.p_min + t.s_min) {
      t.p_min = t.p;
      t.s_min = t.s;
      t.has_min = true;
    }
    const double level = t.p + t.s;
    // A level equal to the recorded minimum is never a change, even when
    // s_min is zero and both thresholds collapse onto it.
    if (!(level > t.p_min + t.s_min)) {
      status = DriftStatus::Stable;
    } else if (level >= t.p_min + config.drift_level * t.s_min) {
      status = DriftStatus::Drift;
    } else if (level >= t.p_min + config.warning_level * t.s_min) {
      status = DriftStatus::Warning;
    }
  }
  if (status == DriftStatus::Drift && config.reset_on_drift) t = DdmTrace{};
  return {t, status};
}

double empirical_coverage(const std::vector<IntervalBounds>& intervals,
                          const std::vector<double>& truths) {
  if (intervals.size() != truths.size()) {
    fail(ErrorCode::InvalidInput, "empirical_coverage: length mismatch");
  }
  if (truths.empty()) fail(ErrorCode::InsufficientData, "empirical_coverage: no intervals");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= intervals[i].lo && truths[i] <= intervals[i].hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(truths.size());
}

}  // namespace rsindy

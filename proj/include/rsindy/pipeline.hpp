#pragma once

// Streaming engines: warm-up (lambda selection, ridge initialization) followed
// by one predict-then-update pass over the stream.

#include <optional>
#include <string>
#include <vector>

#include "rsindy/datagen.hpp"
#include "rsindy/evaluation.hpp"
#include "rsindy/expert_ensemble.hpp"
#include "rsindy/feature_library.hpp"
#include "rsindy/gaussian_regressor.hpp"
#include "rsindy/logistic_classifier.hpp"
#include "rsindy/run_config.hpp"
#include "rsindy/warmup.hpp"

namespace rsindy {

struct StepRecord {
  long long step = 0;
  bool warmup = false;
  double y = 0.0;
  double prediction = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double residual = 0.0;
  bool flagged = false;
};

struct ParamRecord {
  long long step = 0;
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma_diag;
};

struct MetricsRecord {
  long long step = 0;
  RegressionMetrics metrics;
};

/// One row per detector firing: residual and I-chart limits for Nelson rule 1;
/// p+s, p_min+2s_min, p_min, p_min+3s_min for DDM.
struct DriftEvent {
  long long step = 0;
  std::string detector;
  double statistic = 0.0;
  double lower = 0.0;
  double center = 0.0;
  double upper = 0.0;
};

struct RegressionOptions {
  DictionarySpec dictionary;
  bool standardize = false;
  bool dynamic_standardization = true;
  long long warmup = 0;
  double eta = 0.1;
  std::optional<double> lambda;
  std::optional<LambdaGrid> grid;
  std::optional<double> online_lambda;  // streaming penalty; defaults to the warm-up one
  std::optional<SplitPlan> plan;
  Eigen::VectorXd init_mu;  // start point when there is no warm-up; zeros if empty
  double interval_level = 0.95;
  ChartBasis chart_basis = ChartBasis::WarmupOnly;
  bool freeze_sigma = false;
  bool record = true;  // keep per-step records
};

/// A Gaussian learner with its own dictionary, standardizer, tally and chart.
class OnlineRegressor {
 public:
  /// Fits the warm-up segment: standardizer statistics, lambda (grid or
  /// fixed), mu0 by ridge regression and Sigma0 = noise_var (XᵀX + lambda I)⁻¹.
  OnlineRegressor(RegressionOptions options, const std::vector<Observation>& warmup_rows);

  /// Predicts obs.y, then learns from it. Warm-up rows must be replayed first,
  /// in order, with warmup_phase = true.
  StepRecord step(const Observation& obs, bool warmup_phase);

  const GaussianModeld& model() const { return model_; }
  const GaussianModeld& initial_model() const { return initial_; }
  double lambda_star() const { return lambda_star_; }
  const std::optional<LambdaSelection>& selection() const { return selection_; }
  const RegressionTally& tally() const { return tally_; }
  const std::optional<IChart>& chart() const { return chart_; }
  const std::optional<IChart>& warmup_chart() const { return warmup_chart_; }
  Eigen::Index dim() const { return model_.dim(); }

 private:
  Eigen::VectorXd design(const Eigen::VectorXd& raw) const;

  RegressionOptions options_;
  RunningStandardizerd standardizer_;
  GaussianModeld model_;
  GaussianModeld initial_;
  std::optional<LambdaSelection> selection_;
  double lambda_star_ = 0.0;
  RegressionTally tally_;
  std::vector<double> warmup_residuals_;
  long long warmup_seen_ = 0;
  std::optional<IChart> chart_;
  std::optional<IChart> warmup_chart_;
  IChartAccumulator expanding_;
};

struct RegressionRun {
  double lambda_star = 0.0;  // warm-up penalty; initial_model.lambda is the streaming one
  GaussianModeld initial_model;
  GaussianModeld final_model;
  std::optional<LambdaSelection> selection;
  std::vector<std::string> term_names;
  std::vector<StepRecord> steps;
  std::vector<ParamRecord> params;
  std::vector<MetricsRecord> metrics;
  std::vector<DriftEvent> drift;
  std::optional<IChart> warmup_chart;
  std::optional<RegressionMetrics> final_metrics;
  long long intervals = 0;  // stream-phase prediction intervals
  long long misses = 0;
  std::optional<long long> first_flag_step;

  std::optional<double> coverage() const;
};

RegressionRun run_regression_stream(const Dataset& data, const RegressionOptions& options);

struct ClassificationOptions {
  DictionarySpec dictionary;
  bool standardize = false;
  bool dynamic_standardization = true;
  long long warmup = 0;
  double eta = 0.1;
  std::optional<double> lambda;
  std::optional<LambdaGrid> grid;
  std::optional<double> online_lambda;  // streaming penalty; defaults to the warm-up one
  std::optional<SplitPlan> plan;
  Eigen::VectorXd init_mu;
  DdmConfig ddm;
  bool record = true;
};

struct ClassificationStep {
  long long step = 0;
  bool warmup = false;
  int label = 0;
  double probability = 0.0;
  int predicted = 0;
  DriftStatus status = DriftStatus::Stable;
};

struct ClassificationRun {
  double lambda_star = 0.0;
  LogisticModeld initial_model;
  LogisticModeld final_model;
  std::optional<LambdaSelection> selection;
  std::vector<std::string> term_names;
  /// Cut used while streaming: Youden-optimal on the warm-up replay, or 0.5.
  double stream_threshold = 0.5;
  std::vector<ClassificationStep> steps;
  std::vector<ParamRecord> params;
  std::vector<DriftEvent> drift;
  ConfusionTally stream_confusion;  // at stream_threshold
  long long stream_n = 0;
  /// Stream-phase ROC analysis and metrics at the Youden-optimal threshold.
  std::optional<RocResult> roc;
  std::optional<ClassificationMetrics> youden_metrics;
  std::optional<double> log_loss;
  std::optional<long long> first_drift_step;
};

ClassificationRun run_classification_stream(const Dataset& data, const ClassificationOptions& options);

/// The ten fixed experts of the simulation study: Xi alone (1-4), one
/// intercept-plus-term model per feature (5-8), the first three terms (9) and
/// the generating model (10).
ExpertPool simulation_expert_pool();

struct ExpertRun {
  EnsembleState final_state;
  EnsembleHistory history;
  std::vector<WeightTrajectoryRow> trajectory;
  std::vector<std::string> labels;
  std::vector<StepRecord> steps;  // weighted-ensemble predictions
  std::vector<double> best_predictions;
  std::vector<Eigen::Index> best_index;
  double weighted_cumulative_loss = 0.0;
  double best_cumulative_loss = 0.0;
};

/// Runs the ensemble over a fixed pool; every row is streamed.
ExpertRun run_expert_stream(const Dataset& data, const ExpertPool& pool, double eta,
                            double loss_cap = 10.0);

/// Runs one learning Gaussian expert per dictionary, each warm-started on the
/// same warm-up segment, and weighs them with the ensemble update.
ExpertRun run_dictionary_experts(const Dataset& data, const std::vector<DictionarySpec>& dictionaries,
                                 const RegressionOptions& base, double eta, double loss_cap = 10.0);

/// First step (1-based) at which `expert` (0-based) holds weight >= level.
std::optional<long long> dominance_step(const std::vector<WeightTrajectoryRow>& trajectory,
                                        Eigen::Index expert, double level);

}  // namespace rsindy

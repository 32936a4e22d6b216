#include "rsindy/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rsindy/error.hpp"

namespace rsindy {

namespace {

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows, Eigen::Index p) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return X;
}

std::vector<Observation> head(const Dataset& data, long long count) {
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max<long long>(count, 0)),
                                       data.observations.size());
  return {data.observations.begin(), data.observations.begin() + static_cast<std::ptrdiff_t>(n)};
}

void check_dataset(const Dataset& data, int base_dim, long long warmup) {
  if (data.observations.empty()) fail(ErrorCode::InsufficientData, "the stream is empty");
  if (warmup > static_cast<long long>(data.observations.size())) {
    fail(ErrorCode::InvalidPlan, fmt::format("warm-up of {} rows exceeds the stream length {}", warmup,
                                             data.observations.size()));
  }
  for (const auto& obs : data.observations) {
    if (obs.x.size() != base_dim) fail(ErrorCode::InvalidInput, "observation dimension does not match the dictionary");
    if (!obs.x.allFinite() || !std::isfinite(obs.y)) {
      fail(ErrorCode::InvalidInput, fmt::format("non-finite value at step {}", obs.step),
           static_cast<std::size_t>(obs.step));
    }
  }
}

Eigen::VectorXd start_point(const Eigen::VectorXd& init_mu, Eigen::Index p) {
  if (init_mu.size() == 0) return Eigen::VectorXd::Zero(p);
  if (init_mu.size() != p) fail(ErrorCode::InvalidConfig, "init_mu length does not match the dictionary dimension");
  return init_mu;
}

RunningStandardizerd fit_standardizer(const std::vector<Observation>& rows, Eigen::Index dim) {
  auto s = RunningStandardizerd::empty(dim);
  for (const auto& obs : rows) s = standardizer_update(s, obs.x);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Regression

OnlineRegressor::OnlineRegressor(RegressionOptions options, const std::vector<Observation>& warmup_rows)
    : options_(std::move(options)) {
  validate(options_.dictionary);
  const Eigen::Index p = dimension(options_.dictionary);
  const auto W = static_cast<long long>(warmup_rows.size());
  if (W != options_.warmup) fail(ErrorCode::InvalidPlan, "warm-up row count does not match the configured length");
  tally_ = RegressionTally(p);

  if (options_.standardize) {
    if (W < 2) fail(ErrorCode::InsufficientData, "standardization needs at least two warm-up rows");
    standardizer_ = fit_standardizer(warmup_rows, options_.dictionary.base_dim);
  }

  if (W == 0) {
    model_ = make_gaussian_model(start_point(options_.init_mu, p), SymMatrixd::Zero(p),
                                 options_.lambda.value_or(0.0), options_.eta);
  } else {
    std::vector<Eigen::VectorXd> rows;
    Eigen::VectorXd y(W);
    for (long long i = 0; i < W; ++i) {
      rows.push_back(design(warmup_rows[static_cast<std::size_t>(i)].x));
      y(i) = warmup_rows[static_cast<std::size_t>(i)].y;
    }
    const Eigen::MatrixXd X = stack_rows(rows, p);
    double lambda = options_.lambda.value_or(0.0);
    if (options_.grid) {
      if (!options_.plan) fail(ErrorCode::InvalidConfig, "a lambda grid requires a split plan");
      selection_ = select_lambda(X, y, *options_.plan, *options_.grid, SelectionMetric::Rmse);
      lambda = selection_->lambda_star;
    }
    const RidgeFit fit = ridge_fit(X, y, lambda);
    model_ = make_gaussian_model(fit.mu, init_covariance(X, lambda, fit.noise_var), lambda,
                                 options_.eta, fit.noise_var);
  }
  lambda_star_ = model_.lambda;
  if (options_.online_lambda) model_.lambda = *options_.online_lambda;
  validate(model_);
  initial_ = model_;
}

Eigen::VectorXd OnlineRegressor::design(const Eigen::VectorXd& raw) const {
  if (!options_.standardize) return transform(options_.dictionary, raw);
  return transform(options_.dictionary, standardize_row(standardizer_, raw));
}

StepRecord OnlineRegressor::step(const Observation& obs, bool warmup_phase) {
  if (!warmup_phase && warmup_seen_ < options_.warmup) {
    fail(ErrorCode::InvalidPlan, "stream rows arrived before the warm-up replay finished");
  }
  if (!warmup_phase && options_.standardize && options_.dynamic_standardization) {
    standardizer_ = standardizer_update(standardizer_, obs.x);
  }
  const Eigen::VectorXd x = design(obs.x);

  if (tally_.n() > tally_.p()) {
    model_.noise_var = tally_.sse() / static_cast<double>(tally_.n() - tally_.p());
  }
  StepRecord rec;
  rec.step = obs.step;
  rec.warmup = warmup_phase;
  rec.y = obs.y;
  rec.prediction = predict(model_, x);
  const auto interval = predict_interval(model_, x, options_.interval_level);
  rec.lo = interval.lo;
  rec.hi = interval.hi;
  rec.residual = obs.y - rec.prediction;

  if (warmup_phase) {
    warmup_residuals_.push_back(rec.residual);
    ++warmup_seen_;
    if (options_.chart_basis == ChartBasis::Expanding) expanding_.add(rec.residual);
    if (warmup_seen_ == options_.warmup && warmup_residuals_.size() >= 2) {
      warmup_chart_ = ichart_fit(warmup_residuals_);
      chart_ = warmup_chart_;
    }
  } else {
    if (chart_) rec.flagged = nelson_rule1(*chart_, rec.residual);
    if (options_.chart_basis == ChartBasis::Expanding && !rec.flagged) {
      expanding_.add(rec.residual);
      if (expanding_.count() >= 2) chart_ = expanding_.chart();
    }
  }

  tally_.add(obs.y, rec.prediction);
  model_ = update_step(model_, x, obs.y, options_.freeze_sigma);
  if (!model_.mu.allFinite()) {
    fail(ErrorCode::NumericFailure, fmt::format("parameters diverged at step {}", obs.step),
         static_cast<std::size_t>(obs.step));
  }
  return rec;
}

std::optional<double> RegressionRun::coverage() const {
  if (intervals == 0) return std::nullopt;
  return static_cast<double>(intervals - misses) / static_cast<double>(intervals);
}

RegressionRun run_regression_stream(const Dataset& data, const RegressionOptions& options) {
  check_dataset(data, options.dictionary.base_dim, options.warmup);
  const auto warmup_rows = head(data, options.warmup);
  OnlineRegressor learner(options, warmup_rows);

  RegressionRun run;
  run.lambda_star = learner.lambda_star();
  run.initial_model = learner.initial_model();
  run.selection = learner.selection();
  run.term_names = term_names(options.dictionary, data.feature_names);
  if (options.record) {
    run.steps.reserve(data.observations.size());
    run.params.reserve(data.observations.size());
  }

  long long index = 0;
  for (const auto& obs : data.observations) {
    const bool warm = index < options.warmup;
    ++index;
    const std::optional<IChart> chart_in_force = learner.chart();
    const StepRecord rec = learner.step(obs, warm);
    if (!warm) {
      ++run.intervals;
      if (rec.y < rec.lo || rec.y > rec.hi) ++run.misses;
      if (rec.flagged) {
        if (!run.first_flag_step) run.first_flag_step = rec.step;
        run.drift.push_back({rec.step, "nelson_rule1", rec.residual, chart_in_force->lower,
                             chart_in_force->center, chart_in_force->upper});
      }
    }
    if (options.record) {
      run.steps.push_back(rec);
      run.params.push_back({rec.step, learner.model().mu, learner.model().sigma.diagonal()});
      const auto& t = learner.tally();
      if (t.n() > t.p() && t.sst() > 0.0) run.metrics.push_back({rec.step, regression_metrics(t)});
    }
  }
  run.final_model = learner.model();
  run.warmup_chart = learner.warmup_chart();
  const auto& t = learner.tally();
  if (t.n() > t.p() && t.sst() > 0.0) run.final_metrics = regression_metrics(t);
  return run;
}

// ---------------------------------------------------------------------------
// Classification

ClassificationRun run_classification_stream(const Dataset& data, const ClassificationOptions& options) {
  validate(options.dictionary);
  check_dataset(data, options.dictionary.base_dim, options.warmup);
  for (const auto& obs : data.observations) {
    if (obs.y != 0.0 && obs.y != 1.0) {
      fail(ErrorCode::InvalidInput, fmt::format("label at step {} is not 0/1", obs.step),
           static_cast<std::size_t>(obs.step));
    }
  }
  const Eigen::Index p = dimension(options.dictionary);
  const long long W = options.warmup;
  const auto warmup_rows = head(data, W);

  RunningStandardizerd standardizer;
  if (options.standardize) {
    if (W < 2) fail(ErrorCode::InsufficientData, "standardization needs at least two warm-up rows");
    standardizer = fit_standardizer(warmup_rows, options.dictionary.base_dim);
  }
  auto design = [&](const Eigen::VectorXd& raw) {
    return options.standardize ? transform(options.dictionary, standardize_row(standardizer, raw))
                               : transform(options.dictionary, raw);
  };

  ClassificationRun run;
  run.term_names = term_names(options.dictionary, data.feature_names);
  LogisticModeld model;
  if (W == 0) {
    model = make_logistic_model(start_point(options.init_mu, p), SymMatrixd::Zero(p),
                                options.lambda.value_or(0.0), options.eta);
  } else {
    std::vector<Eigen::VectorXd> rows;
    Eigen::VectorXd y(W);
    for (long long i = 0; i < W; ++i) {
      rows.push_back(design(warmup_rows[static_cast<std::size_t>(i)].x));
      y(i) = warmup_rows[static_cast<std::size_t>(i)].y;
    }
    const Eigen::MatrixXd X = stack_rows(rows, p);
    double lambda = options.lambda.value_or(0.0);
    if (options.grid) {
      if (!options.plan) fail(ErrorCode::InvalidConfig, "a lambda grid requires a split plan");
      run.selection = select_lambda(X, y, *options.plan, *options.grid, SelectionMetric::Accuracy);
      lambda = run.selection->lambda_star;
    }
    const LogisticFit fit = ridge_logistic_fit(X, y, lambda);
    model = make_logistic_model(fit.mu, fit.covariance, lambda, options.eta);
  }
  run.lambda_star = model.lambda;
  if (options.online_lambda) model.lambda = *options.online_lambda;
  validate(model);
  run.initial_model = model;

  std::vector<double> warm_scores;
  std::vector<int> warm_labels;
  std::vector<double> scores;
  std::vector<int> labels;
  DdmTrace trace;
  DriftStatus previous = DriftStatus::Stable;
  long long index = 0;
  for (const auto& obs : data.observations) {
    const bool warm = index < W;
    ++index;
    if (!warm && options.standardize && options.dynamic_standardization) {
      standardizer = standardizer_update(standardizer, obs.x);
    }
    const Eigen::VectorXd x = design(obs.x);
    const int label = static_cast<int>(obs.y);
    ClassificationStep rec;
    rec.step = obs.step;
    rec.warmup = warm;
    rec.label = label;
    rec.probability = predict_proba(model, x);
    rec.predicted = rec.probability >= model.threshold ? 1 : 0;

    if (warm) {
      warm_scores.push_back(rec.probability);
      warm_labels.push_back(label);
    } else {
      scores.push_back(rec.probability);
      labels.push_back(label);
      run.stream_confusion.add(label, rec.predicted);
      const int error = rec.predicted != label ? 1 : 0;
      const DdmStep ddm = ddm_update(trace, error, options.ddm);
      trace = ddm.trace;
      rec.status = ddm.status;
      if (ddm.status != DriftStatus::Stable && ddm.status != previous) {
        const auto& tr = ddm.trace;
        run.drift.push_back({rec.step, std::string("ddm_") + to_string(ddm.status), tr.p + tr.s,
                             tr.p_min + options.ddm.warning_level * tr.s_min, tr.p_min,
                             tr.p_min + options.ddm.drift_level * tr.s_min});
        if (ddm.status == DriftStatus::Drift && !run.first_drift_step) run.first_drift_step = rec.step;
      }
      previous = ddm.status;
    }

    model = update_step(model, x, label);
    if (!model.mu.allFinite()) {
      fail(ErrorCode::NumericFailure, fmt::format("parameters diverged at step {}", obs.step),
           static_cast<std::size_t>(obs.step));
    }
    if (warm && index == W) {
      const bool both = std::count(warm_labels.begin(), warm_labels.end(), 1) > 0 &&
                        std::count(warm_labels.begin(), warm_labels.end(), 0) > 0;
      if (both) {
        const double cut = roc_auc(warm_scores, warm_labels).optimal_threshold;
        // Keep the cut strictly inside (0,1) as the model requires.
        model.threshold = std::clamp(cut, 1e-12, 1.0 - 1e-12);
      }
      run.stream_threshold = model.threshold;
    }
    if (options.record) {
      run.steps.push_back(rec);
      run.params.push_back({rec.step, model.mu, model.sigma.diagonal()});
    }
  }
  run.final_model = model;
  run.stream_n = static_cast<long long>(scores.size());
  if (!scores.empty()) {
    run.log_loss = total_log_loss(scores, labels);
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                      std::count(labels.begin(), labels.end(), 0) > 0;
    if (both) {
      run.roc = roc_auc(scores, labels);
      ConfusionTally c;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        c.add(labels[i], scores[i] >= run.roc->optimal_threshold ? 1 : 0);
      }
      run.youden_metrics = classification_metrics(c);
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Expert advice

ExpertPool simulation_expert_pool() {
  std::vector<ExpertFn> experts;
  for (int i = 0; i < 4; ++i) {
    experts.push_back([i](const Eigen::VectorXd& x) { return x(i); });
  }
  for (int i = 0; i < 4; ++i) {
    const double slope = 1.1 + 0.1 * i;
    experts.push_back([i, slope](const Eigen::VectorXd& x) { return 1.0 + slope * x(i); });
  }
  experts.push_back([](const Eigen::VectorXd& x) { return 1.0 + 1.1 * x(0) + 1.2 * x(1) + 1.3 * x(2); });
  experts.push_back(
      [](const Eigen::VectorXd& x) { return 1.0 + 1.1 * x(0) + 1.2 * x(1) + 1.3 * x(2) + 1.4 * x(3); });
  return make_expert_pool(std::move(experts), {}, 4);
}

namespace {

struct EnsembleDriver {
  EnsembleState state;
  ExpertRun run;
  double loss_cap;

  EnsembleDriver(Eigen::Index n, double eta, double cap, std::vector<std::string> labels)
      : state(EnsembleState::uniform(n, eta)), loss_cap(cap) {
    run.history.initial = state.weights;
    run.labels = std::move(labels);
    append_trajectory(run.trajectory, state);
  }

  void consume(const Observation& obs, const Eigen::VectorXd& predictions, bool warmup) {
    const double weighted = predict_weighted(state, predictions);
    const BestExpert best = predict_best(state, predictions);
    Eigen::VectorXd losses(predictions.size());
    for (Eigen::Index i = 0; i < predictions.size(); ++i) {
      losses(i) = clamped_squared_loss(obs.y, predictions(i), loss_cap);
    }
    run.weighted_cumulative_loss += clamped_squared_loss(obs.y, weighted, loss_cap);
    run.best_cumulative_loss += clamped_squared_loss(obs.y, best.prediction, loss_cap);
    StepRecord rec;
    rec.step = obs.step;
    rec.warmup = warmup;
    rec.y = obs.y;
    rec.prediction = weighted;
    rec.lo = rec.hi = weighted;
    rec.residual = obs.y - weighted;
    run.steps.push_back(rec);
    run.best_predictions.push_back(best.prediction);
    run.best_index.push_back(best.index);

    state = update_weights(state, losses);
    run.history.record(losses, state);
    append_trajectory(run.trajectory, state);
  }

  ExpertRun finish() {
    run.final_state = state;
    return std::move(run);
  }
};

}  // namespace

ExpertRun run_expert_stream(const Dataset& data, const ExpertPool& pool, double eta, double loss_cap) {
  if (data.observations.empty()) fail(ErrorCode::InsufficientData, "the stream is empty");
  EnsembleDriver driver(pool.size(), eta, loss_cap, pool.labels);
  for (const auto& obs : data.observations) {
    driver.consume(obs, expert_predictions(pool, obs.x), false);
  }
  return driver.finish();
}

ExpertRun run_dictionary_experts(const Dataset& data, const std::vector<DictionarySpec>& dictionaries,
                                 const RegressionOptions& base, double eta, double loss_cap) {
  if (dictionaries.empty()) fail(ErrorCode::InvalidInput, "at least one dictionary is required");
  check_dataset(data, base.dictionary.base_dim, base.warmup);
  const auto warmup_rows = head(data, base.warmup);

  std::vector<OnlineRegressor> learners;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < dictionaries.size(); ++k) {
    RegressionOptions opts = base;
    opts.dictionary = dictionaries[k];
    opts.init_mu = Eigen::VectorXd();
    learners.emplace_back(opts, warmup_rows);
    labels.push_back(fmt::format("E{}", k + 1));
  }

  const auto n = static_cast<Eigen::Index>(learners.size());
  EnsembleDriver driver(n, eta, loss_cap, labels);
  long long index = 0;
  for (const auto& obs : data.observations) {
    const bool warm = index < base.warmup;
    ++index;
    Eigen::VectorXd predictions(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      try {
        predictions(k) = learners[static_cast<std::size_t>(k)].step(obs, warm).prediction;
      } catch (const Error& e) {
        fail(ErrorCode::ExpertError, fmt::format("expert {} failed: {}", k + 1, e.what()),
             static_cast<std::size_t>(k));
      }
    }
    driver.consume(obs, predictions, warm);
  }
  return driver.finish();
}

std::optional<long long> dominance_step(const std::vector<WeightTrajectoryRow>& trajectory,
                                        Eigen::Index expert, double level) {
  for (const auto& row : trajectory) {
    if (row.expert_index == expert + 1 && row.weight >= level) return row.step;
  }
  return std::nullopt;
}

}  // namespace rsindy

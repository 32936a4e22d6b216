#include "rsindy/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rsindy/csv_stream.hpp"
#include "rsindy/error.hpp"
#include "rsindy/pipeline.hpp"

namespace rsindy {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", v);
}

namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }
std::string num(long long v) { return std::to_string(v); }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt_json(const std::optional<long long>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Json parameters_json(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma_diag) {
  return {{"mu", to_std(mu)}, {"sigma_diag", to_std(sigma_diag)}};
}

Json chart_json(const IChart& c) {
  return {{"upper", c.upper}, {"center", c.center}, {"lower", c.lower},
          {"basis_n", c.basis_n}};
}

Json metrics_json(const RegressionMetrics& m) {
  return {{"SST", m.sst}, {"SSE", m.sse}, {"n", m.n}, {"p", m.p},
          {"R2", m.r2},   {"sigma_hat", m.sigma_hat}, {"RMSE", m.rmse}};
}

Row metrics_row(long long step, const RegressionMetrics& m) {
  return {num(step), num(m.sst), num(m.sse), num(m.n), num(static_cast<long long>(m.p)),
          num(m.r2), num(m.sigma_hat), num(m.rmse)};
}

CsvTable params_table(const std::vector<ParamRecord>& params, const std::vector<std::string>& terms) {
  CsvTable t;
  t.header.push_back("step");
  for (const auto& name : terms) t.header.push_back("mu_" + name);
  for (const auto& name : terms) t.header.push_back("sigma_" + name);
  for (const auto& p : params) {
    Row r{num(p.step)};
    for (Eigen::Index i = 0; i < p.mu.size(); ++i) r.push_back(num(p.mu(i)));
    for (Eigen::Index i = 0; i < p.sigma_diag.size(); ++i) r.push_back(num(p.sigma_diag(i)));
    t.rows.push_back(std::move(r));
  }
  return t;
}

CsvTable drift_table(const std::vector<DriftEvent>& events) {
  CsvTable t{{"step", "detector", "statistic", "lower", "center", "upper"}, {}};
  for (const auto& e : events) {
    t.rows.push_back({num(e.step), e.detector, num(e.statistic), num(e.lower), num(e.center), num(e.upper)});
  }
  return t;
}

CsvTable score_table(const LambdaSelection& s) {
  CsvTable t{{"lambda", "split_index", "metric_value", "aggregate"}, {}};
  for (const auto& row : s.score_table) {
    t.rows.push_back({num(row.lambda), num(static_cast<long long>(row.split_index)), num(row.metric_value),
                      num(row.aggregate)});
  }
  return t;
}

Json selection_json(const std::optional<LambdaSelection>& s) {
  if (!s) return nullptr;
  return {{"lambda_star", s->lambda_star}, {"lambdas", s->lambdas}, {"aggregates", s->aggregates}};
}

const char* phase(bool warmup) { return warmup ? "warmup" : "stream"; }

// ---------------------------------------------------------------------------
// Per-model artifact builders

void add_regression(RunArtifacts& a, const RegressionRun& run, double level) {
  CsvTable pred{{"step", "phase", "y", "prediction", "lo", "hi", "residual", "flagged"}, {}};
  for (const auto& s : run.steps) {
    pred.rows.push_back({num(s.step), phase(s.warmup), num(s.y), num(s.prediction), num(s.lo), num(s.hi),
                         num(s.residual), s.flagged ? "1" : "0"});
  }
  a.tables["predictions.csv"] = std::move(pred);
  a.tables["params_trajectory.csv"] = params_table(run.params, run.term_names);
  CsvTable metrics{{"step", "SST", "SSE", "n", "p", "R2", "sigma_hat", "RMSE"}, {}};
  for (const auto& m : run.metrics) metrics.rows.push_back(metrics_row(m.step, m.metrics));
  a.tables["metrics.csv"] = std::move(metrics);
  a.tables["drift_events.csv"] = drift_table(run.drift);
  if (run.selection) a.tables["score_table.csv"] = score_table(*run.selection);

  Json& s = a.summary;
  s["model"] = {{"kind", "gaussian"},
                {"term_names", run.term_names},
                {"lambda_star", run.lambda_star},
                {"online_lambda", run.initial_model.lambda},
                {"eta", run.initial_model.eta},
                {"initial", parameters_json(run.initial_model.mu, run.initial_model.sigma.diagonal())},
                {"final", parameters_json(run.final_model.mu, run.final_model.sigma.diagonal())}};
  s["lambda_selection"] = selection_json(run.selection);
  s["metrics"] = run.final_metrics ? metrics_json(*run.final_metrics) : Json(nullptr);
  s["coverage"] = {{"level", level},
                   {"intervals", run.intervals},
                   {"misses", run.misses},
                   {"coverage", opt_json(run.coverage())}};
  s["drift"] = {{"detector", "nelson_rule1"},
                {"events", run.drift.size()},
                {"first_step", opt_json(run.first_flag_step)},
                {"warmup_chart", run.warmup_chart ? chart_json(*run.warmup_chart) : Json(nullptr)}};
}

void add_classification(RunArtifacts& a, const ClassificationRun& run) {
  CsvTable pred{{"step", "phase", "label", "probability", "predicted", "status"}, {}};
  CsvTable metrics{{"step", "n", "tp", "fp", "tn", "fn", "accuracy", "status"}, {}};
  ConfusionTally c;
  for (const auto& s : run.steps) {
    pred.rows.push_back({num(s.step), phase(s.warmup), num(static_cast<long long>(s.label)),
                         num(s.probability), num(static_cast<long long>(s.predicted)), to_string(s.status)});
    if (s.warmup) continue;
    c.add(s.label, s.predicted);
    metrics.rows.push_back({num(s.step), num(c.total()), num(c.tp), num(c.fp), num(c.tn), num(c.fn),
                            num(classification_metrics(c).accuracy), to_string(s.status)});
  }
  a.tables["predictions.csv"] = std::move(pred);
  a.tables["metrics.csv"] = std::move(metrics);
  a.tables["params_trajectory.csv"] = params_table(run.params, run.term_names);
  a.tables["drift_events.csv"] = drift_table(run.drift);
  if (run.selection) a.tables["score_table.csv"] = score_table(*run.selection);
  if (run.roc) {
    CsvTable roc{{"threshold", "fpr", "tpr"}, {}};
    for (const auto& p : run.roc->curve) roc.rows.push_back({num(p.threshold), num(p.fpr), num(p.tpr)});
    a.tables["roc.csv"] = std::move(roc);
  }

  Json& s = a.summary;
  s["model"] = {{"kind", "logistic"},
                {"term_names", run.term_names},
                {"lambda_star", run.lambda_star},
                {"online_lambda", run.initial_model.lambda},
                {"eta", run.initial_model.eta},
                {"initial", parameters_json(run.initial_model.mu, run.initial_model.sigma.diagonal())},
                {"final", parameters_json(run.final_model.mu, run.final_model.sigma.diagonal())}};
  s["lambda_selection"] = selection_json(run.selection);
  const auto stream = run.stream_n > 0 ? classification_metrics(run.stream_confusion)
                                       : ClassificationMetrics{std::nan(""), {}, {}, {}, {}};
  Json m;
  m["stream_n"] = run.stream_n;
  m["stream_threshold"] = run.stream_threshold;
  m["stream_accuracy"] = run.stream_n > 0 ? Json(stream.accuracy) : Json(nullptr);
  m["auc"] = run.roc ? Json(run.roc->auc) : Json(nullptr);
  m["youden_threshold"] = run.roc ? Json(run.roc->optimal_threshold) : Json(nullptr);
  m["youden_j"] = run.roc ? Json(run.roc->youden_j) : Json(nullptr);
  if (run.youden_metrics) {
    m["accuracy"] = run.youden_metrics->accuracy;
    m["tpr"] = opt_json(run.youden_metrics->tpr);
    m["tnr"] = opt_json(run.youden_metrics->tnr);
    m["precision"] = opt_json(run.youden_metrics->precision);
    m["f1"] = opt_json(run.youden_metrics->f1);
  } else {
    m["accuracy"] = nullptr;
  }
  m["total_log_loss"] = opt_json(run.log_loss);
  s["metrics"] = m;
  s["coverage"] = nullptr;
  s["drift"] = {{"detector", "ddm"},
                {"events", run.drift.size()},
                {"first_step", opt_json(run.first_drift_step)}};
}

void add_experts(RunArtifacts& a, const ExpertRun& run, double eta, double loss_cap) {
  CsvTable pred{{"step", "phase", "y", "prediction", "residual", "best_prediction", "best_expert"}, {}};
  CsvTable metrics{{"step", "weighted_cumulative_loss", "best_cumulative_loss"}, {}};
  double weighted = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    pred.rows.push_back({num(s.step), phase(s.warmup), num(s.y), num(s.prediction), num(s.residual),
                         num(run.best_predictions[i]), num(static_cast<long long>(run.best_index[i] + 1))});
    weighted += clamped_squared_loss(s.y, s.prediction, loss_cap);
    best += clamped_squared_loss(s.y, run.best_predictions[i], loss_cap);
    metrics.rows.push_back({num(s.step), num(weighted), num(best)});
  }
  a.tables["predictions.csv"] = std::move(pred);
  a.tables["metrics.csv"] = std::move(metrics);

  const auto n = run.final_state.size();
  CsvTable wide;
  wide.header.push_back("step");
  for (const auto& l : run.labels) wide.header.push_back("weight_" + l);
  for (std::size_t r = 0; r < run.trajectory.size(); r += static_cast<std::size_t>(n)) {
    Row row{num(run.trajectory[r].step)};
    for (Eigen::Index k = 0; k < n; ++k) row.push_back(num(run.trajectory[r + static_cast<std::size_t>(k)].weight));
    wide.rows.push_back(std::move(row));
  }
  a.tables["params_trajectory.csv"] = std::move(wide);
  CsvTable weights{{"step", "expert_index", "weight", "cumulative_loss"}, {}};
  for (const auto& r : run.trajectory) {
    weights.rows.push_back({num(r.step), num(static_cast<long long>(r.expert_index)), num(r.weight),
                            num(r.cumulative_loss)});
  }
  a.tables["weights.csv"] = std::move(weights);
  a.tables["drift_events.csv"] = drift_table({});

  const ProbVectord g_star = offline_optimum(run.history);
  const RegretCheck regret = regret_check(run.history, eta, g_star);
  const Eigen::Index leader = best_expert_index(run.final_state);

  Json& s = a.summary;
  s["model"] = {{"kind", "experts"},
                {"labels", run.labels},
                {"eta", eta},
                {"loss_cap", loss_cap},
                {"initial_weights", to_std(run.history.initial.weights())},
                {"final_weights", to_std(run.final_state.weights.weights())},
                {"cumulative_loss", to_std(run.final_state.cumulative_loss)}};
  s["metrics"] = {{"steps", run.final_state.steps},
                  {"weighted_cumulative_loss", run.weighted_cumulative_loss},
                  {"best_cumulative_loss", run.best_cumulative_loss},
                  {"ensemble_expected_loss", run.final_state.cumulative_weighted_loss},
                  {"leading_expert", leader + 1},
                  {"leading_expert_dominance_step", opt_json(dominance_step(run.trajectory, leader, 0.95))}};
  s["regret"] = {{"lhs", regret.lhs},
                 {"rhs", regret.rhs},
                 {"rhs_unsquared", regret.rhs_unsquared},
                 {"played_lhs", regret.played_lhs},
                 {"holds", regret.holds},
                 {"holds_unsquared", regret.holds_unsquared}};
  s["coverage"] = nullptr;
  s["drift"] = {{"detector", "none"}, {"events", 0}, {"first_step", nullptr}};
}

// ---------------------------------------------------------------------------
// Options from a run configuration

std::optional<LambdaGrid> grid_of(const RunConfig& c) {
  if (!c.lambda_grid) return std::nullopt;
  return LambdaGrid::linspace(c.lambda_grid->lo, c.lambda_grid->hi, c.lambda_grid->count);
}

Eigen::VectorXd init_of(const RunConfig& c) {
  return Eigen::Map<const Eigen::VectorXd>(c.init_mu.data(), static_cast<Eigen::Index>(c.init_mu.size()));
}

RegressionOptions regression_options(const RunConfig& c, int base_dim) {
  RegressionOptions o;
  o.dictionary = dictionary_for(c, base_dim);
  o.standardize = c.standardize;
  o.dynamic_standardization = c.dynamic_standardization;
  o.warmup = c.warmup;
  o.eta = c.eta;
  o.lambda = c.lambda;
  o.online_lambda = c.online_lambda;
  o.grid = grid_of(c);
  o.plan = c.plan;
  o.init_mu = init_of(c);
  o.interval_level = c.interval_level;
  o.chart_basis = c.chart_basis;
  o.freeze_sigma = c.freeze_sigma;
  return o;
}

ClassificationOptions classification_options(const RunConfig& c, int base_dim) {
  ClassificationOptions o;
  o.dictionary = dictionary_for(c, base_dim);
  o.standardize = c.standardize;
  o.dynamic_standardization = c.dynamic_standardization;
  o.warmup = c.warmup;
  o.eta = c.eta;
  o.lambda = c.lambda;
  o.online_lambda = c.online_lambda;
  o.grid = grid_of(c);
  o.plan = c.plan;
  o.init_mu = init_of(c);
  return o;
}

// ---------------------------------------------------------------------------
// Replicates

struct ReplicateResult {
  Row cells;
  std::vector<double> values;  // numeric columns after replicate/seed
};

std::uint64_t seed_of(const RunConfig& c, int replicate) {
  return replicate == 0 ? c.seed : replicate_seed(c.seed, static_cast<std::uint64_t>(replicate));
}

RunConfig with_seed(RunConfig c, std::uint64_t seed) {
  c.seed = seed;
  return c;
}

std::vector<std::string> replicate_columns(const RunConfig& c, const Dataset& sample) {
  switch (c.model) {
    case ModelKind::Gaussian: {
      std::vector<std::string> cols{"R2", "sigma_hat", "RMSE", "coverage"};
      for (const auto& name : term_names(dictionary_for(c, static_cast<int>(sample.feature_names.size())),
                                         sample.feature_names)) {
        cols.push_back("mu_" + name);
      }
      return cols;
    }
    case ModelKind::Logistic:
      return {"auc", "accuracy", "youden_threshold", "stream_accuracy"};
    case ModelKind::Experts:
      return {"leading_expert", "leading_weight", "dominance_step", "weighted_cumulative_loss",
              "best_cumulative_loss"};
  }
  return {};
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : std::nan(""); }

std::vector<double> replicate_values(const RunConfig& c) {
  const Dataset data = load_input(c);
  const int base_dim = static_cast<int>(data.feature_names.size());
  switch (c.model) {
    case ModelKind::Gaussian: {
      auto o = regression_options(c, base_dim);
      o.record = false;
      const auto run = run_regression_stream(data, o);
      std::vector<double> v;
      if (run.final_metrics) {
        v = {run.final_metrics->r2, run.final_metrics->sigma_hat, run.final_metrics->rmse};
      } else {
        v = {std::nan(""), std::nan(""), std::nan("")};
      }
      v.push_back(value_or_nan(run.coverage()));
      for (Eigen::Index i = 0; i < run.final_model.mu.size(); ++i) v.push_back(run.final_model.mu(i));
      return v;
    }
    case ModelKind::Logistic: {
      auto o = classification_options(c, base_dim);
      o.record = false;
      const auto run = run_classification_stream(data, o);
      const double stream_acc =
          run.stream_n > 0 ? classification_metrics(run.stream_confusion).accuracy : std::nan("");
      return {run.roc ? run.roc->auc : std::nan(""),
              run.youden_metrics ? run.youden_metrics->accuracy : std::nan(""),
              run.roc ? run.roc->optimal_threshold : std::nan(""), stream_acc};
    }
    case ModelKind::Experts: {
      const auto run = run_expert_stream(data, simulation_expert_pool(), c.eta, c.loss_cap);
      const Eigen::Index leader = best_expert_index(run.final_state);
      const auto dom = dominance_step(run.trajectory, leader, 0.95);
      return {static_cast<double>(leader + 1), run.final_state.weights[leader],
              dom ? static_cast<double>(*dom) : std::nan(""), run.weighted_cumulative_loss,
              run.best_cumulative_loss};
    }
  }
  return {};
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void add_replicates(RunArtifacts& a, const RunConfig& c, const Dataset& sample) {
  const auto columns = replicate_columns(c, sample);
  const int R = c.replicates;
  std::vector<std::vector<double>> values(static_cast<std::size_t>(R));

  // Fan out in waves of at most hardware_concurrency tasks; results land in
  // replicate order, so the reduction does not depend on scheduling.
  const int width = std::max(1u, std::thread::hardware_concurrency());
  for (int start = 0; start < R; start += width) {
    std::vector<std::future<std::vector<double>>> wave;
    for (int r = start; r < std::min(R, start + width); ++r) {
      wave.push_back(std::async(std::launch::async, [&c, r] { return replicate_values(with_seed(c, seed_of(c, r))); }));
    }
    for (int r = start; r < std::min(R, start + width); ++r) {
      values[static_cast<std::size_t>(r)] = wave[static_cast<std::size_t>(r - start)].get();
    }
  }

  CsvTable table;
  table.header = {"replicate", "seed"};
  table.header.insert(table.header.end(), columns.begin(), columns.end());
  for (int r = 0; r < R; ++r) {
    Row row{std::to_string(r), std::to_string(seed_of(c, r))};
    for (double v : values[static_cast<std::size_t>(r)]) row.push_back(num(v));
    table.rows.push_back(std::move(row));
  }
  a.tables["replicates.csv"] = std::move(table);

  Json summary = Json::object();
  for (std::size_t k = 0; k < columns.size(); ++k) {
    std::vector<double> col;
    for (const auto& v : values) {
      if (k < v.size() && std::isfinite(v[k])) col.push_back(v[k]);
    }
    Json entry;
    entry["count"] = col.size();
    if (col.empty()) {
      entry["mean"] = nullptr;
      entry["sd"] = nullptr;
      entry["q025"] = nullptr;
      entry["q975"] = nullptr;
    } else {
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(col.size());
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      entry["mean"] = mean;
      entry["sd"] = col.size() > 1 ? Json(std::sqrt(ss / static_cast<double>(col.size() - 1))) : Json(nullptr);
      entry["q025"] = quantile(col, 0.025);
      entry["q975"] = quantile(col, 0.975);
    }
    summary[columns[k]] = entry;
  }
  a.summary["replicates"] = {{"count", R}, {"columns", summary}};
}

Dataset load_csv_input(const RunConfig& c) {
  CsvSchema schema;
  schema.delimiter = c.delimiter;
  schema.label_column = c.label;
  for (const auto& t : c.text_columns) schema.columns.push_back({t, ColumnType::Text});
  for (const auto& f : c.features) schema.columns.push_back({f, ColumnType::Real});
  schema.columns.push_back({c.label, ColumnType::Real});
  auto stream = load_csv_stream(*c.input, schema);
  if (stream.data.observations.empty()) fail(ErrorCode::IoError, "input has no data rows");
  return std::move(stream.data);
}

}  // namespace

Dataset load_input(const RunConfig& c) {
  Dataset data;
  const bool simulated = c.mode == RunMode::Experiment && c.experiment >= 1 && c.experiment <= 4;
  if (simulated) {
    GeneratorConfig g;
    g.experiment = c.experiment;
    g.n = c.n;
    g.noise = c.noise.value_or(default_noise(c.experiment));
    g.seed = c.seed;
    data = generate(g);
  } else if (c.input) {
    data = load_csv_input(c);
  } else if (c.synthetic && c.mode == RunMode::Experiment) {
    data = c.experiment == 7 ? generate_elec2_standin(c.n, c.seed) : generate_unemployment_standin(c.n, c.seed);
  } else {
    fail(ErrorCode::InvalidConfig, "this run needs an input CSV (--data) or the synthetic stand-in (--synthetic)");
  }
  if (c.label_transform == LabelTransform::LogitPercent) {
    for (auto& obs : data.observations) obs.y = logit_transform(obs.y);
  }
  return data;
}

RunArtifacts execute(const RunConfig& config) {
  validate(config);
  if (config.replicates > 1 && !(config.mode == RunMode::Experiment && config.experiment <= 4)) {
    fail(ErrorCode::InvalidConfig, "replicates apply to the simulated experiments 1-4");
  }
  const Dataset data = load_input(config);
  const int base_dim = static_cast<int>(data.feature_names.size());

  RunArtifacts a;
  Json& s = a.summary;
  s["schema_version"] = kReportSchemaVersion;
  s["run"] = {{"mode", config.mode == RunMode::Experiment ? "experiment" : "fit-stream"},
              {"experiment", config.mode == RunMode::Experiment ? Json(config.experiment) : Json(nullptr)},
              {"model", to_string(config.model)},
              {"seed", config.seed},
              {"n", data.observations.size()},
              {"warmup", config.warmup},
              {"features", data.feature_names}};
  s["config"] = to_json(config);

  const bool dictionary_experts = config.model == ModelKind::Experts && config.experiment == 6;
  if (dictionary_experts) {
    auto base = regression_options(config, base_dim);
    const auto run =
        run_dictionary_experts(data, expert_grid(base_dim), base, config.ensemble_eta, config.loss_cap);
    add_experts(a, run, config.ensemble_eta, config.loss_cap);
    Json dims = Json::array();
    for (const auto& d : expert_grid(base_dim)) dims.push_back(dimension(d));
    s["model"]["dimensions"] = dims;
  } else {
    switch (config.model) {
      case ModelKind::Gaussian:
        add_regression(a, run_regression_stream(data, regression_options(config, base_dim)), config.interval_level);
        break;
      case ModelKind::Logistic:
        add_classification(a, run_classification_stream(data, classification_options(config, base_dim)));
        break;
      case ModelKind::Experts:
        add_experts(a, run_expert_stream(data, simulation_expert_pool(), config.eta, config.loss_cap), config.eta,
                    config.loss_cap);
        break;
    }
  }
  if (config.replicates > 1) add_replicates(a, config, data);

  Json files = Json::array();
  for (const auto& [name, table] : a.tables) files.push_back(name);
  files.push_back("summary.json");
  s["files"] = files;
  return a;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&out](const Row& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

void emit_report(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, table] : artifacts.tables) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + (dir / name).string());
    write_csv(out, table);
  }
  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + (dir / "summary.json").string());
  out << artifacts.summary.dump(2) << '\n';
}

}  // namespace rsindy

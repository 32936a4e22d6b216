#include "rsindy/run_config.hpp"

#include <cstdlib>

#include "rsindy/datagen.hpp"
#include "rsindy/error.hpp"

namespace rsindy {

namespace {

SplitPlan expanding(Eigen::Index initial, Eigen::Index horizon, Eigen::Index splits) {
  return {SplitMode::ExpandingWindow, initial, horizon, horizon, splits};
}

template <typename T>
void take(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("config field '") + key + "': " + e.what());
  }
}

template <typename T>
void take_optional(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  take(j, key, value);
  out = value;
}

std::string label_transform_name(LabelTransform t) {
  return t == LabelTransform::LogitPercent ? "logit_percent" : "none";
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gaussian: return "gaussian";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Experts: return "experts";
  }
  return "gaussian";
}

std::string to_string(SplitMode mode) {
  return mode == SplitMode::RollingIncrement ? "rolling" : "expanding";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gaussian") return ModelKind::Gaussian;
  if (s == "logistic") return ModelKind::Logistic;
  if (s == "experts") return ModelKind::Experts;
  fail(ErrorCode::InvalidConfig, "unknown model '" + s + "'");
}

SplitMode split_mode_from_string(const std::string& s) {
  if (s == "rolling") return SplitMode::RollingIncrement;
  if (s == "expanding") return SplitMode::ExpandingWindow;
  fail(ErrorCode::InvalidConfig, "unknown split mode '" + s + "'");
}

ChartBasis chart_basis_from_string(const std::string& s) {
  if (s == "warmup") return ChartBasis::WarmupOnly;
  if (s == "expanding") return ChartBasis::Expanding;
  fail(ErrorCode::InvalidConfig, "unknown chart basis '" + s + "'");
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("RSINDY_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "rsindy_out";
}

RunConfig experiment_defaults(int id) {
  RunConfig c;
  c.mode = RunMode::Experiment;
  c.experiment = id;
  c.output_dir = default_output_dir();
  switch (id) {
    case 1:
      c.n = 10000;
      c.noise = default_noise(1);
      c.eta = 0.1;
      c.lambda = 0.0;
      c.include_intercept = false;
      break;
    case 2:
      c.n = 500;
      c.noise = default_noise(2);
      c.eta = 1e-3;
      c.warmup = 250;
      c.standardize = true;
      c.lambda_grid = GridSpec{};
      c.plan = SplitPlan{SplitMode::RollingIncrement, 50, 5, 5, 40};
      break;
    case 3:
      c.model = ModelKind::Logistic;
      c.n = 500;
      c.eta = 0.1;
      c.warmup = 250;
      c.lambda = 0.0;
      break;
    case 4:
      c.model = ModelKind::Experts;
      c.n = 100;
      c.noise = default_noise(4);
      c.ensemble_eta = 0.1;
      break;
    case 5:
    case 6:
      c.model = id == 5 ? ModelKind::Gaussian : ModelKind::Experts;
      c.n = 700;
      c.eta = 1e-3;
      c.warmup = 395;
      c.standardize = true;
      c.lambda_grid = GridSpec{};
      c.plan = expanding(240, 12, 12);
      c.features = {"UNEMP_LAG1", "IC", "CPI", "IPI"};
      c.label = "UNEMP";
      c.label_transform = LabelTransform::LogitPercent;
      c.online_lambda = 0.0;
      c.ensemble_eta = 0.1;
      break;
    case 7:
      c.model = ModelKind::Logistic;
      c.n = 12000;
      c.eta = 0.01;
      c.warmup = 10000;
      c.lambda_grid = GridSpec{};
      c.plan = expanding(1344, 336, 25);
      c.features = {"day", "period", "nswdemand", "vicdemand", "transfer"};
      c.label = "class";
      break;
    default:
      fail(ErrorCode::InvalidConfig, "unknown experiment id " + std::to_string(id) + " (valid: 1-7)");
  }
  return c;
}

RunConfig apply_json(RunConfig c, const Json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "experiment") {
      c.mode = RunMode::Experiment;
    } else if (m == "fit-stream") {
      c.mode = RunMode::FitStream;
    } else {
      fail(ErrorCode::InvalidConfig, "unknown mode '" + m + "'");
    }
  }
  take(j, "experiment", c.experiment);
  if (j.contains("model")) c.model = model_kind_from_string(j.at("model").get<std::string>());

  if (j.contains("input")) {
    if (j.at("input").is_null()) {
      c.input.reset();
    } else {
      c.input = j.at("input").get<std::string>();
    }
  }
  take(j, "features", c.features);
  take(j, "text_columns", c.text_columns);
  take(j, "label", c.label);
  if (j.contains("delimiter")) {
    const auto d = j.at("delimiter").get<std::string>();
    if (d.size() != 1) fail(ErrorCode::InvalidConfig, "delimiter must be a single character");
    c.delimiter = d[0];
  }
  if (j.contains("label_transform")) {
    const auto t = j.at("label_transform").get<std::string>();
    if (t == "none") {
      c.label_transform = LabelTransform::None;
    } else if (t == "logit_percent") {
      c.label_transform = LabelTransform::LogitPercent;
    } else {
      fail(ErrorCode::InvalidConfig, "unknown label_transform '" + t + "'");
    }
  }
  take(j, "synthetic", c.synthetic);

  take(j, "n", c.n);
  take_optional(j, "noise", c.noise);
  take(j, "seed", c.seed);
  take(j, "replicates", c.replicates);

  take(j, "eta", c.eta);
  take_optional(j, "lambda", c.lambda);
  take_optional(j, "online_lambda", c.online_lambda);
  if (j.contains("lambda_grid")) {
    const auto& g = j.at("lambda_grid");
    if (g.is_null()) {
      c.lambda_grid.reset();
    } else {
      GridSpec spec;
      take(g, "lo", spec.lo);
      take(g, "hi", spec.hi);
      take(g, "count", spec.count);
      c.lambda_grid = spec;
    }
  }
  if (j.contains("split_plan")) {
    const auto& p = j.at("split_plan");
    if (p.is_null()) {
      c.plan.reset();
    } else {
      SplitPlan plan;
      if (p.contains("mode")) plan.mode = split_mode_from_string(p.at("mode").get<std::string>());
      take(p, "initial_train", plan.initial_train);
      take(p, "step", plan.step);
      take(p, "horizon", plan.horizon);
      take(p, "n_splits", plan.n_splits);
      c.plan = plan;
    }
  }
  if (j.contains("dictionary")) {
    const auto& d = j.at("dictionary");
    take(d, "include_intercept", c.include_intercept);
    take(d, "interactions", c.interactions);
    take(d, "squares", c.squares);
    take(d, "sine", c.sine);
    take(d, "cosine", c.cosine);
  }
  take(j, "standardize", c.standardize);
  take(j, "dynamic_standardization", c.dynamic_standardization);
  take(j, "freeze_sigma", c.freeze_sigma);
  take(j, "warmup", c.warmup);
  take(j, "interval_level", c.interval_level);
  if (j.contains("chart_basis")) c.chart_basis = chart_basis_from_string(j.at("chart_basis").get<std::string>());
  take(j, "init_mu", c.init_mu);
  take(j, "ensemble_eta", c.ensemble_eta);
  take(j, "loss_cap", c.loss_cap);
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["mode"] = c.mode == RunMode::Experiment ? "experiment" : "fit-stream";
  j["experiment"] = c.experiment;
  j["model"] = to_string(c.model);
  j["input"] = c.input ? Json(c.input->string()) : Json(nullptr);
  j["features"] = c.features;
  j["text_columns"] = c.text_columns;
  j["label"] = c.label;
  j["delimiter"] = std::string(1, c.delimiter);
  j["label_transform"] = label_transform_name(c.label_transform);
  j["synthetic"] = c.synthetic;
  j["n"] = c.n;
  j["noise"] = c.noise ? Json(*c.noise) : Json(nullptr);
  j["seed"] = c.seed;
  j["replicates"] = c.replicates;
  j["eta"] = c.eta;
  j["lambda"] = c.lambda ? Json(*c.lambda) : Json(nullptr);
  j["online_lambda"] = c.online_lambda ? Json(*c.online_lambda) : Json(nullptr);
  if (c.lambda_grid) {
    j["lambda_grid"] = {{"lo", c.lambda_grid->lo}, {"hi", c.lambda_grid->hi}, {"count", c.lambda_grid->count}};
  } else {
    j["lambda_grid"] = nullptr;
  }
  if (c.plan) {
    j["split_plan"] = {{"mode", to_string(c.plan->mode)},
                       {"initial_train", c.plan->initial_train},
                       {"step", c.plan->step},
                       {"horizon", c.plan->horizon},
                       {"n_splits", c.plan->n_splits}};
  } else {
    j["split_plan"] = nullptr;
  }
  j["dictionary"] = {{"include_intercept", c.include_intercept},
                     {"interactions", c.interactions},
                     {"squares", c.squares},
                     {"sine", c.sine},
                     {"cosine", c.cosine}};
  j["standardize"] = c.standardize;
  j["dynamic_standardization"] = c.dynamic_standardization;
  j["freeze_sigma"] = c.freeze_sigma;
  j["warmup"] = c.warmup;
  j["interval_level"] = c.interval_level;
  j["chart_basis"] = c.chart_basis == ChartBasis::WarmupOnly ? "warmup" : "expanding";
  j["init_mu"] = c.init_mu;
  j["ensemble_eta"] = c.ensemble_eta;
  j["loss_cap"] = c.loss_cap;
  j["output_dir"] = c.output_dir.string();
  return j;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::InvalidConfig, msg); };
  if (c.mode == RunMode::Experiment && (c.experiment < 1 || c.experiment > 7)) {
    bad("experiment id must be 1-7");
  }
  if (c.n < 0) bad("n must be >= 0");
  if (c.noise && !(*c.noise >= 0.0)) bad("noise must be >= 0");
  if (c.replicates < 1) bad("replicates must be >= 1");
  if (!(c.eta > 0.0)) bad("eta must be > 0");
  if (c.lambda && !(*c.lambda >= 0.0)) bad("lambda must be >= 0");
  if (c.online_lambda && !(*c.online_lambda >= 0.0)) bad("online_lambda must be >= 0");
  if (c.lambda_grid) {
    if (!c.plan) bad("a lambda grid requires a split plan");
    if (c.lambda_grid->count < 1) bad("lambda grid needs at least one value");
    if (!(c.lambda_grid->lo >= 0.0) || !(c.lambda_grid->hi >= c.lambda_grid->lo)) {
      bad("lambda grid bounds must satisfy 0 <= lo <= hi");
    }
    if (c.lambda_grid->count > 1 && c.lambda_grid->hi == c.lambda_grid->lo) {
      bad("lambda grid with several values needs lo < hi");
    }
  }
  if (c.lambda && c.lambda_grid) bad("give either a fixed lambda or a lambda grid, not both");
  if (c.lambda_grid && c.warmup < 1) bad("lambda selection needs a warm-up segment");
  if (c.warmup < 0) bad("warmup must be >= 0");
  if (c.standardize && c.warmup < 2) bad("standardization needs a warm-up of at least two rows");
  if (!(c.interval_level > 0.0 && c.interval_level < 1.0)) bad("interval level must lie in (0,1)");
  if (!(c.ensemble_eta > 0.0)) bad("ensemble eta must be > 0");
  if (!(c.loss_cap > 0.0)) bad("loss cap must be > 0");
  if (c.mode == RunMode::FitStream) {
    if (!c.input) bad("fit-stream needs an input CSV");
    if (c.features.empty()) bad("fit-stream needs at least one feature column");
    if (c.model == ModelKind::Experts) bad("fit-stream supports the gaussian and logistic models");
  }
}

DictionarySpec dictionary_for(const RunConfig& c, int base_dim) {
  DictionarySpec d;
  d.base_dim = base_dim;
  d.include_intercept = c.include_intercept;
  d.interactions = c.interactions;
  d.squares = c.squares;
  d.sine = c.sine;
  d.cosine = c.cosine;
  validate(d);
  return d;
}

}  // namespace rsindy

// rsindy: run the simulation/application studies or stream-fit a local CSV.
//
//   rsindy run-experiment <1-7> [options]
//   rsindy fit-stream --data file.csv --features a,b,c --label y [options]
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <fmt/format.h>

#include "rsindy/error.hpp"
#include "rsindy/report.hpp"
#include "rsindy/run_config.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kNumeric = 3 };

int exit_code(rsindy::ErrorCode code) {
  using rsindy::ErrorCode;
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::SchemaError:
    case ErrorCode::ParseError:
      return kIo;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidPlan:
    case ErrorCode::InvalidInput:
      return kConfig;
    default:
      return kNumeric;
  }
}

struct Flags {
  std::optional<std::string> config_file;
  std::optional<std::string> data;
  bool synthetic = false;
  std::optional<std::string> model;
  std::optional<std::vector<std::string>> features;
  std::optional<std::string> label;
  std::optional<long long> n;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<double> eta;
  std::optional<double> ensemble_eta;
  std::optional<double> lambda;
  std::optional<double> online_lambda;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<long long> warmup;
  std::optional<double> interval_level;
  std::optional<std::string> chart_basis;
  bool freeze_sigma = false;
  bool standardize = false;
  std::optional<std::string> out;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "JSON run configuration; flags override its fields");
  app->add_option("--data", f.data, "input CSV");
  app->add_option("--n", f.n, "stream length for generated data");
  app->add_option("--noise", f.noise, "noise standard deviation (experiments 1, 2, 4)");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--replicates", f.replicates, "Monte Carlo replicates (experiments 1-4)");
  app->add_option("--eta", f.eta, "learning rate");
  app->add_option("--ensemble-eta", f.ensemble_eta, "expert-weight learning rate (experiment 6)");
  app->add_option("--lambda", f.lambda, "fixed ridge penalty");
  app->add_option("--online-lambda", f.online_lambda, "penalty for the streaming updates (default: the warm-up one)");
  app->add_option("--lambda-grid", f.lambda_grid, "lo,hi,count for an evenly spaced grid")
      ->delimiter(',')
      ->expected(3);
  app->add_option("--warmup", f.warmup, "warm-up rows");
  app->add_option("--interval-level", f.interval_level, "prediction interval level in (0,1)");
  app->add_option("--chart-basis", f.chart_basis, "warmup | expanding");
  app->add_flag("--freeze-sigma", f.freeze_sigma, "keep Sigma at its initial value");
  app->add_option("--out", f.out, "output directory (default: $RSINDY_OUTPUT_DIR or ./rsindy_out)");
}

rsindy::RunConfig load_file(rsindy::RunConfig base, const std::string& path) {
  std::ifstream in(path);
  if (!in) rsindy::fail(rsindy::ErrorCode::IoError, "cannot open config " + path);
  rsindy::Json j;
  try {
    in >> j;
  } catch (const rsindy::Json::exception& e) {
    rsindy::fail(rsindy::ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return rsindy::apply_json(std::move(base), j);
}

rsindy::RunConfig overlay(rsindy::RunConfig c, const Flags& f) {
  if (f.config_file) c = load_file(std::move(c), *f.config_file);
  if (f.data) c.input = *f.data;
  if (f.synthetic) c.synthetic = true;
  if (f.model) c.model = rsindy::model_kind_from_string(*f.model);
  if (f.features) c.features = *f.features;
  if (f.label) c.label = *f.label;
  if (f.n) c.n = *f.n;
  if (f.noise) c.noise = *f.noise;
  if (f.seed) c.seed = *f.seed;
  if (f.replicates) c.replicates = *f.replicates;
  if (f.eta) c.eta = *f.eta;
  if (f.ensemble_eta) c.ensemble_eta = *f.ensemble_eta;
  if (f.lambda) {
    c.lambda = *f.lambda;
    c.lambda_grid.reset();
  }
  if (f.lambda_grid) {
    const auto& g = *f.lambda_grid;
    c.lambda_grid = rsindy::GridSpec{g[0], g[1], static_cast<int>(g[2])};
    c.lambda.reset();
  }
  if (f.online_lambda) c.online_lambda = *f.online_lambda;
  if (f.warmup) c.warmup = *f.warmup;
  if (f.interval_level) c.interval_level = *f.interval_level;
  if (f.chart_basis) c.chart_basis = rsindy::chart_basis_from_string(*f.chart_basis);
  if (f.freeze_sigma) c.freeze_sigma = true;
  if (f.standardize) c.standardize = true;
  if (f.out) c.output_dir = *f.out;
  return c;
}

void print_summary(const rsindy::RunArtifacts& a, const rsindy::RunConfig& c) {
  const auto& s = a.summary;
  std::cout << fmt::format("wrote {} files to {}\n", s["files"].size(), c.output_dir.string());
  if (s.contains("metrics") && !s["metrics"].is_null()) std::cout << "metrics: " << s["metrics"].dump() << '\n';
  if (s.contains("model") && s["model"].contains("final")) {
    std::cout << "final mu: " << s["model"]["final"]["mu"].dump() << '\n';
  }
  if (s.contains("coverage") && !s["coverage"].is_null()) std::cout << "coverage: " << s["coverage"].dump() << '\n';
  if (s.contains("replicates")) std::cout << "replicates: " << s["replicates"]["columns"].dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized-SINDy streaming learners: experiments and stream fitting"};
  app.require_subcommand(1);

  Flags flags;
  int experiment_id = 0;
  auto* run = app.add_subcommand("run-experiment", "run one of the studies 1-7");
  run->add_option("id", experiment_id, "experiment id (1-7)")->required();
  run->add_flag("--synthetic", flags.synthetic, "use the built-in synthetic stand-in (experiments 5-7)");
  add_common(run, flags);

  auto* fit = app.add_subcommand("fit-stream", "warm up and stream-fit a model on a CSV");
  fit->add_option("--model", flags.model, "gaussian | logistic");
  fit->add_option("--features", flags.features, "feature columns")->delimiter(',');
  fit->add_option("--label", flags.label, "label column");
  fit->add_flag("--standardize", flags.standardize, "standardize features with warm-up statistics");
  add_common(fit, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  rsindy::RunConfig config;
  try {
    if (run->parsed()) {
      if (experiment_id < 1 || experiment_id > 7) {
        std::cerr << "error: unknown experiment id " << experiment_id << " (valid: 1-7)\n\n"
                  << run->help();
        return kConfig;
      }
      config = overlay(rsindy::experiment_defaults(experiment_id), flags);
    } else {
      rsindy::RunConfig base;
      base.mode = rsindy::RunMode::FitStream;
      base.output_dir = rsindy::default_output_dir();
      config = overlay(base, flags);
    }
    const auto artifacts = rsindy::execute(config);
    rsindy::emit_report(artifacts, config.output_dir);
    print_summary(artifacts, config);
    return kOk;
  } catch (const rsindy::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

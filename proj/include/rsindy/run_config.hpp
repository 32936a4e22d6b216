#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rsindy/feature_library.hpp"
#include "rsindy/serialization.hpp"
#include "rsindy/warmup.hpp"

namespace rsindy {

enum class RunMode { Experiment, FitStream };
enum class ModelKind { Gaussian, Logistic, Experts };
enum class ChartBasis { WarmupOnly, Expanding };
enum class LabelTransform { None, LogitPercent };

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 30;
};

struct RunConfig {
  RunMode mode = RunMode::FitStream;
  int experiment = 0;
  ModelKind model = ModelKind::Gaussian;

  // Input: a local CSV, or (experiments 5-7) a built-in synthetic stand-in.
  std::optional<std::filesystem::path> input;
  std::vector<std::string> features;
  std::vector<std::string> text_columns;
  std::string label = "y";
  char delimiter = ',';
  LabelTransform label_transform = LabelTransform::None;
  bool synthetic = false;

  // Simulation.
  long long n = 0;
  std::optional<double> noise;
  std::uint64_t seed = 1;
  int replicates = 1;

  // Learner.
  double eta = 0.1;
  std::optional<double> lambda;
  /// Penalty used by the streaming updates when it differs from the warm-up one.
  std::optional<double> online_lambda;
  std::optional<GridSpec> lambda_grid;
  std::optional<SplitPlan> plan;
  bool include_intercept = true;
  bool interactions = false;
  bool squares = false;
  bool sine = false;
  bool cosine = false;
  bool standardize = false;
  bool dynamic_standardization = true;
  bool freeze_sigma = false;
  long long warmup = 0;
  double interval_level = 0.95;
  ChartBasis chart_basis = ChartBasis::WarmupOnly;
  std::vector<double> init_mu;

  // Expert ensembles.
  double ensemble_eta = 0.1;
  double loss_cap = 10.0;

  std::filesystem::path output_dir = "rsindy_out";
};

/// Study presets (ids 1..7); throws InvalidConfig otherwise.
RunConfig experiment_defaults(int id);

/// Overlays the fields present in `j` onto `base`.
RunConfig apply_json(RunConfig base, const Json& j);
Json to_json(const RunConfig& config);

/// Internal consistency checks (e.g. a lambda grid needs a split plan).
void validate(const RunConfig& config);

/// Name of the default output directory, honouring RSINDY_OUTPUT_DIR.
std::filesystem::path default_output_dir();

DictionarySpec dictionary_for(const RunConfig& config, int base_dim);

std::string to_string(ModelKind kind);
std::string to_string(SplitMode mode);
ModelKind model_kind_from_string(const std::string& s);
SplitMode split_mode_from_string(const std::string& s);
ChartBasis chart_basis_from_string(const std::string& s);

}  // namespace rsindy

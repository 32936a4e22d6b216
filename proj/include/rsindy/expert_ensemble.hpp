#pragma once

// Prediction with expert advice over a finite pool. Weights g live on the
// simplex; each round takes a gradient step on the linear cost
// c(g) = Σ l_i g_i and projects back onto the simplex.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsindy/geometry.hpp"

namespace rsindy {

using ExpertFn = std::function<double(const Eigen::VectorXd&)>;

struct ExpertPool {
  std::vector<ExpertFn> experts;
  std::vector<std::string> labels;
  Eigen::Index input_dim = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(experts.size()); }
};

ExpertPool make_expert_pool(std::vector<ExpertFn> experts, std::vector<std::string> labels,
                            Eigen::Index input_dim);

struct EnsembleState {
  ProbVectord weights;
  double eta = 0.1;
  Eigen::VectorXd cumulative_loss;
  double cumulative_weighted_loss = 0.0;
  long long steps = 0;

  Eigen::Index size() const { return weights.size(); }

  /// Uniform weights 1/n, zero accumulated loss.
  static EnsembleState uniform(Eigen::Index n, double eta);
};

/// Squared error clamped into [0, l_max].
double clamped_squared_loss(double y, double prediction, double l_max = 10.0);

/// Σ_i g_i l_i under the current weights.
double expected_loss(const EnsembleState& state, const Eigen::VectorXd& losses);

/// g' = proj_simplex(g - eta * losses); cumulative accounting advances.
EnsembleState update_weights(const EnsembleState& state, const Eigen::VectorXd& losses);

/// Evaluates every expert on x; failures raise ExpertError(index).
Eigen::VectorXd expert_predictions(const ExpertPool& pool, const Eigen::VectorXd& x);

double predict_weighted(const EnsembleState& state, const Eigen::VectorXd& predictions);
double predict_weighted(const EnsembleState& state, const ExpertPool& pool,
                        const Eigen::VectorXd& x);

struct BestExpert {
  double prediction = 0.0;
  Eigen::Index index = 0;  // zero-based
};

/// Heaviest expert; ties go to the lowest index.
Eigen::Index best_expert_index(const EnsembleState& state);
BestExpert predict_best(const EnsembleState& state, const Eigen::VectorXd& predictions);
BestExpert predict_best(const EnsembleState& state, const ExpertPool& pool,
                        const Eigen::VectorXd& x);

/// Per-round record used by the regret check. `weights_after[t]` is the
/// weight vector produced by the update that consumed `losses[t]`.
struct EnsembleHistory {
  ProbVectord initial;
  std::vector<Eigen::VectorXd> losses;
  std::vector<Eigen::VectorXd> weights_after;

  void record(const Eigen::VectorXd& round_losses, const EnsembleState& after);
  std::size_t rounds() const { return losses.size(); }
};

struct RegretCheck {
  double lhs = 0.0;            // 2 Σ eta [c_t(g_{t+1}) - c_t(g*)]
  double rhs = 0.0;            // ‖g_1 - g*‖²
  double rhs_unsquared = 0.0;  // ‖g_1 - g*‖, as the bound is also written
  double played_lhs = 0.0;     // same sum with the pre-update weights g_t
  bool holds = false;
  bool holds_unsquared = false;
};

inline constexpr double kRegretSlack = 1e-9;

RegretCheck regret_check(const EnsembleHistory& history, double eta, const ProbVectord& g_star);

/// Best fixed weight vector in hindsight. Costs are linear in g, so the
/// optimum is the vertex of the expert with the smallest cumulative loss.
ProbVectord offline_optimum(const EnsembleHistory& history);

/// One row per (step, expert): step, expert_index (1-based), weight, cumulative_loss.
struct WeightTrajectoryRow {
  long long step;
  Eigen::Index expert_index;
  double weight;
  double cumulative_loss;
};

void append_trajectory(std::vector<WeightTrajectoryRow>& rows, const EnsembleState& state);
void write_weight_trajectory_csv(std::ostream& out, const std::vector<WeightTrajectoryRow>& rows);

}  // namespace rsindy

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rsindy/geometry.hpp"

namespace rsindy {

/// How consecutive training windows grow. Both start at the origin.
///  - RollingIncrement: training end advances by `step` per split.
///  - ExpandingWindow: training end advances by `horizon`, so validation
///    blocks tile the segment back to back; `step` is ignored.
enum class SplitMode { RollingIncrement, ExpandingWindow };

struct SplitPlan {
  SplitMode mode = SplitMode::RollingIncrement;
  Eigen::Index initial_train = 1;
  Eigen::Index step = 1;
  Eigen::Index horizon = 1;
  Eigen::Index n_splits = 1;
};

/// Half-open index range [begin, end).
struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

struct Split {
  IndexRange train;
  IndexRange validation;
};

std::vector<Split> make_splits(const SplitPlan& plan, Eigen::Index n_total);

/// Sorted, strictly increasing, non-negative candidate set.
class LambdaGrid {
 public:
  explicit LambdaGrid(std::vector<double> values);
  /// `count` evenly spaced values from lo to hi inclusive.
  static LambdaGrid linspace(double lo, double hi, int count);

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct RidgeFit {
  Eigen::VectorXd mu;
  double noise_var = 0.0;  // SSE/(n-p); zero when n <= p
};

/// mu = (XᵀX + lambda I)⁻¹ Xᵀy via QR of the stacked system [X; sqrt(lambda) I].
RidgeFit ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

/// noise_var (XᵀX + lambda I)⁻¹, formed from the triangular QR factor.
SymMatrixd init_covariance(const Eigen::MatrixXd& X, double lambda, double noise_var);

struct LogisticFit {
  Eigen::VectorXd mu;
  SymMatrixd covariance;  // inverse Hessian of the penalized objective at mu
  int iterations = 0;
};

/// Penalized maximum likelihood: minimizes Σ [softplus(xᵢᵀw) - yᵢ xᵢᵀw] + lambda‖w‖²
/// by damped Newton. Labels must be 0/1.
LogisticFit ridge_logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                               int max_iterations = 100);

enum class SelectionMetric { Rmse, Accuracy };

struct ScoreRow {
  double lambda = 0.0;
  Eigen::Index split_index = 0;
  double metric_value = 0.0;  // NaN when the fit failed
  double aggregate = 0.0;     // mean over this lambda's successful splits
  std::string error;          // empty on success
};

struct LambdaSelection {
  double lambda_star = 0.0;
  std::vector<double> lambdas;
  std::vector<double> aggregates;
  std::vector<ScoreRow> score_table;
};

/// Fits every (split, lambda) pair on the training range and scores it on
/// the validation range. Ties go to the smaller lambda. Classification uses
/// a 0.5 probability cut for accuracy.
LambdaSelection select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const SplitPlan& plan, const LambdaGrid& grid,
                              SelectionMetric metric);

void write_score_table_csv(std::ostream& out, const LambdaSelection& selection);

}  // namespace rsindy

#include "rsindy/warmup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rsindy/error.hpp"
#include "rsindy/logistic_classifier.hpp"

namespace rsindy {

std::vector<Split> make_splits(const SplitPlan& plan, Eigen::Index n_total) {
  if (plan.initial_train < 1 || plan.step < 1 || plan.horizon < 1 || plan.n_splits < 1) {
    fail(ErrorCode::InvalidPlan, "split plan fields must all be positive");
  }
  const Eigen::Index advance =
      plan.mode == SplitMode::ExpandingWindow ? plan.horizon : plan.step;
  const Eigen::Index last_end =
      plan.initial_train + (plan.n_splits - 1) * advance + plan.horizon;
  if (last_end > n_total) {
    fail(ErrorCode::InvalidPlan,
         fmt::format("split plan needs {} observations but only {} are available", last_end,
                     n_total));
  }
  std::vector<Split> out;
  out.reserve(static_cast<std::size_t>(plan.n_splits));
  for (Eigen::Index k = 0; k < plan.n_splits; ++k) {
    const Eigen::Index train_end = plan.initial_train + k * advance;
    out.push_back({{0, train_end}, {train_end, train_end + plan.horizon}});
  }
  return out;
}

LambdaGrid::LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::InvalidInput, "lambda grid must be non-empty");
  std::sort(values_.begin(), values_.end());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      fail(ErrorCode::InvalidInput, "lambda grid values must be finite and non-negative");
    }
    if (i > 0 && values_[i] == values_[i - 1]) {
      fail(ErrorCode::InvalidInput, "lambda grid values must be distinct");
    }
  }
}

LambdaGrid LambdaGrid::linspace(double lo, double hi, int count) {
  if (count < 1) fail(ErrorCode::InvalidInput, "lambda grid needs at least one value");
  if (count == 1) return LambdaGrid({lo});
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return LambdaGrid(std::move(v));
}

namespace {

void check_design(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  if (X.rows() != y.size()) fail(ErrorCode::InvalidInput, "design rows and targets differ in length");
  if (X.cols() < 1) fail(ErrorCode::InvalidInput, "design matrix has no columns");
  if (!X.allFinite() || !y.allFinite()) fail(ErrorCode::InvalidInput, "non-finite design or target");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidInput, "lambda must be finite and non-negative");
  }
}

Eigen::MatrixXd stacked_design(const Eigen::MatrixXd& X, double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd A(n + p, p);
  A.topRows(n) = X;
  A.bottomRows(p) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(p, p);
  return A;
}

}  // namespace

RidgeFit ridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  check_design(X, y, lambda);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const Eigen::MatrixXd A = stacked_design(X, lambda);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + p);
  b.head(n) = y;

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < p) fail(ErrorCode::SingularSystem, "ridge system is rank deficient");

  RidgeFit fit;
  fit.mu = qr.solve(b);
  const double sse = (y - X * fit.mu).squaredNorm();
  fit.noise_var = n > p ? sse / static_cast<double>(n - p) : 0.0;
  return fit;
}

SymMatrixd init_covariance(const Eigen::MatrixXd& X, double lambda, double noise_var) {
  check_design(X, Eigen::VectorXd::Zero(X.rows()), lambda);
  if (!(noise_var >= 0.0)) fail(ErrorCode::InvalidInput, "noise variance must be non-negative");
  const Eigen::Index p = X.cols();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked_design(X, lambda));
  if (qr.rank() < p) fail(ErrorCode::SingularSystem, "ridge system is rank deficient");

  // AP = QR  =>  (AᵀA)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd inverse = perm * inner * perm.transpose();
  return SymMatrixd(noise_var * inverse);
}

namespace {

double logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                          const Eigen::VectorXd& w) {
  const Eigen::VectorXd z = X * w;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - y(i) * z(i);
  return total + lambda * w.squaredNorm();
}

}  // namespace

LogisticFit ridge_logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                               int max_iterations) {
  check_design(X, y, lambda);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) fail(ErrorCode::InvalidInput, "logistic labels must be 0 or 1");
  }
  const Eigen::Index p = X.cols();
  const Eigen::MatrixXd penalty = 2.0 * lambda * Eigen::MatrixXd::Identity(p, p);

  LogisticFit fit;
  fit.mu = Eigen::VectorXd::Zero(p);
  double objective = logistic_objective(X, y, lambda, fit.mu);
  Eigen::MatrixXd hessian;

  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd z = X * fit.mu;
    Eigen::VectorXd prob(z.size());
    Eigen::VectorXd curvature(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      prob(i) = sigmoid(z(i));
      curvature(i) = prob(i) * (1.0 - prob(i));
    }
    const Eigen::VectorXd grad = X.transpose() * (prob - y) + 2.0 * lambda * fit.mu;
    hessian = X.transpose() * curvature.asDiagonal() * X + penalty;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
      fail(ErrorCode::SingularSystem, "logistic Hessian is singular");
    }
    const Eigen::VectorXd direction = ldlt.solve(grad);
    fit.iterations = it + 1;

    double step = 1.0;
    Eigen::VectorXd candidate = fit.mu - direction;
    double cand_obj = logistic_objective(X, y, lambda, candidate);
    while (cand_obj > objective && step > 1e-10) {
      step *= 0.5;
      candidate = fit.mu - step * direction;
      cand_obj = logistic_objective(X, y, lambda, candidate);
    }
    if (cand_obj > objective) break;
    fit.mu = candidate;
    objective = cand_obj;
    if ((step * direction).lpNorm<Eigen::Infinity>() < 1e-10) break;
  }

  // Curvature at the final point.
  const Eigen::VectorXd z = X * fit.mu;
  Eigen::VectorXd curvature(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = sigmoid(z(i));
    curvature(i) = s * (1.0 - s);
  }
  hessian = X.transpose() * curvature.asDiagonal() * X + penalty;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    fail(ErrorCode::SingularSystem, "logistic Hessian is singular");
  }
  fit.covariance = SymMatrixd(ldlt.solve(Eigen::MatrixXd::Identity(p, p)));
  fit.covariance = project_psd(fit.covariance);
  return fit;
}

LambdaSelection select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const SplitPlan& plan, const LambdaGrid& grid,
                              SelectionMetric metric) {
  if (X.rows() != y.size()) fail(ErrorCode::InvalidInput, "design rows and targets differ in length");
  const auto splits = make_splits(plan, X.rows());
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  LambdaSelection out;
  out.lambdas = grid.values();
  std::optional<std::size_t> best;

  for (const double lambda : grid.values()) {
    const std::size_t first_row = out.score_table.size();
    double sum = 0.0;
    int ok = 0;
    for (std::size_t k = 0; k < splits.size(); ++k) {
      const auto& s = splits[k];
      ScoreRow row{lambda, static_cast<Eigen::Index>(k), nan, nan, {}};
      try {
        const Eigen::MatrixXd Xt = X.middleRows(s.train.begin, s.train.size());
        const Eigen::VectorXd yt = y.segment(s.train.begin, s.train.size());
        const Eigen::MatrixXd Xv = X.middleRows(s.validation.begin, s.validation.size());
        const Eigen::VectorXd yv = y.segment(s.validation.begin, s.validation.size());
        if (metric == SelectionMetric::Rmse) {
          const auto fit = ridge_fit(Xt, yt, lambda);
          row.metric_value = std::sqrt((yv - Xv * fit.mu).squaredNorm() / yv.size());
        } else {
          const auto fit = ridge_logistic_fit(Xt, yt, lambda);
          const Eigen::VectorXd z = Xv * fit.mu;
          int correct = 0;
          for (Eigen::Index i = 0; i < z.size(); ++i) {
            const int label = sigmoid(z(i)) >= 0.5 ? 1 : 0;
            correct += (label == static_cast<int>(yv(i))) ? 1 : 0;
          }
          row.metric_value = static_cast<double>(correct) / static_cast<double>(z.size());
        }
        if (!std::isfinite(row.metric_value)) row.error = "non-finite metric";
      } catch (const Error& e) {
        row.error = e.what();
        row.metric_value = nan;
      }
      if (row.error.empty()) {
        sum += row.metric_value;
        ++ok;
      }
      out.score_table.push_back(std::move(row));
    }
    const double aggregate = ok > 0 ? sum / ok : nan;
    for (std::size_t r = first_row; r < out.score_table.size(); ++r) {
      out.score_table[r].aggregate = aggregate;
    }
    out.aggregates.push_back(aggregate);

    if (std::isfinite(aggregate)) {
      const std::size_t idx = out.aggregates.size() - 1;
      if (!best) {
        best = idx;
      } else if (metric == SelectionMetric::Rmse ? aggregate < out.aggregates[*best]
                                                 : aggregate > out.aggregates[*best]) {
        best = idx;
      }
    }
  }
  if (!best) fail(ErrorCode::NumericFailure, "no lambda candidate produced a valid fit");
  out.lambda_star = out.lambdas[*best];
  return out;
}

void write_score_table_csv(std::ostream& out, const LambdaSelection& selection) {
  out << "lambda,split_index,metric_value,aggregate\n";
  for (const auto& r : selection.score_table) {
    fmt::print(out, "{:.12g},{},{:.12g},{:.12g}\n", r.lambda, r.split_index, r.metric_value,
               r.aggregate);
  }
}

}  // namespace rsindy

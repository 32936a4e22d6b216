#include "rsindy/expert_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rsindy/error.hpp"

namespace rsindy {

ExpertPool make_expert_pool(std::vector<ExpertFn> experts, std::vector<std::string> labels,
                            Eigen::Index input_dim) {
  if (experts.empty()) fail(ErrorCode::InvalidInput, "expert pool must contain at least one expert");
  if (!labels.empty() && labels.size() != experts.size()) {
    fail(ErrorCode::InvalidInput, "expert pool: label count does not match expert count");
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < experts.size(); ++i) labels.push_back(fmt::format("E{}", i + 1));
  }
  return ExpertPool{std::move(experts), std::move(labels), input_dim};
}

EnsembleState EnsembleState::uniform(Eigen::Index n, double eta) {
  if (!(eta > 0)) fail(ErrorCode::InvalidInput, "ensemble learning rate must be > 0");
  EnsembleState s;
  s.weights = ProbVectord::uniform(n);
  s.eta = eta;
  s.cumulative_loss = Eigen::VectorXd::Zero(n);
  return s;
}

double clamped_squared_loss(double y, double prediction, double l_max) {
  const double e = y - prediction;
  return std::clamp(e * e, 0.0, l_max);
}

namespace {
void check_losses(const EnsembleState& state, const Eigen::VectorXd& losses) {
  if (losses.size() != state.size()) {
    fail(ErrorCode::InvalidInput, "loss vector length does not match the expert count");
  }
  if (!losses.allFinite()) fail(ErrorCode::InvalidInput, "non-finite expert loss");
}
}  // namespace

double expected_loss(const EnsembleState& state, const Eigen::VectorXd& losses) {
  check_losses(state, losses);
  return state.weights.weights().dot(losses);
}

EnsembleState update_weights(const EnsembleState& state, const Eigen::VectorXd& losses) {
  check_losses(state, losses);
  EnsembleState next = state;
  next.cumulative_weighted_loss += state.weights.weights().dot(losses);
  next.cumulative_loss += losses.cwiseMax(0.0);
  next.weights = project_simplex(state.weights.weights() - state.eta * losses);
  next.steps += 1;
  return next;
}

Eigen::VectorXd expert_predictions(const ExpertPool& pool, const Eigen::VectorXd& x) {
  if (pool.input_dim > 0 && x.size() != pool.input_dim) {
    fail(ErrorCode::InvalidInput, "expert input dimension mismatch");
  }
  Eigen::VectorXd out(pool.size());
  for (Eigen::Index i = 0; i < pool.size(); ++i) {
    double value = 0.0;
    try {
      value = pool.experts[static_cast<std::size_t>(i)](x);
    } catch (const std::exception& e) {
      fail(ErrorCode::ExpertError, fmt::format("expert {} failed: {}", i + 1, e.what()),
           static_cast<std::size_t>(i));
    }
    if (!std::isfinite(value)) {
      fail(ErrorCode::ExpertError, fmt::format("expert {} returned a non-finite value", i + 1),
           static_cast<std::size_t>(i));
    }
    out(i) = value;
  }
  return out;
}

double predict_weighted(const EnsembleState& state, const Eigen::VectorXd& predictions) {
  if (predictions.size() != state.size()) {
    fail(ErrorCode::InvalidInput, "prediction vector length does not match the expert count");
  }
  return state.weights.weights().dot(predictions);
}

double predict_weighted(const EnsembleState& state, const ExpertPool& pool,
                        const Eigen::VectorXd& x) {
  return predict_weighted(state, expert_predictions(pool, x));
}

Eigen::Index best_expert_index(const EnsembleState& state) {
  Eigen::Index best = 0;
  const auto& w = state.weights.weights();
  for (Eigen::Index i = 1; i < w.size(); ++i) {
    if (w(i) > w(best)) best = i;
  }
  return best;
}

BestExpert predict_best(const EnsembleState& state, const Eigen::VectorXd& predictions) {
  if (predictions.size() != state.size()) {
    fail(ErrorCode::InvalidInput, "prediction vector length does not match the expert count");
  }
  const Eigen::Index k = best_expert_index(state);
  return {predictions(k), k};
}

BestExpert predict_best(const EnsembleState& state, const ExpertPool& pool,
                        const Eigen::VectorXd& x) {
  const Eigen::Index k = best_expert_index(state);
  try {
    return {pool.experts[static_cast<std::size_t>(k)](x), k};
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::ExpertError, fmt::format("expert {} failed: {}", k + 1, e.what()),
         static_cast<std::size_t>(k));
  }
}

void EnsembleHistory::record(const Eigen::VectorXd& round_losses, const EnsembleState& after) {
  losses.push_back(round_losses);
  weights_after.push_back(after.weights.weights());
}

RegretCheck regret_check(const EnsembleHistory& history, double eta, const ProbVectord& g_star) {
  if (history.losses.size() != history.weights_after.size()) {
    fail(ErrorCode::InvalidInput, "regret_check: inconsistent history lengths");
  }
  const Eigen::Index n = history.initial.size();
  if (g_star.size() != n) fail(ErrorCode::InvalidInput, "regret_check: g* has the wrong size");

  RegretCheck out;
  Eigen::VectorXd before = history.initial.weights();
  for (std::size_t t = 0; t < history.rounds(); ++t) {
    const auto& l = history.losses[t];
    const auto& after = history.weights_after[t];
    if (l.size() != n || after.size() != n) {
      fail(ErrorCode::InvalidInput, "regret_check: inconsistent vector sizes");
    }
    const double c_star = l.dot(g_star.weights());
    out.lhs += 2.0 * eta * (l.dot(after) - c_star);
    out.played_lhs += 2.0 * eta * (l.dot(before) - c_star);
    before = after;
  }
  const double dist = (history.initial.weights() - g_star.weights()).norm();
  out.rhs = dist * dist;
  out.rhs_unsquared = dist;
  out.holds = out.lhs <= out.rhs + kRegretSlack;
  out.holds_unsquared = out.lhs <= out.rhs_unsquared + kRegretSlack;
  return out;
}

ProbVectord offline_optimum(const EnsembleHistory& history) {
  const Eigen::Index n = history.initial.size();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  for (const auto& l : history.losses) total += l;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (total(i) < total(best)) best = i;
  }
  return ProbVectord::vertex(n, best);
}

void append_trajectory(std::vector<WeightTrajectoryRow>& rows, const EnsembleState& state) {
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    rows.push_back({state.steps, i + 1, state.weights[i], state.cumulative_loss(i)});
  }
}

void write_weight_trajectory_csv(std::ostream& out, const std::vector<WeightTrajectoryRow>& rows) {
  out << "step,expert_index,weight,cumulative_loss\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{:.12g},{:.12g}\n", r.step, r.expert_index, r.weight, r.cumulative_loss);
  }
}

}  // namespace rsindy

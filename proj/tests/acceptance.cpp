// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "oracles.hpp"
#include "rsindy/datagen.hpp"
#include "rsindy/error.hpp"
#include "rsindy/evaluation.hpp"
#include "rsindy/expert_ensemble.hpp"
#include "rsindy/feature_library.hpp"
#include "rsindy/gaussian_regressor.hpp"
#include "rsindy/logistic_classifier.hpp"
#include "rsindy/pipeline.hpp"
#include "rsindy/report.hpp"

using namespace rsindy;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double column_mean(const RunArtifacts& a, const std::string& column) {
  return a.summary["replicates"]["columns"][column]["mean"].get<double>();
}

Outcome ac1_low_noise() {
  auto c = experiment_defaults(1);
  c.n = 10000;
  c.noise = 0.1;
  c.eta = 0.1;
  c.lambda = 0.0;
  c.init_mu.clear();
  c.replicates = 100;
  const auto start = std::chrono::steady_clock::now();
  const auto a = execute(c);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double slope = column_mean(a, "mu_X");
  const double r2 = column_mean(a, "R2");
  const bool ok = slope >= 1.99 && slope <= 2.01 && r2 >= 0.99 && seconds < 60.0;
  return {ok, fmt::format("mean slope {:.5f} in [1.99, 2.01], mean R2 {:.5f} >= 0.99, {:.2f} s < 60 s", slope,
                          r2, seconds)};
}

Outcome ac2_high_noise() {
  auto c = experiment_defaults(1);
  c.n = 10000;
  c.noise = 1.0;
  c.eta = 0.03;
  c.lambda = 0.0;
  c.replicates = 100;
  const auto a = execute(c);
  const double r2 = column_mean(a, "R2");
  const double sigma = column_mean(a, "sigma_hat");
  const bool ok = r2 >= 0.80 && r2 <= 0.87 && sigma >= 0.97 && sigma <= 1.08;
  return {ok, fmt::format("mean R2 {:.4f} in [0.80, 0.87], mean sigma_hat {:.4f} in [0.97, 1.08]", r2, sigma)};
}

Outcome ac3_experts() {
  const auto defaults = experiment_defaults(4);
  int dominant = 0;
  for (int r = 0; r < 100; ++r) {
    const std::uint64_t seed = r == 0 ? defaults.seed : replicate_seed(defaults.seed, static_cast<std::uint64_t>(r));
    const auto d = generate({4, 100, 0.5, seed});
    const auto run = run_expert_stream(d, simulation_expert_pool(), 0.1);
    const auto step = dominance_step(run.trajectory, 9, 0.95);
    if (step && *step <= 60) ++dominant;
  }
  return {dominant >= 90, fmt::format("expert 10 at weight >= 0.95 by step 60 in {}/100 runs (need >= 90)", dominant)};
}

Outcome ac4_metric_identities() {
  const auto m = regression_metrics(29.1597, 0.2716, 395, 5);
  std::vector<IntervalBounds> iv(305, IntervalBounds{0.0, 1.0});
  std::vector<double> y(305, 0.5);
  std::fill(y.begin(), y.begin() + 11, 2.0);
  const double cov = empirical_coverage(iv, y);
  const bool ok = std::abs(m.r2 - 0.9907) <= 1e-4 && std::abs(m.sigma_hat - 0.0264) <= 1e-4 &&
                  std::abs(m.rmse - 0.0262) <= 1e-4 && std::abs(cov - 0.9639) <= 1e-4;
  return {ok, fmt::format("R2 {:.5f}, sigma_hat {:.5f}, RMSE {:.5f}, coverage {:.5f}", m.r2, m.sigma_hat, m.rmse,
                          cov)};
}

Outcome ac5_dimensions() {
  const std::vector<Eigen::Index> expected{5, 11, 9, 9, 9, 15, 19, 23, 13};
  std::vector<Eigen::Index> got;
  for (const auto& d : expert_grid(4)) got.push_back(dimension(d));
  return {got == expected, fmt::format("p = ({})", fmt::join(got, ", "))};
}

Outcome ac6_gradients() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> dim(1, 5);
  int failures = 0;
  double worst = 0.0;
  auto record = [&](double a, double b) {
    const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++failures;
  };
  for (int k = 0; k < 100; ++k) {
    const int p = dim(rng);
    const VectorXd mu = oracle::random_vector(rng, p);
    const MatrixXd s = oracle::random_psd(rng, p);
    const VectorXd x = oracle::random_vector(rng, p);
    const double y = oracle::random_vector(rng, 1)(0);
    const int label = k % 2;
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    const auto gm = make_gaussian_model(mu, SymMatrixd(s), lambda, 0.1);
    const auto gg = gradients(gm, x, y);
    auto gauss = [&](const VectorXd& m, const MatrixXd& S) {
      const double r = y - x.dot(m);
      return r * r + x.dot(S * x) + lambda * (S.trace() + m.squaredNorm());
    };
    const VectorXd fd_mu = oracle::central_gradient([&](const VectorXd& v) { return gauss(v, s); }, mu);
    const MatrixXd fd_s = oracle::central_gradient_symmetric([&](const MatrixXd& S) { return gauss(mu, S); }, s);

    const auto lm = make_logistic_model(mu, SymMatrixd(s), lambda, 0.1);
    const auto lg = gradients(lm, x, label);
    auto logistic = [&](const VectorXd& m, const MatrixXd& S) {
      const double z = x.dot(m);
      return std::log1p(std::exp(z)) - label * z + lambda * (S.trace() + m.squaredNorm());
    };
    const VectorXd fl_mu = oracle::central_gradient([&](const VectorXd& v) { return logistic(v, s); }, mu);
    const MatrixXd fl_s = oracle::central_gradient_symmetric([&](const MatrixXd& S) { return logistic(mu, S); }, s);

    // Cross-check the library's loss against the independent closed form.
    record(expected_loss(gm, x, y), gauss(mu, s));
    record(surrogate_loss(lm, x, label), logistic(mu, s));
    for (int i = 0; i < p; ++i) {
      record(gg.grad_mu(i), fd_mu(i));
      record(lg.grad_mu(i), fl_mu(i));
      for (int j = 0; j < p; ++j) {
        record(gg.grad_sigma(i, j), fd_s(i, j));
        record(lg.grad_sigma(i, j), fl_s(i, j));
      }
    }
  }
  return {failures == 0, fmt::format("{} mismatches over 100 instances, worst relative error {:.2e}", failures, worst)};
}

Outcome ac7_monte_carlo() {
  std::mt19937_64 rng(7777);
  std::uniform_int_distribution<int> dim(1, 5);
  int outside = 0;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int p = dim(rng);
    const VectorXd mu = oracle::random_vector(rng, p);
    const MatrixXd s = oracle::random_psd(rng, p);
    const VectorXd x = oracle::random_vector(rng, p);
    const double y = oracle::random_vector(rng, 1, 2.0)(0);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto m = make_gaussian_model(mu, SymMatrixd(s), lambda, 0.1);
    const auto mc = oracle::mc_gaussian_loss(mu, s, lambda, x, y, 100000, rng);
    const double z = std::abs(expected_loss(m, x, y) - mc.mean) / mc.standard_error;
    worst = std::max(worst, z);
    if (z > 3.0) ++outside;
  }
  return {outside == 0, fmt::format("{} of 50 instances beyond 3 SE, largest |z| {:.2f}", outside, worst)};
}

Outcome ac8_projections() {
  std::mt19937_64 rng(8888);
  int psd_failures = 0;
  double min_eig = 0.0;
  double idem = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const SymMatrixd a(oracle::random_symmetric(rng, 4, 2.0));
    const auto p = project_psd(a);
    const double e = eigh_symmetric(p).values.minCoeff();
    const double d = (project_psd(p).matrix() - p.matrix()).lpNorm<Eigen::Infinity>();
    min_eig = std::min(min_eig, e);
    idem = std::max(idem, d);
    if (e < -1e-10 || d > 1e-9) ++psd_failures;
  }
  int simplex_failures = 0;
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int k = 0; k < 1000; ++k) {
      const VectorXd z = oracle::random_vector(rng, n, 1.5);
      const VectorXd w = project_simplex(z).weights();
      const double kkt = (w - oracle::simplex_projection_kkt(z)).lpNorm<Eigen::Infinity>();
      // The grid optimum can never beat the exact projection.
      const double grid_gap = (w - z).norm() - oracle::simplex_grid_min_distance(z, 200);
      worst = std::max(worst, kkt);
      if (kkt > 1e-9 || grid_gap > 1e-9) ++simplex_failures;
    }
  }
  return {psd_failures == 0 && simplex_failures == 0,
          fmt::format("psd: {} failures, min eigenvalue {:.2e}, idempotence gap {:.2e}; simplex: {} failures, "
                      "max deviation from oracle {:.2e}",
                      psd_failures, min_eig, idem, simplex_failures, worst)};
}

Outcome ac9_regret() {
  std::mt19937_64 rng(9999);
  std::uniform_int_distribution<int> experts(2, 10);
  std::uniform_int_distribution<int> rounds(1, 200);
  int violations = 0;
  double tightest = -1e300;
  for (int k = 0; k < 100; ++k) {
    const int n = experts(rng);
    const int T = rounds(rng);
    const double eta = k % 2 == 0 ? 0.01 : 0.1;
    std::uniform_real_distribution<double> scale(0.0, 10.0);
    auto state = EnsembleState::uniform(n, eta);
    EnsembleHistory h;
    h.initial = state.weights;
    for (int t = 0; t < T; ++t) {
      // Clamped squared errors of random expert predictions.
      const double y = scale(rng) - 5.0;
      VectorXd l(n);
      for (int i = 0; i < n; ++i) l(i) = clamped_squared_loss(y, y + (scale(rng) - 5.0) * (0.2 + 0.1 * i));
      state = update_weights(state, l);
      h.record(l, state);
    }
    const auto g_star = ProbVectord(oracle::best_fixed_weights(h.losses, n));
    const auto check = regret_check(h, eta, g_star);
    tightest = std::max(tightest, check.lhs - check.rhs);
    if (!check.holds) ++violations;
  }
  return {violations == 0,
          fmt::format("{} violations over 100 streams, max(lhs - rhs) = {:.3e}", violations, tightest)};
}

Outcome ac10_logistic() {
  auto c = experiment_defaults(3);
  c.replicates = 20;
  const auto a = execute(c);
  const double auc = column_mean(a, "auc");
  const double acc = column_mean(a, "accuracy");
  return {auc >= 0.85 && acc >= 0.78,
          fmt::format("mean AUC {:.4f} >= 0.85, mean accuracy at the Youden threshold {:.4f} >= 0.78", auc, acc)};
}

Outcome ac11_drift() {
  int detected = 0;
  std::vector<double> false_rates;
  for (int r = 0; r < 100; ++r) {
    LevelShiftConfig g;
    g.seed = replicate_seed(11, static_cast<std::uint64_t>(r));
    const auto d = generate_level_shift(g);
    RegressionOptions o;
    o.dictionary.base_dim = 2;
    o.warmup = 100;
    o.eta = 1e-3;
    o.lambda = 0.0;
    o.chart_basis = ChartBasis::WarmupOnly;
    const auto run = run_regression_stream(d, o);
    int false_alarms = 0;
    bool hit = false;
    for (const auto& s : run.steps) {
      if (s.warmup || !s.flagged) continue;
      if (s.step < g.shift_step) ++false_alarms;
      if (s.step >= g.shift_step && s.step < g.shift_step + 5) hit = true;
    }
    if (hit) ++detected;
    false_rates.push_back(static_cast<double>(false_alarms) / static_cast<double>(g.shift_step - 1 - o.warmup));
  }
  std::sort(false_rates.begin(), false_rates.end());
  // Type-7 quantile.
  const double h = 0.99 * static_cast<double>(false_rates.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double p99 = false_rates[lo] + (h - static_cast<double>(lo)) * (false_rates[lo + 1] - false_rates[lo]);
  const double mean = std::accumulate(false_rates.begin(), false_rates.end(), 0.0) / 100.0;
  return {detected >= 95 && p99 <= 0.01,
          fmt::format("detected within 5 steps in {}/100 runs (need >= 95); pre-shift false-alarm rate "
                      "p99 {:.4f} <= 0.01 (mean {:.4f})",
                      detected, p99, mean)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1_low_noise},    {"AC2", ac2_high_noise},    {"AC3", ac3_experts},     {"AC4", ac4_metric_identities},
      {"AC5", ac5_dimensions},   {"AC6", ac6_gradients},     {"AC7", ac7_monte_carlo}, {"AC8", ac8_projections},
      {"AC9", ac9_regret},       {"AC10", ac10_logistic},    {"AC11", ac11_drift}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("{} {} {}\n", name, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rsindy/error.hpp"
#include "rsindy/expert_ensemble.hpp"

using namespace rsindy;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("weight update worked examples") {
  auto s = EnsembleState::uniform(2, 0.1);
  s = update_weights(s, vec({1.0, 0.0}));
  CHECK(s.weights[0] == doctest::Approx(0.45));
  CHECK(s.weights[1] == doctest::Approx(0.55));
  CHECK(s.cumulative_weighted_loss == doctest::Approx(0.5));
  CHECK(s.cumulative_loss(0) == 1.0);
  CHECK(s.steps == 1);

  auto big = EnsembleState::uniform(3, 10.0);
  big = update_weights(big, vec({1.0, 0.0, 1.0}));
  CHECK(big.weights[1] == doctest::Approx(1.0));

  auto zero = EnsembleState::uniform(3, 0.5);
  zero = update_weights(zero, VectorXd::Zero(3));
  CHECK(zero.weights[2] == doctest::Approx(1.0 / 3));

  CHECK_THROWS_AS(EnsembleState::uniform(2, 0.0), Error);
  CHECK_THROWS_AS(update_weights(s, vec({1.0})), Error);
}

TEST_CASE("clamped loss") {
  CHECK(clamped_squared_loss(1.0, 0.0) == 1.0);
  CHECK(clamped_squared_loss(10.0, 0.0) == 10.0);
  CHECK(clamped_squared_loss(0.0, 5.0, 4.0) == 4.0);
}

TEST_CASE("predictions and tie-breaking") {
  auto s = EnsembleState::uniform(3, 0.1);
  const VectorXd p = vec({1.0, 2.0, 6.0});
  CHECK(predict_weighted(s, p) == doctest::Approx(3.0));
  const auto b = predict_best(s, p);
  CHECK(b.index == 0);
  CHECK(b.prediction == 1.0);
  s = update_weights(s, vec({1.0, 0.0, 0.0}));
  CHECK(predict_best(s, p).index == 1);
}

TEST_CASE("expert failures carry the expert index") {
  std::vector<ExpertFn> fns{[](const VectorXd& x) { return x(0); },
                            [](const VectorXd&) -> double { throw std::runtime_error("boom"); },
                            [](const VectorXd&) { return std::nan(""); }};
  const auto pool = make_expert_pool(fns, {}, 1);
  CHECK(pool.labels[2] == "E3");
  try {
    expert_predictions(pool, vec({1.0}));
    FAIL("expected ExpertError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExpertError);
    CHECK(*e.detail() == 1);
  }
  const auto nan_pool = make_expert_pool({fns[0], fns[2]}, {"a", "b"}, 1);
  try {
    expert_predictions(nan_pool, vec({1.0}));
    FAIL("expected ExpertError");
  } catch (const Error& e) {
    CHECK(*e.detail() == 1);
  }
  CHECK_THROWS_AS(make_expert_pool({}, {}, 1), Error);
  CHECK_THROWS_AS(expert_predictions(pool, vec({1.0, 2.0})), Error);
}

TEST_CASE("regret bound holds against the brute-force best fixed weights") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2;
    const double eta = trial % 4 < 2 ? 0.01 : 0.1;
    auto s = EnsembleState::uniform(n, eta);
    EnsembleHistory h;
    h.initial = s.weights;
    for (int t = 0; t < 150; ++t) {
      VectorXd l(n);
      for (int i = 0; i < n; ++i) l(i) = U(rng) * (1.0 + i);
      s = update_weights(s, l);
      h.record(l, s);
    }
    const VectorXd g = oracle::best_fixed_weights(h.losses, n);
    const auto check = regret_check(h, eta, ProbVectord(g));
    CHECK(check.holds);
    const auto opt = offline_optimum(h);
    CHECK(regret_check(h, eta, opt).holds);
    VectorXd total = VectorXd::Zero(n);
    for (const auto& l : h.losses) total += l;
    CHECK(total.dot(opt.weights()) <= total.dot(g) + 1e-12);
  }
}

TEST_CASE("weight trajectory CSV") {
  auto s = EnsembleState::uniform(2, 0.1);
  std::vector<WeightTrajectoryRow> rows;
  append_trajectory(rows, s);
  s = update_weights(s, vec({1.0, 0.0}));
  append_trajectory(rows, s);
  std::ostringstream out;
  write_weight_trajectory_csv(out, rows);
  CHECK(out.str() ==
        "step,expert_index,weight,cumulative_loss\n"
        "0,1,0.5,0\n0,2,0.5,0\n1,1,0.45,1\n1,2,0.55,0\n");
}

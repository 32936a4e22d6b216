#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "rsindy/error.hpp"
#include "rsindy/evaluation.hpp"

using namespace rsindy;

TEST_CASE("regression metrics from summary sums") {
  const auto m = regression_metrics(29.1597, 0.2716, 395, 5);
  CHECK(m.r2 == doctest::Approx(0.9907).epsilon(5e-5));
  CHECK(m.sigma_hat == doctest::Approx(0.0264).epsilon(2e-3));
  CHECK(m.rmse == doctest::Approx(0.0262).epsilon(2e-3));
  CHECK_THROWS_AS(regression_metrics(1.0, 1.0, 5, 5), Error);
  CHECK_THROWS_AS(regression_metrics(0.0, 1.0, 10, 2), Error);
}

TEST_CASE("streaming tally agrees with the batch computation") {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> N(1e6, 1.0);  // large offset stresses cancellation
  RegressionTally t(3);
  std::vector<double> ys;
  double sse = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double y = N(rng);
    const double yhat = y + 0.01 * (i % 7 - 3);
    t.add(y, yhat);
    ys.push_back(y);
    sse += (y - yhat) * (y - yhat);
  }
  const auto tp = oracle::two_pass(ys);
  const double sst = tp.variance * (ys.size() - 1);
  CHECK(t.sst() == doctest::Approx(sst).epsilon(1e-10));
  CHECK(t.sse() == doctest::Approx(sse).epsilon(1e-10));
  const auto m = regression_metrics(t);
  CHECK(m.r2 == doctest::Approx(1.0 - sse / sst).epsilon(1e-10));
  CHECK(m.rmse * m.rmse * m.n == doctest::Approx(sse).epsilon(1e-10));
  CHECK(t.residuals().size() == 2000);
}

TEST_CASE("classification metrics") {
  ConfusionTally c;
  c.add(1, 1);
  c.add(1, 0);
  c.add(0, 0);
  c.add(0, 0);
  const auto m = classification_metrics(c);
  CHECK(m.accuracy == doctest::Approx(0.75));
  CHECK(*m.tpr == doctest::Approx(0.5));
  CHECK(*m.tnr == 1.0);
  CHECK(*m.precision == 1.0);
  ConfusionTally negatives;
  negatives.add(0, 0);
  CHECK_FALSE(classification_metrics(negatives).tpr.has_value());
  CHECK_FALSE(classification_metrics(negatives).precision.has_value());
}

TEST_CASE("AUC agrees with pairwise counting, ties included") {
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> score(0, 9);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<int> l;
    for (int i = 0; i < 60; ++i) {
      s.push_back(0.1 * score(rng));
      l.push_back(coin(rng) ? 1 : 0);
    }
    l[0] = 1;
    l[1] = 0;
    const auto r = roc_auc(s, l);
    CHECK(r.auc == doctest::Approx(oracle::pairwise_auc(s, l)).epsilon(1e-12));
    std::vector<int> flipped(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) flipped[i] = 1 - l[i];
    CHECK(roc_auc(s, flipped).auc == doctest::Approx(1.0 - r.auc).epsilon(1e-12));
    CHECK(std::isinf(r.curve.front().threshold));
    CHECK(r.curve.back().fpr == 1.0);
    CHECK(r.curve.back().tpr == 1.0);
  }
}

TEST_CASE("Youden threshold on a separable sample") {
  const auto r = roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1});
  CHECK(r.auc == 1.0);
  CHECK(r.optimal_threshold == 0.8);
  CHECK(r.youden_j == 1.0);
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), Error);
}

TEST_CASE("log loss") {
  CHECK(total_log_loss({0.5, 0.5}, {1, 0}) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(std::isfinite(total_log_loss({0.0}, {1})));
}

TEST_CASE("I-chart limits and Nelson rule 1") {
  const auto c = ichart_fit({1.0, 3.0, 2.0, 4.0});
  CHECK(c.center == doctest::Approx(2.5));
  const double mr = (2.0 + 1.0 + 2.0) / 3.0;
  CHECK(c.upper == doctest::Approx(2.5 + 2.66 * mr));
  CHECK(c.lower == doctest::Approx(2.5 - 2.66 * mr));
  CHECK(c.basis_n == 4);
  CHECK_FALSE(nelson_rule1(c, c.upper));
  CHECK(nelson_rule1(c, c.upper + 1e-9));
  CHECK(nelson_rule1(c, c.lower - 1e-9));
  CHECK_THROWS_AS(ichart_fit({1.0}), Error);

  IChartAccumulator acc;
  for (double r : {1.0, 3.0, 2.0, 4.0}) acc.add(r);
  CHECK(acc.chart().upper == doctest::Approx(c.upper));
}

TEST_CASE("a flag is exactly a residual outside the limits") {
  std::mt19937_64 rng(89);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> basis;
  for (int i = 0; i < 100; ++i) basis.push_back(N(rng));
  const auto c = ichart_fit(basis);
  for (int i = 0; i < 1000; ++i) {
    const double r = 3.0 * N(rng);
    CHECK(nelson_rule1(c, r) == !(c.lower <= r && r <= c.upper));
  }
}

TEST_CASE("DDM statistics and status") {
  SUBCASE("error rate is the running proportion") {
    DdmTrace t;
    const std::vector<int> errs{1, 0, 0, 1, 0};
    for (int e : errs) t = ddm_update(t, e).trace;
    CHECK(t.p == doctest::Approx(0.4));
    CHECK(t.s == doctest::Approx(std::sqrt(0.4 * 0.6 / 5)));
  }
  SUBCASE("a perfect stream stays stable") {
    DdmTrace t;
    for (int i = 0; i < 500; ++i) {
      const auto s = ddm_update(t, 0);
      CHECK(s.status == DriftStatus::Stable);
      t = s.trace;
    }
  }
  SUBCASE("nothing is signalled before min_instances") {
    DdmTrace t;
    for (int i = 0; i < 29; ++i) {
      const auto s = ddm_update(t, i < 5 ? 0 : 1);
      CHECK(s.status == DriftStatus::Stable);
      t = s.trace;
    }
  }
  SUBCASE("an error-rate jump from 0.1 to 0.5 is detected quickly") {
    std::mt19937_64 rng(97);
    std::bernoulli_distribution before(0.1);
    std::bernoulli_distribution after(0.5);
    DdmTrace t;
    long long fired = -1;
    for (int i = 0; i < 1200 && fired < 0; ++i) {
      const int e = (i < 1000 ? before(rng) : after(rng)) ? 1 : 0;
      const auto s = ddm_update(t, e);
      t = s.trace;
      if (s.status == DriftStatus::Drift) fired = i;
    }
    CHECK(fired >= 1000);
    CHECK(fired < 1200);
  }
  CHECK_THROWS_AS(ddm_update(DdmTrace{}, 2), Error);
}

TEST_CASE("empirical coverage") {
  std::vector<IntervalBounds> iv(305, IntervalBounds{0.0, 1.0});
  std::vector<double> y(305, 0.5);
  for (int i = 0; i < 11; ++i) y[static_cast<std::size_t>(i)] = 2.0;
  CHECK(empirical_coverage(iv, y) == doctest::Approx(294.0 / 305.0));
  CHECK(empirical_coverage(iv, y) == doctest::Approx(0.9639).epsilon(1e-4));
  CHECK(empirical_coverage({{0.0, 1.0}}, {1.0}) == 1.0);
  CHECK_THROWS_AS(empirical_coverage({}, {}), Error);
}

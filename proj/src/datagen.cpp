#include "rsindy/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "rsindy/error.hpp"
#include "rsindy/logistic_classifier.hpp"

namespace rsindy {

namespace {

using Engine = boost::random::mt19937_64;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double sd = 1.0) {
    return boost::random::normal_distribution<double>(0.0, sd)(engine_);
  }
  int bernoulli(double p) { return boost::random::bernoulli_distribution<double>(p)(engine_) ? 1 : 0; }

 private:
  Engine engine_;
};

std::vector<std::string> numbered(const char* prefix, int k) {
  std::vector<std::string> out;
  for (int i = 1; i <= k; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

double default_noise(int experiment) {
  switch (experiment) {
    case 1: return 0.1;
    case 2: return 1.0;
    case 3: return 0.0;
    case 4: return 0.5;
    default: fail(ErrorCode::InvalidConfig, "unknown experiment id " + std::to_string(experiment));
  }
}

Dataset generate(const GeneratorConfig& config) {
  if (config.n < 1) fail(ErrorCode::InvalidConfig, "generator length must be >= 1");
  if (!(config.noise >= 0.0)) fail(ErrorCode::InvalidConfig, "generator noise must be >= 0");
  Draw draw(config.seed);
  Dataset out;
  out.observations.reserve(static_cast<std::size_t>(config.n));

  switch (config.experiment) {
    case 1:
      out.feature_names = {"X"};
      for (long long t = 1; t <= config.n; ++t) {
        const double x = draw.uniform(-2.0, 2.0);
        const double e = draw.normal();
        out.observations.push_back({t, Eigen::VectorXd::Constant(1, x), 2.0 * x + config.noise * e});
      }
      break;
    case 2:
      out.feature_names = numbered("X", 3);
      for (long long t = 1; t <= config.n; ++t) {
        const double x1 = draw.normal();
        const double x2 = x1 + draw.normal(0.01);
        const double x3 = 2.0 * x1 + 3.0 * x2 + draw.normal(0.01);
        const double y = -1.0 + 2.0 * x1 - 2.0 * x2 + 1.5 * x3 + config.noise * draw.normal();
        Eigen::VectorXd x(3);
        x << x1, x2, x3;
        out.observations.push_back({t, x, y});
      }
      break;
    case 3:
      out.feature_names = numbered("X", 2);
      for (long long t = 1; t <= config.n; ++t) {
        Eigen::VectorXd x(2);
        x << draw.normal(), draw.normal();
        const double p = sigmoid(1.0 + 2.0 * x(0) + 3.0 * x(1));
        out.observations.push_back({t, x, static_cast<double>(draw.bernoulli(p))});
      }
      break;
    case 4:
      out.feature_names = numbered("X", 4);
      for (long long t = 1; t <= config.n; ++t) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = draw.uniform(0.0, 1.0);
        const double y = 1.0 + 1.1 * x(0) + 1.2 * x(1) + 1.3 * x(2) + 1.4 * x(3) +
                         config.noise * draw.normal();
        out.observations.push_back({t, x, y});
      }
      break;
    default:
      fail(ErrorCode::InvalidConfig, "unknown experiment id " + std::to_string(config.experiment));
  }
  return out;
}

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t replicate) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (replicate + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Dataset generate_level_shift(const LevelShiftConfig& config) {
  if (config.n < 1) fail(ErrorCode::InvalidConfig, "generator length must be >= 1");
  Draw draw(config.seed);
  Dataset out;
  out.feature_names = numbered("X", 2);
  for (long long t = 1; t <= config.n; ++t) {
    Eigen::VectorXd x(2);
    x << draw.normal(), draw.normal();
    double y = 1.0 + 2.0 * x(0) - x(1) + config.noise * draw.normal();
    if (t >= config.shift_step) y += config.shift_sigmas * config.noise;
    out.observations.push_back({t, x, y});
  }
  return out;
}

Dataset generate_unemployment_standin(long long n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::InvalidConfig, "stand-in length must be >= 2");
  Draw draw(seed);
  Dataset out;
  out.feature_names = {"UNEMP_LAG1", "IC", "CPI", "IPI"};

  const double base = std::log(5.5 / 94.5);
  const long long shock_at = std::max<long long>(2, n - 62);
  double u = base;
  double ic = 0.0;
  double previous_rate = 100.0 * sigmoid(u);
  for (long long t = 1; t <= n; ++t) {
    ic = 0.6 * ic + draw.normal(0.8);
    const double cpi = draw.normal(1.0);
    const double ipi = 0.5 * draw.normal(1.0) - 0.3 * ic;
    u = base + 0.97 * (u - base) + 0.04 * ic - 0.015 * ipi + 0.01 * cpi + 0.025 * draw.normal();
    if (t == shock_at) u += 0.9;
    const double rate = 100.0 * sigmoid(u);
    Eigen::VectorXd x(4);
    x << previous_rate, ic, cpi, ipi;
    out.observations.push_back({t, x, rate});
    previous_rate = rate;
  }
  return out;
}

Dataset generate_elec2_standin(long long n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidConfig, "stand-in length must be >= 1");
  Draw draw(seed);
  Dataset out;
  out.feature_names = {"day", "period", "nswdemand", "vicdemand", "transfer"};
  for (long long t = 1; t <= n; ++t) {
    const long long slot = t - 1;
    const double day = static_cast<double>((slot / 48) % 7) / 6.0;
    const double period = static_cast<double>(slot % 48) / 47.0;
    const double nsw =
        std::clamp(0.45 + 0.2 * std::sin(2.0 * std::numbers::pi * period) + draw.normal(0.1), 0.0, 1.0);
    const double vic = std::clamp(0.4 + 0.5 * (nsw - 0.45) + draw.normal(0.1), 0.0, 1.0);
    const double transfer = draw.uniform(0.0, 1.0);
    const double z = -2.0 + 5.0 * nsw - 1.5 * vic + 0.8 * transfer + 0.6 * period - 0.3 * day;
    Eigen::VectorXd x(5);
    x << day, period, nsw, vic, transfer;
    out.observations.push_back({t, x, static_cast<double>(draw.bernoulli(sigmoid(z)))});
  }
  return out;
}

}  // namespace rsindy

#pragma once

// Seeded synthetic streams. All generators draw from a 64-bit Mersenne
// Twister through Boost.Random distributions, which produce identical
// streams on every platform for a given seed.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsindy {

struct Observation {
  long long step = 0;  // 1-based position in the stream
  Eigen::VectorXd x;   // raw features
  double y = 0.0;      // target, or 0/1 label
};

/// A stream with named feature columns.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Observation> observations;
};

struct GeneratorConfig {
  int experiment = 1;  // 1..4
  long long n = 100;
  double noise = 0.1;  // standard deviation of the additive error
  std::uint64_t seed = 1;
};

/// Noise level used when none is given: 0.1, 1, 0 (unused), 0.5.
double default_noise(int experiment);

/// Simulation studies:
///  1: x ~ U(-2,2), y = 2x + noise·N(0,1)
///  2: X1 ~ N(0,1), X2 = X1 + δ2, X3 = 2X1 + 3X2 + δ3 (δ ~ N(0, 0.01²)),
///     y = -1 + 2X1 - 2X2 + 1.5X3 + noise·N(0,1)
///  3: X1, X2 ~ N(0,1), y ~ Bernoulli(sigmoid(1 + 2X1 + 3X2))
///  4: Xi ~ U(0,1), y = 1 + 1.1X1 + 1.2X2 + 1.3X3 + 1.4X4 + noise·N(0,1)
Dataset generate(const GeneratorConfig& config);

/// Decorrelated per-replicate seed (SplitMix64 of base and index).
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t replicate);

/// Regression stream y = 1 + 2X1 - X2 + noise·N(0,1), X ~ N(0,1), whose level
/// jumps by shift_sigmas·noise from `shift_step` (1-based) onwards.
struct LevelShiftConfig {
  long long n = 600;
  long long shift_step = 400;
  double noise = 1.0;
  double shift_sigmas = 6.0;
  std::uint64_t seed = 1;
};

Dataset generate_level_shift(const LevelShiftConfig& config);

/// Monthly unemployment-style stand-in with the columns UNEMP (percent, the
/// target), UNEMP_LAG1, IC, CPI, IPI and a shock near the end.
Dataset generate_unemployment_standin(long long n, std::uint64_t seed);

/// Electricity-market-style binary stand-in with the columns day, period,
/// nswdemand, vicdemand, transfer and a 0/1 class.
Dataset generate_elec2_standin(long long n, std::uint64_t seed);

}  // namespace rsindy

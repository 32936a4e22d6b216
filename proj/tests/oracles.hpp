#pragma once

// Independent reference computations used only by the tests. None of these
// share code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Euclidean projection onto the simplex by enumerating every support set and
/// keeping the KKT-feasible candidate closest to z.
inline VectorXd simplex_projection_kkt(const VectorXd& z) {
  const int n = static_cast<int>(z.size());
  VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        sum += z(i);
        ++count;
      }
    }
    const double tau = (sum - 1.0) / count;
    VectorXd w = VectorXd::Zero(n);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (mask & (1 << i)) {
        w(i) = z(i) - tau;
        ok = w(i) >= -1e-15;
      } else {
        ok = z(i) - tau <= 1e-15;
      }
    }
    if (!ok) continue;
    const double d = (w - z).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = w.cwiseMax(0.0);
    }
  }
  return best;
}

/// Brute-force minimum of ‖w - z‖ over a uniform grid of the simplex (n = 2 or 3).
inline double simplex_grid_min_distance(const VectorXd& z, int resolution) {
  double best = std::numeric_limits<double>::infinity();
  if (z.size() == 2) {
    for (int i = 0; i <= resolution; ++i) {
      const double a = static_cast<double>(i) / resolution;
      best = std::min(best, std::hypot(z(0) - a, z(1) - (1.0 - a)));
    }
  } else {
    for (int i = 0; i <= resolution; ++i) {
      for (int j = 0; i + j <= resolution; ++j) {
        const double a = static_cast<double>(i) / resolution;
        const double b = static_cast<double>(j) / resolution;
        VectorXd w(3);
        w << a, b, 1.0 - a - b;
        best = std::min(best, (w - z).norm());
      }
    }
  }
  return best;
}

inline MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = N(rng);
  return 0.5 * (a + a.transpose());
}

inline MatrixXd random_psd(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = N(rng);
  return a * a.transpose() / n;
}

inline VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

struct McEstimate {
  double mean;
  double standard_error;
};

/// Monte-Carlo estimate of E[(y - xᵀW)² + lambda WᵀW] with W ~ N(mu, Sigma),
/// using a symmetric square root of Sigma.
inline McEstimate mc_gaussian_loss(const VectorXd& mu, const MatrixXd& sigma, double lambda,
                                   const VectorXd& x, double y, int draws, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma);
  const MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  std::normal_distribution<double> N(0.0, 1.0);
  double sum = 0.0;
  double sum2 = 0.0;
  VectorXd e(mu.size());
  for (int k = 0; k < draws; ++k) {
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = N(rng);
    const VectorXd w = mu + root * e;
    const double r = y - x.dot(w);
    const double v = r * r + lambda * w.squaredNorm();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws;
  const double var = (sum2 - draws * mean * mean) / (draws - 1);
  return {mean, std::sqrt(var / draws)};
}

/// Central difference of f along every coordinate of v.
inline VectorXd central_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& v,
                                 double h = 1e-5) {
  VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    VectorXd a = v;
    VectorXd b = v;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central difference of f along the symmetric direction (E_ij + E_ji)/2.
inline MatrixXd central_gradient_symmetric(const std::function<double(const MatrixXd&)>& f, const MatrixXd& m,
                                           double h = 1e-5) {
  const Eigen::Index n = m.rows();
  MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      MatrixXd d = MatrixXd::Zero(n, n);
      d(i, j) += 0.5;
      d(j, i) += 0.5;
      g(i, j) = g(j, i) = (f(m + h * d) - f(m - h * d)) / (2.0 * h);
    }
  }
  return g;
}

/// Relative agreement with a floor of one on the denominator.
inline bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

struct TwoPass {
  double mean;
  double variance;  // sample (n - 1)
};

inline TwoPass two_pass(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0};
}

/// AUC by counting concordant (positive, negative) pairs, ties counting one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Ridge solution from the normal equations in long double.
inline VectorXd ridge_normal_equations(const MatrixXd& X, const VectorXd& y, double lambda) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const MatL Xl = X.cast<long double>();
  MatL A = Xl.transpose() * Xl;
  A += static_cast<long double>(lambda) * MatL::Identity(X.cols(), X.cols());
  const VecL b = Xl.transpose() * y.cast<long double>();
  const VecL mu = A.fullPivLu().solve(b);
  return mu.cast<double>();
}

/// Best fixed point of the simplex for summed linear costs: the cheaper of the
/// best vertex and the best point of a coarse grid (n <= 3), or the vertex otherwise.
inline VectorXd best_fixed_weights(const std::vector<VectorXd>& losses, int n) {
  VectorXd total = VectorXd::Zero(n);
  for (const auto& l : losses) total += l;
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (total(i) < total(k)) k = i;
  }
  VectorXd best = VectorXd::Zero(n);
  best(k) = 1.0;
  if (n == 2 || n == 3) {
    const int res = 50;
    for (int i = 0; i <= res; ++i) {
      for (int j = 0; j <= (n == 3 ? res - i : 0); ++j) {
        VectorXd w(n);
        if (n == 2) {
          w << static_cast<double>(i) / res, 1.0 - static_cast<double>(i) / res;
        } else {
          w << static_cast<double>(i) / res, static_cast<double>(j) / res,
              1.0 - static_cast<double>(i + j) / res;
        }
        if (total.dot(w) < total.dot(best)) best = w;
      }
    }
  }
  return best;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle

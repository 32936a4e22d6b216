#pragma once

// Online linear regression with Gaussian-distributed weights W ~ N(mu, Sigma).
//
// Per observation (x, y) the learner minimizes
//   f1(mu, Sigma) = E(y - xᵀW)² + lambda E WᵀW
//                 = y² - 2y xᵀmu + xᵀSigma x + (xᵀmu)² + lambda (tr Sigma + muᵀmu)
// by a gradient step on f1 followed by projection of Sigma onto the p.s.d. cone.

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "rsindy/geometry.hpp"

namespace rsindy {

inline constexpr double kPsdTolerance = 1e-10;

template <typename Scalar>
struct GaussianModel {
  Vector<Scalar> mu;
  SymMatrix<Scalar> sigma;
  Scalar lambda = 0;
  Scalar eta = Scalar(0.1);
  Scalar noise_var = 0;  // residual variance estimate, maintained by the evaluator

  Eigen::Index dim() const { return mu.size(); }
};

template <typename Scalar>
void validate(const GaussianModel<Scalar>& m) {
  if (m.sigma.dim() != m.mu.size()) {
    fail(ErrorCode::InvalidInput, "GaussianModel: mu and sigma dimensions differ");
  }
  if (!all_finite(m.mu) || !all_finite(m.sigma.matrix())) {
    fail(ErrorCode::InvalidInput, "GaussianModel: non-finite parameters");
  }
  if (!(m.lambda >= 0)) fail(ErrorCode::InvalidInput, "GaussianModel: lambda must be >= 0");
  if (!(m.eta > 0)) fail(ErrorCode::InvalidInput, "GaussianModel: eta must be > 0");
  if (!(m.noise_var >= 0)) fail(ErrorCode::InvalidInput, "GaussianModel: noise_var must be >= 0");
  if (m.dim() > 0 && eigh_symmetric(m.sigma).values.minCoeff() < -Scalar(kPsdTolerance)) {
    fail(ErrorCode::InvalidInput, "GaussianModel: sigma is not positive semi-definite");
  }
}

template <typename Scalar>
GaussianModel<Scalar> make_gaussian_model(Vector<Scalar> mu, SymMatrix<Scalar> sigma,
                                          Scalar lambda, Scalar eta, Scalar noise_var = 0) {
  GaussianModel<Scalar> m{std::move(mu), std::move(sigma), lambda, eta, noise_var};
  validate(m);
  return m;
}

namespace detail {
template <typename Scalar, typename Derived>
void check_dim(const GaussianModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != m.dim()) fail(ErrorCode::InvalidInput, "feature vector dimension mismatch");
}
}  // namespace detail

template <typename Scalar, typename Derived>
Scalar expected_loss(const GaussianModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x,
                     Scalar y) {
  detail::check_dim(m, x);
  const Scalar residual = y - x.dot(m.mu);
  // (y - xᵀmu)² is the algebraic sum y² - 2y xᵀmu + (xᵀmu)², kept non-negative.
  return residual * residual + x.dot(m.sigma.matrix() * x) +
         m.lambda * (m.sigma.trace() + m.mu.squaredNorm());
}

template <typename Scalar>
struct GaussianGradients {
  Vector<Scalar> grad_mu;
  SymMatrix<Scalar> grad_sigma;
};

template <typename Scalar, typename Derived>
GaussianGradients<Scalar> gradients(const GaussianModel<Scalar>& m,
                                    const Eigen::MatrixBase<Derived>& x, Scalar y) {
  detail::check_dim(m, x);
  const Eigen::Index p = m.dim();
  GaussianGradients<Scalar> g;
  g.grad_mu = Scalar(2) * x * (x.dot(m.mu) - y) + Scalar(2) * m.lambda * m.mu;
  g.grad_sigma = SymMatrix<Scalar>(x * x.transpose() + m.lambda * Matrix<Scalar>::Identity(p, p));
  return g;
}

/// One forward-backward step. With `freeze_sigma` the covariance is left as is.
template <typename Scalar, typename Derived>
GaussianModel<Scalar> update_step(const GaussianModel<Scalar>& m,
                                  const Eigen::MatrixBase<Derived>& x, Scalar y,
                                  bool freeze_sigma = false) {
  const auto g = gradients(m, x, y);
  GaussianModel<Scalar> next = m;
  next.mu = m.mu - m.eta * g.grad_mu;
  if (!freeze_sigma) {
    next.sigma = project_psd(SymMatrix<Scalar>(m.sigma.matrix() - m.eta * g.grad_sigma.matrix()));
  }
  return next;
}

template <typename Scalar, typename Derived>
Scalar predict(const GaussianModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  detail::check_dim(m, x);
  return x.dot(m.mu);
}

template <typename Scalar>
struct LabelDistribution {
  Scalar mean;
  Scalar var;
};

/// Law of xᵀW under the current weight distribution.
template <typename Scalar, typename Derived>
LabelDistribution<Scalar> predict_distribution(const GaussianModel<Scalar>& m,
                                               const Eigen::MatrixBase<Derived>& x) {
  detail::check_dim(m, x);
  const Scalar var = x.dot(m.sigma.matrix() * x);
  using std::max;
  return {x.dot(m.mu), max(var, Scalar(0))};
}

template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;
};

/// Two-sided standard normal quantile z_{(1+level)/2}.
inline double normal_quantile_two_sided(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::InvalidInput, "interval level must lie in (0,1)");
  }
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 * (1.0 + level));
}

/// Centre xᵀmu, half-width z·sqrt(xᵀSigma x + noise_var).
template <typename Scalar, typename Derived>
Interval<Scalar> predict_interval(const GaussianModel<Scalar>& m,
                                  const Eigen::MatrixBase<Derived>& x, double level) {
  const Scalar z = static_cast<Scalar>(normal_quantile_two_sided(level));
  const auto dist = predict_distribution(m, x);
  using std::sqrt;
  const Scalar half = z * sqrt(dist.var + m.noise_var);
  return {dist.mean - half, dist.mean + half};
}

using GaussianModeld = GaussianModel<double>;

}  // namespace rsindy

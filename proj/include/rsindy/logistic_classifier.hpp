#pragma once

// Online binary classifier with Gaussian weights. The expected logistic loss
// has no closed form, so the loss is evaluated at the mean:
//   f1(mu, Sigma) = l(y, xᵀmu) + lambda (tr Sigma + muᵀmu)
// giving grad_mu = x (sigmoid(xᵀmu) - y) + 2 lambda mu and grad_Sigma = lambda I.

#include <cmath>

#include "rsindy/gaussian_regressor.hpp"

namespace rsindy {

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= 0) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

/// log(1 + e^z) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  if (z > 0) return z + log1p(exp(-z));
  return log1p(exp(z));
}

template <typename Scalar>
struct LogisticModel {
  Vector<Scalar> mu;
  SymMatrix<Scalar> sigma;
  Scalar lambda = 0;
  Scalar eta = Scalar(0.1);
  Scalar threshold = Scalar(0.5);

  Eigen::Index dim() const { return mu.size(); }
};

template <typename Scalar>
void validate(const LogisticModel<Scalar>& m) {
  if (m.sigma.dim() != m.mu.size()) {
    fail(ErrorCode::InvalidInput, "LogisticModel: mu and sigma dimensions differ");
  }
  if (!all_finite(m.mu) || !all_finite(m.sigma.matrix())) {
    fail(ErrorCode::InvalidInput, "LogisticModel: non-finite parameters");
  }
  if (!(m.lambda >= 0)) fail(ErrorCode::InvalidInput, "LogisticModel: lambda must be >= 0");
  if (!(m.eta > 0)) fail(ErrorCode::InvalidInput, "LogisticModel: eta must be > 0");
  if (!(m.threshold > 0 && m.threshold < 1)) {
    fail(ErrorCode::InvalidInput, "LogisticModel: threshold must lie in (0,1)");
  }
  if (m.dim() > 0 && eigh_symmetric(m.sigma).values.minCoeff() < -Scalar(kPsdTolerance)) {
    fail(ErrorCode::InvalidInput, "LogisticModel: sigma is not positive semi-definite");
  }
}

template <typename Scalar>
LogisticModel<Scalar> make_logistic_model(Vector<Scalar> mu, SymMatrix<Scalar> sigma,
                                          Scalar lambda, Scalar eta,
                                          Scalar threshold = Scalar(0.5)) {
  LogisticModel<Scalar> m{std::move(mu), std::move(sigma), lambda, eta, threshold};
  validate(m);
  return m;
}

namespace detail {
template <typename Scalar, typename Derived>
void check_dim(const LogisticModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != m.dim()) fail(ErrorCode::InvalidInput, "feature vector dimension mismatch");
}

inline void check_label(int y) {
  if (y != 0 && y != 1) fail(ErrorCode::InvalidInput, "binary label must be 0 or 1");
}
}  // namespace detail

template <typename Scalar, typename Derived>
Scalar predict_proba(const LogisticModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  detail::check_dim(m, x);
  return sigmoid(x.dot(m.mu));
}

/// Cross-entropy at the mean plus the expected ridge term. Written as
/// softplus(z) - y z, which equals -[y ln h + (1-y) ln(1-h)] and stays finite.
template <typename Scalar, typename Derived>
Scalar surrogate_loss(const LogisticModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x,
                      int y) {
  detail::check_dim(m, x);
  detail::check_label(y);
  const Scalar z = x.dot(m.mu);
  return softplus(z) - Scalar(y) * z + m.lambda * (m.sigma.trace() + m.mu.squaredNorm());
}

template <typename Scalar>
struct LogisticGradients {
  Vector<Scalar> grad_mu;
  SymMatrix<Scalar> grad_sigma;
};

template <typename Scalar, typename Derived>
LogisticGradients<Scalar> gradients(const LogisticModel<Scalar>& m,
                                    const Eigen::MatrixBase<Derived>& x, int y) {
  detail::check_dim(m, x);
  detail::check_label(y);
  const Eigen::Index p = m.dim();
  LogisticGradients<Scalar> g;
  g.grad_mu = x * (sigmoid(x.dot(m.mu)) - Scalar(y)) + Scalar(2) * m.lambda * m.mu;
  g.grad_sigma = SymMatrix<Scalar>(m.lambda * Matrix<Scalar>::Identity(p, p));
  return g;
}

template <typename Scalar, typename Derived>
LogisticModel<Scalar> update_step(const LogisticModel<Scalar>& m,
                                  const Eigen::MatrixBase<Derived>& x, int y) {
  const auto g = gradients(m, x, y);
  LogisticModel<Scalar> next = m;
  next.mu = m.mu - m.eta * g.grad_mu;
  if (m.lambda != Scalar(0)) {
    next.sigma = project_psd(SymMatrix<Scalar>(m.sigma.matrix() - m.eta * g.grad_sigma.matrix()));
  }
  return next;
}

/// 1 iff predict_proba >= threshold (ties go to the positive class).
template <typename Scalar, typename Derived>
int classify(const LogisticModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  return predict_proba(m, x) >= m.threshold ? 1 : 0;
}

using LogisticModeld = LogisticModel<double>;

}  // namespace rsindy

#pragma once

// Dense linear-algebra and projection primitives shared by the learners.
// Everything here is templated on the scalar type; the `d`-suffixed aliases
// are what the rest of the library uses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rsindy/error.hpp"

namespace rsindy {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Square matrix that is symmetric by construction: any input is replaced by
/// (M + Mᵀ)/2.
template <typename Scalar>
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Eigen::Index dim) : m_(Matrix<Scalar>::Zero(dim, dim)) {}

  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      fail(ErrorCode::InvalidInput, "SymMatrix requires a square matrix");
    }
    m_ = (m + m.transpose()) / Scalar(2);
  }

  static SymMatrix Zero(Eigen::Index dim) { return SymMatrix(dim); }
  static SymMatrix Identity(Eigen::Index dim) {
    return SymMatrix(Matrix<Scalar>::Identity(dim, dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix<Scalar>& matrix() const { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  Scalar trace() const { return m_.trace(); }
  Vector<Scalar> diagonal() const { return m_.diagonal(); }

 private:
  Matrix<Scalar> m_;
};

/// Point of the probability simplex Δ^N.
template <typename Scalar>
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  ProbVector() = default;

  template <typename Derived>
  explicit ProbVector(const Eigen::MatrixBase<Derived>& w) : w_(w) {
    if (w_.size() < 1) fail(ErrorCode::InvalidInput, "ProbVector must be non-empty");
    if (!all_finite(w_)) fail(ErrorCode::InvalidInput, "ProbVector has non-finite weights");
    if ((w_.array() < Scalar(0)).any() || (w_.array() > Scalar(1)).any()) {
      fail(ErrorCode::InvalidInput, "ProbVector weights must lie in [0,1]");
    }
    using std::abs;
    if (abs(w_.sum() - Scalar(1)) > Scalar(kSumTolerance)) {
      fail(ErrorCode::InvalidInput, "ProbVector weights must sum to 1");
    }
  }

  static ProbVector uniform(Eigen::Index n) {
    if (n < 1) fail(ErrorCode::InvalidInput, "ProbVector must be non-empty");
    return ProbVector(Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n)));
  }

  static ProbVector vertex(Eigen::Index n, Eigen::Index k) {
    Vector<Scalar> w = Vector<Scalar>::Zero(n);
    w(k) = Scalar(1);
    return ProbVector(w);
  }

  Eigen::Index size() const { return w_.size(); }
  const Vector<Scalar>& weights() const { return w_; }
  Scalar operator[](Eigen::Index i) const { return w_(i); }

 private:
  Vector<Scalar> w_;
};

template <typename Scalar>
struct EigenDecomposition {
  Vector<Scalar> values;   // descending
  Matrix<Scalar> vectors;  // column i pairs with values(i)
};

template <typename Scalar>
EigenDecomposition<Scalar> eigh_symmetric(const SymMatrix<Scalar>& m) {
  if (!all_finite(m.matrix())) {
    fail(ErrorCode::InvalidInput, "eigh_symmetric: non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NumericFailure, "eigh_symmetric: eigensolver did not converge");
  }
  // Eigen sorts ascending.
  EigenDecomposition<Scalar> out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

/// Nearest p.s.d. matrix in Frobenius norm: Σ max{0, ζᵢ} vᵢvᵢᵀ.
/// Inputs that are already p.s.d. come back unchanged.
template <typename Scalar>
SymMatrix<Scalar> project_psd(const SymMatrix<Scalar>& m) {
  if (m.dim() == 0) return m;
  const auto eig = eigh_symmetric(m);
  if (eig.values.minCoeff() >= Scalar(0)) return m;
  const Vector<Scalar> clipped = eig.values.cwiseMax(Scalar(0));
  return SymMatrix<Scalar>(eig.vectors * clipped.asDiagonal() * eig.vectors.transpose());
}

/// Euclidean projection onto the probability simplex (sort and threshold).
template <typename Derived>
ProbVector<typename Derived::Scalar> project_simplex(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> v = z;
  const Eigen::Index n = v.size();
  if (n < 1) fail(ErrorCode::InvalidInput, "project_simplex: empty vector");
  if (!all_finite(v)) fail(ErrorCode::InvalidInput, "project_simplex: non-finite entries");

  std::vector<Scalar> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  Scalar cumulative(0);
  Scalar tau(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const Scalar candidate = (cumulative - Scalar(1)) / Scalar(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > Scalar(0)) tau = candidate;
  }

  Vector<Scalar> w = (v.array() - tau).cwiseMax(Scalar(0)).matrix();
  // Absorb last-ulp drift so the sum invariant holds exactly enough.
  w /= w.sum();
  w = w.cwiseMin(Scalar(1));
  return ProbVector<Scalar>(w);
}

/// Welford single-pass mean/variance accumulator. An optional protected column
/// (an intercept) is carried through standardization untouched.
template <typename Scalar>
struct RunningStandardizer {
  long long count = 0;
  Vector<Scalar> mean;
  Vector<Scalar> m2;
  std::optional<Eigen::Index> protected_column;

  static RunningStandardizer empty(Eigen::Index dim,
                                   std::optional<Eigen::Index> protect = std::nullopt) {
    RunningStandardizer s;
    s.mean = Vector<Scalar>::Zero(dim);
    s.m2 = Vector<Scalar>::Zero(dim);
    s.protected_column = protect;
    return s;
  }

  Eigen::Index dim() const { return mean.size(); }

  Vector<Scalar> sample_variance() const {
    if (count < 2) return Vector<Scalar>::Zero(dim());
    return m2 / Scalar(count - 1);
  }
};

template <typename Scalar, typename Derived>
RunningStandardizer<Scalar> standardizer_update(const RunningStandardizer<Scalar>& s,
                                                const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != s.dim()) fail(ErrorCode::InvalidInput, "standardizer_update: dimension mismatch");
  RunningStandardizer<Scalar> next = s;
  next.count += 1;
  const Vector<Scalar> delta = x - s.mean;
  next.mean = s.mean + delta / Scalar(next.count);
  next.m2 = s.m2 + delta.cwiseProduct(x - next.mean);
  return next;
}

template <typename Scalar>
Vector<Scalar> standard_deviation(const RunningStandardizer<Scalar>& s) {
  if (s.count < 2) {
    fail(ErrorCode::InsufficientData, "standardizer needs at least two samples");
  }
  return s.sample_variance().cwiseSqrt();
}

template <typename Scalar, typename Derived>
Vector<Scalar> standardize_row(const RunningStandardizer<Scalar>& s,
                               const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != s.dim()) fail(ErrorCode::InvalidInput, "standardize_row: dimension mismatch");
  const Vector<Scalar> sd = standard_deviation(s);
  Vector<Scalar> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (s.protected_column && *s.protected_column == i) {
      out(i) = x(i);
      continue;
    }
    if (!(sd(i) > Scalar(0))) {
      fail(ErrorCode::DegenerateFeature, "standardize_row: zero standard deviation",
           static_cast<std::size_t>(i));
    }
    out(i) = (x(i) - s.mean(i)) / sd(i);
  }
  return out;
}

template <typename Scalar, typename Derived>
Vector<Scalar> destandardize_row(const RunningStandardizer<Scalar>& s,
                                 const Eigen::MatrixBase<Derived>& z) {
  if (z.size() != s.dim()) fail(ErrorCode::InvalidInput, "destandardize_row: dimension mismatch");
  const Vector<Scalar> sd = standard_deviation(s);
  Vector<Scalar> out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (s.protected_column && *s.protected_column == i) {
      out(i) = z(i);
    } else {
      out(i) = z(i) * sd(i) + s.mean(i);
    }
  }
  return out;
}

using SymMatrixd = SymMatrix<double>;
using ProbVectord = ProbVector<double>;
using RunningStandardizerd = RunningStandardizer<double>;
using EigenDecompositiond = EigenDecomposition<double>;

}  // namespace rsindy

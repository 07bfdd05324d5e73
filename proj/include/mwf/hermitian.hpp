#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "mwf/errors.hpp"
#include "mwf/tolerances.hpp"

namespace mwf {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexMatrix =
    Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrixXd = ComplexMatrix<double>;
using VectorXr = RealVector<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v))) {
        return false;
      }
    }
  }
  return true;
}

/// Square complex matrix with A(i,j) == conj(A(j,i)).
///
/// The checked constructor rejects inputs whose Hermitian defect exceeds the
/// construction tolerance (relative to the largest entry); `symmetrized`
/// skips the check and is meant for products that are Hermitian in exact
/// arithmetic. Either way the stored matrix is exactly Hermitian.
template <typename Real>
class HermitianMatrix {
 public:
  using Scalar = Complex<Real>;
  using Matrix = ComplexMatrix<Real>;

  HermitianMatrix() = default;

  explicit HermitianMatrix(const Matrix& m) {
    check_shape(m);
    const Real scale = std::max<Real>(Real(1), m.cwiseAbs().maxCoeff());
    const Real defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > Real(Tolerances::construction) * scale) {
      throw Error(ErrorCode::NotHermitian,
                  "matrix is not Hermitian (defect " + std::to_string(defect) +
                      ")");
    }
    data_ = Real(0.5) * (m + m.adjoint());
  }

  template <typename Derived>
  static HermitianMatrix symmetrized(const Eigen::MatrixBase<Derived>& m) {
    Matrix dense = m;
    check_shape(dense);
    HermitianMatrix out;
    out.data_ = Real(0.5) * (dense + dense.adjoint());
    return out;
  }

  static HermitianMatrix identity(Eigen::Index n) {
    return symmetrized(Matrix::Identity(n, n));
  }

  static HermitianMatrix zero(Eigen::Index n) {
    return symmetrized(Matrix::Zero(n, n));
  }

  template <typename Derived>
  static HermitianMatrix diagonal(const Eigen::MatrixBase<Derived>& d) {
    Matrix m = Matrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = Scalar(d(i));
    return symmetrized(m);
  }

  Eigen::Index dim() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    return data_(i, j);
  }
  Real trace() const { return data_.diagonal().real().sum(); }

 private:
  static void check_shape(const Matrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "Hermitian matrix must be square and non-empty");
    }
    if (!all_finite(m)) {
      throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    }
  }

  Matrix data_;
};

using HermitianMatrixXd = HermitianMatrix<double>;

/// Eigenpairs of a Hermitian matrix, eigenvalues in decreasing order.
template <typename Real>
struct EigenDecomposition {
  ComplexMatrix<Real> vectors;
  RealVector<Real> values;

  ComplexMatrix<Real> reconstruct() const {
    return vectors * values.template cast<Complex<Real>>().asDiagonal() *
           vectors.adjoint();
  }
};

namespace detail {

// Rotates each column so that its first significant component is real and
// positive. Makes the output independent of the phase the solver happened to
// pick.
template <typename Real>
void normalize_phases(ComplexMatrix<Real>& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const Real peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const Real mag = std::abs(col(i));
      if (mag > Real(1e-8) * peak) {
        col *= std::conj(col(i)) / mag;
        col(i) = Complex<Real>(std::real(col(i)), Real(0));
        break;
      }
    }
  }
}

template <typename Real>
Real max_abs(const RealVector<Real>& v) {
  return v.size() == 0 ? Real(0) : v.cwiseAbs().maxCoeff();
}

}  // namespace detail

template <typename Real>
EigenDecomposition<Real> hermitian_evd(const HermitianMatrix<Real>& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(
      a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFinite, "Hermitian eigensolver did not converge");
  }
  const Eigen::Index n = a.dim();
  // Eigen returns ascending values; reverse, keeping the solver's order among
  // ties so that identical inputs give identical outputs.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::reverse(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) {
                     return solver.eigenvalues()(x) > solver.eigenvalues()(y);
                   });

  EigenDecomposition<Real> out;
  out.vectors.resize(n, n);
  out.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) =
        solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  detail::normalize_phases(out.vectors);
  return out;
}

/// Negative part of a real diagonal: out_i = max(-z_i, 0).
template <typename Derived>
auto neg_part(const Eigen::MatrixBase<Derived>& z) {
  using Real = typename Derived::Scalar;
  return RealVector<Real>(z.cwiseMin(Real(0)).cwiseAbs());
}

/// Sets the negative eigenvalues of `a` to zero.
template <typename Real>
HermitianMatrix<Real> psd_project(const HermitianMatrix<Real>& a) {
  const auto evd = hermitian_evd(a);
  const RealVector<Real> clipped = evd.values.cwiseMax(Real(0));
  return HermitianMatrix<Real>::symmetrized(
      evd.vectors * clipped.template cast<Complex<Real>>().asDiagonal() *
      evd.vectors.adjoint());
}

template <typename Real>
HermitianMatrix<Real> hermitian_sqrt(const HermitianMatrix<Real>& a) {
  const auto evd = hermitian_evd(a);
  const Real scale = detail::max_abs(evd.values);
  if (evd.values.minCoeff() < -Real(Tolerances::psd_clamp) * scale) {
    throw Error(ErrorCode::NotPSD, "square root of an indefinite matrix");
  }
  const RealVector<Real> roots = evd.values.cwiseMax(Real(0)).cwiseSqrt();
  return HermitianMatrix<Real>::symmetrized(
      evd.vectors * roots.template cast<Complex<Real>>().asDiagonal() *
      evd.vectors.adjoint());
}

template <typename Real>
Real logdet_psd(const HermitianMatrix<Real>& a) {
  const auto evd = hermitian_evd(a);
  if (evd.values.minCoeff() <= Real(0)) {
    throw Error(ErrorCode::NotPD, "log-determinant of a singular matrix");
  }
  return evd.values.array().log().sum();
}

/// Smallest eigenvalue of a Hermitian matrix.
template <typename Real>
Real min_eigenvalue(const HermitianMatrix<Real>& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(
      a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace mwf

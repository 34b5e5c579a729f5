#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"

namespace hlab {

// Dense complex types at desk scale. The template parameter is the real
// scalar; everything else in the library is written against these aliases.
template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Operator = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using Ket = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Absolute slack used for every approximate comparison. Matrix comparisons
/// scale it by the dimension (see `scaled`).
struct Tolerance {
  double eps = 1e-10;

  Tolerance() = default;
  explicit Tolerance(double value) : eps(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::InvalidArgument, "tolerance must be a positive finite number");
    }
  }

  template <typename Real>
  Real scaled(Index dim) const {
    return static_cast<Real>(eps) * static_cast<Real>(dim);
  }
};

template <typename Real>
Operator<Real> identity(Index dim) {
  return Operator<Real>::Identity(dim, dim);
}

template <typename Real>
Ket<Real> basis_ket(Index dim, Index k) {
  Ket<Real> v = Ket<Real>::Zero(dim);
  v(k) = Complex<Real>(1);
  return v;
}

template <typename DerivedA, typename DerivedB>
void require_same_shape(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << a.rows() << "x" << a.cols() << " vs "
        << b.rows() << "x" << b.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

template <typename DerivedA, typename DerivedB>
auto frobenius_distance(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  require_same_shape(a, b);
  return (a - b).norm();
}

/// True iff ‖A − B‖_F ≤ eps·dim.
template <typename Real>
bool approx_equal(const Operator<Real>& a, const Operator<Real>& b,
                  const Tolerance& tol = {}) {
  return frobenius_distance(a, b) <= tol.scaled<Real>(a.rows());
}

template <typename Real>
Real hermiticity_defect(const Operator<Real>& m) {
  return (m - m.adjoint()).norm();
}

template <typename Real>
bool is_hermitian(const Operator<Real>& m, const Tolerance& tol = {}) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol.scaled<Real>(m.rows());
}

template <typename Real>
Real unitarity_defect(const Operator<Real>& u) {
  return (u.adjoint() * u - identity<Real>(u.rows())).norm();
}

template <typename Real>
bool is_unitary(const Operator<Real>& u, const Tolerance& tol = {}) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol.scaled<Real>(u.rows());
}

template <typename Real>
bool is_normalized(const Ket<Real>& psi, const Tolerance& tol = {}) {
  return std::abs(psi.squaredNorm() - Real(1)) <= static_cast<Real>(tol.eps);
}

template <typename Real>
void require_normalized(const Ket<Real>& psi, const Tolerance& tol,
                        const std::string& what = "ket") {
  if (!is_normalized(psi, tol)) {
    std::ostringstream msg;
    msg << what << " is not normalized: <psi|psi> = " << psi.squaredNorm();
    throw Error(ErrorCode::NotNormalized, msg.str());
  }
}

template <typename Real>
void require_unitary(const Operator<Real>& u, const Tolerance& tol,
                     const std::string& what = "operator") {
  if (u.rows() != u.cols()) {
    throw Error(ErrorCode::DimensionMismatch, what + " is not square");
  }
  if (!is_unitary(u, tol)) {
    std::ostringstream msg;
    msg << what << " is not unitary: |U^dagger U - I|_F = " << unitarity_defect(u);
    throw Error(ErrorCode::NotUnitary, msg.str());
  }
}

/// Kronecker product with the left factor's index varying slowest:
/// entry (i·dB + k, j·dB + l) = A(i,j)·B(k,l).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor_product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                           a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Real>
Ket<Real> tensor_product(const Ket<Real>& a, const Ket<Real>& b) {
  Ket<Real> out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

template <typename Real>
struct EigenSystem {
  RealVector<Real> values;   // ascending
  Operator<Real> vectors;    // column k belongs to values(k)

  Ket<Real> vector(Index k) const { return vectors.col(k); }
};

/// Eigen-decomposition of a Hermitian matrix. Eigenvectors inside a
/// degenerate block are re-orthonormalized explicitly so that projectors
/// assembled from them are exact to rounding.
template <typename Real>
EigenSystem<Real> hermitian_eigensystem(const Operator<Real>& m, const Tolerance& tol = {}) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "eigensystem requires a nonempty square matrix");
  }
  const Index dim = m.rows();
  if (!is_hermitian(m, tol)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: |M - M^dagger|_F = " << hermiticity_defect(m);
    throw Error(ErrorCode::NotHermitian, msg.str());
  }
  const Operator<Real> sym = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Operator<Real>> solver(sym);

  EigenSystem<Real> out{solver.eigenvalues(), solver.eigenvectors()};

  const Real scale = std::max<Real>(Real(1), out.values.cwiseAbs().maxCoeff());
  const Real gap = tol.scaled<Real>(dim) * scale;
  Index start = 0;
  while (start < dim) {
    Index stop = start + 1;
    while (stop < dim && out.values(stop) - out.values(stop - 1) <= gap) ++stop;
    const Index width = stop - start;
    if (width > 1) {
      Eigen::HouseholderQR<Operator<Real>> qr(out.vectors.middleCols(start, width));
      const Operator<Real> q = qr.householderQ() * Operator<Real>::Identity(dim, width);
      out.vectors.middleCols(start, width) = q;
    }
    start = stop;
  }
  return out;
}

}  // namespace hlab

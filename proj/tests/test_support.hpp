#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "hlab/numerics.hpp"

namespace hlab::testing {

using Real = double;
using Op = Operator<Real>;
using Vec = Ket<Real>;
using C = std::complex<Real>;

inline const Real kRootHalf = 1.0 / std::sqrt(2.0);

inline Vec ket(std::initializer_list<C> amplitudes) {
  Vec v(static_cast<Index>(amplitudes.size()));
  Index i = 0;
  for (const auto& a : amplitudes) v(i++) = a;
  return v;
}

inline Op matrix(Index rows, std::initializer_list<C> entries) {
  Op m(rows, rows);
  Index k = 0;
  for (const auto& e : entries) {
    m(k / rows, k % rows) = e;
    ++k;
  }
  return m;
}

inline Vec z_up() { return ket({1, 0}); }
inline Vec z_down() { return ket({0, 1}); }
inline Vec x_up() { return ket({kRootHalf, kRootHalf}); }
inline Vec x_down() { return ket({kRootHalf, -kRootHalf}); }

/// Diagonal 0/1 operator.
inline Op diag01(std::initializer_list<int> bits) {
  Op m = Op::Zero(static_cast<Index>(bits.size()), static_cast<Index>(bits.size()));
  Index i = 0;
  for (int b : bits) {
    m(i, i) = static_cast<Real>(b);
    ++i;
  }
  return m;
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  Real uniform(Real lo = 0, Real hi = 1) {
    return std::uniform_real_distribution<Real>(lo, hi)(engine_);
  }

  Index dim(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(engine_);
  }

  C gaussian() {
    std::normal_distribution<Real> n(0, 1);
    return {n(engine_), n(engine_)};
  }

  Vec ket(Index dim) {
    Vec v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = gaussian();
    return v / v.norm();
  }

  /// Haar-distributed unitary: QR of a Ginibre matrix with phases fixed.
  Op unitary(Index dim) {
    Op g(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) g(i, j) = gaussian();
    Eigen::HouseholderQR<Op> qr(g);
    Op q = qr.householderQ() * Op::Identity(dim, dim);
    Op r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Index i = 0; i < dim; ++i) {
      const C d = r(i, i);
      q.col(i) *= d / std::abs(d);
    }
    return q;
  }

  Op hermitian(Index dim) {
    Op g(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) g(i, j) = gaussian();
    return (g + g.adjoint()) / Real(2);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hlab::testing

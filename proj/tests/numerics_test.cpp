#include "hlab/numerics.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hlab {
namespace {

using testing::C;
using testing::Op;
using testing::Real;
using testing::Vec;

// |<a|b>| == 1 means the two unit vectors agree up to a phase.
bool same_ray(const Vec& a, const Vec& b) { return std::abs(std::abs(a.dot(b)) - 1.0) < 1e-12; }

TEST(HermitianEigensystem, IdentityHasUnitEigenvaluesAndOrthonormalVectors) {
  const auto eig = hermitian_eigensystem<Real>(Op::Identity(2, 2));
  EXPECT_NEAR(eig.values(0), 1.0, 1e-14);
  EXPECT_NEAR(eig.values(1), 1.0, 1e-14);
  EXPECT_LT((eig.vectors.adjoint() * eig.vectors - Op::Identity(2, 2)).norm(), 1e-14);
}

TEST(HermitianEigensystem, PauliXMatchesHandSolvedCharacteristicPolynomial) {
  // det(X - λI) = λ² - 1, so λ = -1, +1 with (1,-1)/√2 and (1,1)/√2.
  const auto eig = hermitian_eigensystem<Real>(testing::matrix(2, {0, 1, 1, 0}));
  EXPECT_NEAR(eig.values(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.values(1), 1.0, 1e-14);
  EXPECT_TRUE(same_ray(eig.vector(0), testing::x_down()));
  EXPECT_TRUE(same_ray(eig.vector(1), testing::x_up()));
}

TEST(HermitianEigensystem, DiagonalInputGivesStandardBasis) {
  Op d = Op::Zero(3, 3);
  d.diagonal() << 0.5, 1.5, 2.5;
  const auto eig = hermitian_eigensystem<Real>(d);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_NEAR(eig.values(k), 0.5 + static_cast<Real>(k), 1e-14);
    EXPECT_TRUE(same_ray(eig.vector(k), basis_ket<Real>(3, k)));
  }
}

TEST(HermitianEigensystem, RejectsNonHermitian) {
  const Op m = testing::matrix(2, {0, 1, 0, 0});
  try {
    hermitian_eigensystem<Real>(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(HermitianEigensystem, DegenerateBlocksStayOrthonormal) {
  testing::Random rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = rng.dim(3, 8);
    const Op v = rng.unitary(dim);
    Op d = Op::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) d(i, i) = (i < dim / 2) ? 1.0 : 2.0;
    const Op m = v * d * v.adjoint();
    const auto eig = hermitian_eigensystem<Real>(m);
    EXPECT_LT((eig.vectors.adjoint() * eig.vectors - Op::Identity(dim, dim)).norm(), 1e-12);
  }
}

TEST(HermitianEigensystem, ReconstructsRandomHermitianMatrices) {
  testing::Random rng(7);
  const Tolerance tol;
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = rng.dim(1, 12);
    const Op m = rng.hermitian(dim);
    const auto eig = hermitian_eigensystem<Real>(m, tol);
    Op rebuilt = Op::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) rebuilt += eig.values(k) * eig.vector(k) * eig.vector(k).adjoint();
    EXPECT_LE((rebuilt - m).norm(), tol.scaled<Real>(dim));
    for (Index k = 0; k < dim; ++k) {
      EXPECT_LE((m * eig.vector(k) - eig.values(k) * eig.vector(k)).norm(), tol.scaled<Real>(dim));
    }
    for (Index k = 1; k < dim; ++k) EXPECT_LE(eig.values(k - 1), eig.values(k));
  }
}

TEST(TensorProduct, IdentityFactorsGiveIdentity) {
  EXPECT_EQ(tensor_product(Op::Identity(2, 2), Op::Identity(2, 2)), Op::Identity(4, 4));
}

TEST(TensorProduct, RankOneDiagonal) {
  const Op zp = testing::diag01({1, 0});
  Op expected = Op::Zero(4, 4);
  expected(0, 0) = 1;
  EXPECT_EQ(tensor_product(zp, zp), expected);
}

TEST(TensorProduct, LeftFactorIndexVariesSlowest) {
  // X ⊗ I written out by hand in the composite basis |00>,|01>,|10>,|11>.
  const Op hand = testing::matrix(4, {0, 0, 1, 0,  //
                                      0, 0, 0, 1,  //
                                      1, 0, 0, 0,  //
                                      0, 1, 0, 0});
  const Op x = testing::matrix(2, {0, 1, 1, 0});
  const Op xi = tensor_product(x, Op::Identity(2, 2));
  EXPECT_EQ(xi, hand);
  const Vec e0e1 = tensor_product<Real>(basis_ket<Real>(2, 0), basis_ket<Real>(2, 1));
  EXPECT_EQ(e0e1, basis_ket<Real>(4, 1));
  EXPECT_EQ(Vec(xi * e0e1), basis_ket<Real>(4, 3));
}

TEST(TensorProduct, IsAssociativeEntryForEntry) {
  testing::Random rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Op a = rng.hermitian(2), b = rng.unitary(3), c = rng.hermitian(2);
    const Op left = tensor_product(tensor_product(a, b), c);
    const Op right = tensor_product(a, tensor_product(b, c));
    ASSERT_EQ(left.rows(), 12);
    // Each entry is the same triple product a·b·c evaluated in a different
    // association order, so allow one rounding step.
    EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-15 * 16);
  }
}

TEST(ApproxEqual, ReflexiveAndTolerantOfRounding) {
  const Op i2 = Op::Identity(2, 2);
  EXPECT_TRUE(approx_equal<Real>(i2, i2));
  Op perturbed = i2;
  perturbed(0, 1) = 1e-14;
  EXPECT_TRUE(approx_equal<Real>(i2, perturbed, Tolerance(1e-10)));
  EXPECT_TRUE(approx_equal<Real>(perturbed, i2, Tolerance(1e-10)));
}

TEST(ApproxEqual, ZUpAndXUpDifferByUnitFrobeniusDistance) {
  // [z+] - [x+] = [[1/2, -1/2], [-1/2, -1/2]]: four entries of magnitude 1/2.
  const Op zp = testing::z_up() * testing::z_up().adjoint();
  const Op xp = testing::x_up() * testing::x_up().adjoint();
  EXPECT_NEAR(frobenius_distance(zp, xp), 1.0, 1e-15);
  EXPECT_FALSE(approx_equal<Real>(zp, xp, Tolerance(1e-10)));
}

TEST(ApproxEqual, DimensionMismatchThrows) {
  try {
    approx_equal<Real>(Op::Identity(2, 2), Op::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Tolerance, RejectsNonPositive) {
  EXPECT_THROW(Tolerance(0.0), Error);
  EXPECT_THROW(Tolerance(-1e-3), Error);
}

TEST(Unitary, EvolutionPreservesNorm) {
  testing::Random rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Index dim = rng.dim(1, 10);
    const Op u = rng.unitary(dim);
    ASSERT_TRUE(is_unitary<Real>(u));
    const Vec psi = rng.ket(dim);
    EXPECT_NEAR(Vec(u * psi).norm(), 1.0, 1e-10);
  }
}

TEST(Scalar, LongDoubleInstantiation) {
  using LOp = Operator<long double>;
  LOp x = LOp::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0L;
  const auto eig = hermitian_eigensystem<long double>(x);
  EXPECT_NEAR(static_cast<double>(eig.values(0)), -1.0, 1e-15);
}

}  // namespace
}  // namespace hlab

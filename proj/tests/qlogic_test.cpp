#include "hlab/qlogic.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hlab {
namespace {

using testing::diag01;
using testing::Op;
using testing::Real;
using testing::Vec;
using P = Projector<Real>;

P proj(const Vec& v, const std::string& label) { return projector_from_ket<Real>(v, {}, label); }
P proj(const Op& m, const std::string& label) { return P(m, label); }

const P& as_projector(const Proposition<Real>& p) { return std::get<P>(p); }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

/// Random projector diagonal in the basis `v`, selecting columns by `mask`.
P projector_in_basis(const Op& v, unsigned mask, const std::string& label) {
  Op m = Op::Zero(v.rows(), v.rows());
  for (Index k = 0; k < v.cols(); ++k) {
    if (mask & (1u << k)) m += v.col(k) * v.col(k).adjoint();
  }
  return P(m, label);
}

TEST(ProjectorFromKet, StandardBasisAndXUp) {
  EXPECT_TRUE(approx_equal<Real>(proj(testing::z_up(), "z+").matrix(), diag01({1, 0})));
  const Op half = testing::matrix(2, {0.5, 0.5, 0.5, 0.5});
  const P xp = proj(testing::x_up(), "x+");
  EXPECT_TRUE(approx_equal<Real>(xp.matrix(), half, Tolerance(1e-14)));
  EXPECT_NEAR(xp.trace(), 1.0, 1e-14);
}

TEST(ProjectorFromKet, ZeroVectorIsNotNormalized) {
  EXPECT_EQ(code_of([] { projector_from_ket<Real>(Vec::Zero(2)); }), ErrorCode::NotNormalized);
}

TEST(Projector, ConstructorRejectsNonIdempotent) {
  EXPECT_EQ(code_of([] { P(testing::matrix(2, {2, 0, 0, 0}), "two"); }), ErrorCode::NotProjector);
  EXPECT_EQ(code_of([] { P(testing::matrix(2, {0, 1, 0, 0}), "nilpotent"); }),
            ErrorCode::NotProjector);
}

TEST(Negation, SpinUpAndDown) {
  const P zp = proj(testing::z_up(), "z+");
  EXPECT_TRUE(approx_equal<Real>(negation(zp).matrix(), diag01({0, 1})));
}

TEST(Negation, OscillatorComplementIsTwoAndAbove) {
  const P low = proj(diag01({1, 1, 0, 0}), "P");
  EXPECT_TRUE(approx_equal<Real>(negation(low).matrix(), diag01({0, 0, 1, 1})));
}

TEST(Negation, IdentityGivesZeroAndIsExactInvolution) {
  EXPECT_TRUE(negation(identity_projector<Real>(3)).is_zero());
  testing::Random rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = rng.dim(2, 6);
    const P p = projector_in_basis(rng.unitary(dim), 0b101u, "p");
    const P back = negation(negation(p));
    EXPECT_EQ(back.matrix(), p.matrix());
    EXPECT_EQ(back.label(), p.label());
  }
}

TEST(Conjunction, OrthogonalPairGivesZero) {
  const auto r = conjunction(proj(testing::z_up(), "z+"), proj(testing::z_down(), "z-"));
  ASSERT_FALSE(is_meaningless(r));
  EXPECT_TRUE(as_projector(r).is_zero());
}

TEST(Conjunction, DiagonalIndicatorProduct) {
  const auto r = conjunction(proj(diag01({1, 1, 0, 0}), "P"), proj(diag01({0, 1, 1, 0}), "Q"));
  ASSERT_FALSE(is_meaningless(r));
  EXPECT_TRUE(approx_equal<Real>(as_projector(r).matrix(), diag01({0, 1, 0, 0})));
}

TEST(Conjunction, ZUpAndXUpIsMeaningless) {
  // [z+][x+] = [[1/2, 1/2], [0, 0]] while [x+][z+] = [[1/2, 0], [1/2, 0]];
  // the commutator has two entries of magnitude 1/2, Frobenius norm 1/√2.
  const P zp = proj(testing::z_up(), "z+");
  const P xp = proj(testing::x_up(), "x+");
  const auto r = conjunction(zp, xp);
  ASSERT_TRUE(is_meaningless(r));
  EXPECT_NEAR(std::get<Meaningless<Real>>(r).commutator_norm, testing::kRootHalf, 1e-14);
  EXPECT_TRUE(is_meaningless(disjunction(zp, xp)));
}

TEST(Meaningless, PropagatesThroughConnectives) {
  const P zp = proj(testing::z_up(), "z+");
  const P xp = proj(testing::x_up(), "x+");
  const Proposition<Real> bad = conjunction(zp, xp);
  const Proposition<Real> good = zp;
  EXPECT_TRUE(is_meaningless(negation(bad)));
  EXPECT_TRUE(is_meaningless(conjunction(bad, good)));
  EXPECT_TRUE(is_meaningless(disjunction(good, bad)));
  EXPECT_FALSE(is_meaningless(negation(good)));
}

TEST(Disjunction, Examples) {
  const auto full = disjunction(proj(testing::z_up(), "z+"), proj(testing::z_down(), "z-"));
  EXPECT_TRUE(approx_equal<Real>(as_projector(full).matrix(), Op::Identity(2, 2)));
  const auto three = disjunction(proj(diag01({1, 1, 0, 0}), "P"), proj(diag01({0, 1, 1, 0}), "Q"));
  EXPECT_TRUE(approx_equal<Real>(as_projector(three).matrix(), diag01({1, 1, 1, 0})));
}

TEST(IntersectionProjector, Examples) {
  const P zp = proj(testing::z_up(), "z+");
  const P xp = proj(testing::x_up(), "x+");
  // Eigenvalues of [z+] + [x+] are 1 ± 1/√2; neither is 2.
  const auto eig = hermitian_eigensystem<Real>(zp.matrix() + xp.matrix());
  EXPECT_NEAR(eig.values(0), 1 - testing::kRootHalf, 1e-14);
  EXPECT_NEAR(eig.values(1), 1 + testing::kRootHalf, 1e-14);
  EXPECT_TRUE(intersection_projector(zp, xp).is_zero());

  const P q = proj(diag01({0, 1, 1, 0}), "Q");
  EXPECT_TRUE(approx_equal<Real>(intersection_projector(identity_projector<Real>(4), q).matrix(),
                                 q.matrix()));
}

TEST(LogicProperties, CommutingPairsAgreeWithOracleAndObeyDeMorgan) {
  testing::Random rng(23);
  const Tolerance tol;
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = rng.dim(2, 6);
    const Op basis = rng.unitary(dim);
    const unsigned full = (1u << dim) - 1;
    const unsigned ma = static_cast<unsigned>(rng.dim(0, full));
    const unsigned mb = static_cast<unsigned>(rng.dim(0, full));
    const P a = projector_in_basis(basis, ma, "a");
    const P b = projector_in_basis(basis, mb, "b");

    const auto ab = conjunction(a, b, tol);
    const auto ba = conjunction(b, a, tol);
    ASSERT_FALSE(is_meaningless(ab));
    ASSERT_FALSE(is_meaningless(ba));
    EXPECT_TRUE(approx_equal<Real>(as_projector(ab).matrix(), as_projector(ba).matrix(), tol));
    EXPECT_TRUE(approx_equal<Real>(as_projector(ab).matrix(),
                                   intersection_projector(a, b, tol).matrix(), tol));
    // Indicator oracle: the projector selecting basis columns in ma & mb.
    EXPECT_TRUE(approx_equal<Real>(as_projector(ab).matrix(),
                                   projector_in_basis(basis, ma & mb, "").matrix(), tol));
    EXPECT_TRUE(approx_equal<Real>(as_projector(disjunction(a, b, tol)).matrix(),
                                   projector_in_basis(basis, ma | mb, "").matrix(), tol));

    const auto lhs = negation(disjunction(a, b, tol));
    const auto rhs = conjunction(negation(a), negation(b), tol);
    EXPECT_TRUE(approx_equal<Real>(as_projector(lhs).matrix(), as_projector(rhs).matrix(), tol));

    const Op& m = as_projector(ab).matrix();
    EXPECT_LE((m * m - m).norm(), tol.scaled<Real>(dim));
  }
}

// -- PDIs ---------------------------------------------------------------------

DecompositionOfIdentity<Real> spin_z() {
  return validate_pdi<Real>({proj(testing::z_up(), "z+"), proj(testing::z_down(), "z-")}, {});
}

struct Oscillator {
  P p = P(diag01({1, 1, 0, 0}), "P");
  P not_p = P(diag01({0, 0, 1, 1}), "I-P");
  P n0 = P(diag01({1, 0, 0, 0}), "0");
  P n1 = P(diag01({0, 1, 0, 0}), "1");
  P plus = projector_from_ket<Real>(testing::ket({testing::kRootHalf, testing::kRootHalf, 0, 0}),
                                    {}, "+");
  P minus = projector_from_ket<Real>(
      testing::ket({testing::kRootHalf, -testing::kRootHalf, 0, 0}), {}, "-");

  DecompositionOfIdentity<Real> f1() const { return validate_pdi<Real>({p, not_p}, {}); }
  DecompositionOfIdentity<Real> f2() const { return validate_pdi<Real>({n0, n1, not_p}, {}); }
  DecompositionOfIdentity<Real> f3() const { return validate_pdi<Real>({plus, minus, not_p}, {}); }
};

TEST(ValidatePdi, AcceptsSpinAndOscillatorSampleSpaces) {
  EXPECT_EQ(spin_z().size(), 2u);
  EXPECT_EQ(Oscillator{}.f2().size(), 3u);
}

TEST(ValidatePdi, ZUpXUpIsNeitherOrthogonalNorComplete) {
  try {
    validate_pdi<Real>({proj(testing::z_up(), "z+"), proj(testing::x_up(), "x+")}, {});
    FAIL();
  } catch (const PdiError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrthogonal);
    EXPECT_TRUE(e.has(ErrorCode::NotOrthogonal));
    EXPECT_TRUE(e.has(ErrorCode::Incomplete));
  }
}

TEST(ValidatePdi, NamesNotProjectorAndZeroElements) {
  try {
    validate_pdi<Real>({{"ok", diag01({1, 0})}, {"bad", testing::matrix(2, {0, 1, 0, 1})}}, {});
    FAIL();
  } catch (const PdiError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotProjector);
    EXPECT_EQ(e.violations().front().first, 1u);
  }
  EXPECT_EQ(code_of([] {
              validate_pdi<Real>({P(diag01({1, 1}), "I"), zero_projector<Real>(2, "0")}, {});
            }),
            ErrorCode::ZeroElement);
}

TEST(Observable, SpinHalfSz) {
  const Op sz = testing::matrix(2, {0.5, 0, 0, -0.5});
  const auto obs = observable_decomposition<Real>(sz);
  ASSERT_EQ(obs.pairs.size(), 2u);
  EXPECT_NEAR(obs.pairs[0].first, -0.5, 1e-14);
  EXPECT_TRUE(approx_equal<Real>(obs.pairs[0].second.matrix(), diag01({0, 1})));
  EXPECT_NEAR(obs.pairs[1].first, 0.5, 1e-14);
  EXPECT_TRUE(approx_equal<Real>(obs.pairs[1].second.matrix(), diag01({1, 0})));
}

TEST(Observable, DegenerateEigenvaluesMerge) {
  const auto ident = observable_decomposition<Real>(Op::Identity(3, 3));
  ASSERT_EQ(ident.pairs.size(), 1u);
  EXPECT_NEAR(ident.pairs[0].first, 1.0, 1e-14);

  Op d = Op::Zero(3, 3);
  d.diagonal() << 1, 1, 2;
  const auto obs = observable_decomposition<Real>(d);
  ASSERT_EQ(obs.pairs.size(), 2u);
  EXPECT_TRUE(approx_equal<Real>(obs.pairs[0].second.matrix(), diag01({1, 1, 0})));
  EXPECT_TRUE(approx_equal<Real>(obs.pairs[1].second.matrix(), diag01({0, 0, 1})));
}

TEST(Observable, ReconstructsRandomInputWithPlantedDegeneracy) {
  testing::Random rng(29);
  const Tolerance tol;
  for (int trial = 0; trial < 25; ++trial) {
    const Index dim = rng.dim(2, 8);
    const Op v = rng.unitary(dim);
    Op d = Op::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) d(i, i) = static_cast<Real>(i % 3);
    const Op a = v * d * v.adjoint();
    const auto obs = observable_decomposition<Real>(a, tol);
    EXPECT_EQ(obs.pairs.size(), static_cast<std::size_t>(std::min<Index>(dim, 3)));
    EXPECT_LE((obs.reconstruct() - a).norm(), tol.scaled<Real>(dim));
    EXPECT_NO_THROW(obs.decomposition(tol));
  }
}

TEST(Frameworks, OscillatorCompatibility) {
  const Oscillator osc;
  EXPECT_TRUE(frameworks_compatible(osc.f1(), osc.f1()));
  EXPECT_TRUE(frameworks_compatible(osc.f1(), osc.f2()));
  EXPECT_TRUE(frameworks_compatible(osc.f1(), osc.f3()));
  EXPECT_FALSE(frameworks_compatible(osc.f2(), osc.f3()));
  EXPECT_FALSE(frameworks_compatible(osc.f3(), osc.f2()));
  EXPECT_EQ(code_of([&] { frameworks_compatible(osc.f1(), spin_z()); }),
            ErrorCode::DimensionMismatch);
}

TEST(CommonRefinement, RefinesCoarseOscillatorFramework) {
  const Oscillator osc;
  const auto r = common_refinement(osc.f1(), osc.f2());
  ASSERT_EQ(r.size(), 3u);
  const auto f2 = osc.f2();
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_TRUE(approx_equal<Real>(r[j].matrix(), f2[j].matrix())) << j;
    EXPECT_EQ(r[j].label(), f2[j].label());
  }
  const auto self = common_refinement(osc.f2(), osc.f2());
  EXPECT_EQ(self.size(), 3u);
  EXPECT_EQ(code_of([&] { common_refinement(osc.f2(), osc.f3()); }), ErrorCode::Incompatible);
}

TEST(CommonRefinement, RefinesBothInputsOnRandomCommutingFrameworks) {
  testing::Random rng(31);
  const Tolerance tol;
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = rng.dim(2, 6);
    const Op basis = rng.unitary(dim);
    // Two random partitions of the basis columns.
    auto partition = [&](int parts) {
      std::vector<unsigned> masks(static_cast<std::size_t>(parts), 0u);
      for (Index k = 0; k < dim; ++k) masks[static_cast<std::size_t>(rng.dim(0, parts - 1))] |= 1u << k;
      std::vector<P> ps;
      for (std::size_t i = 0; i < masks.size(); ++i) {
        if (masks[i]) ps.push_back(projector_in_basis(basis, masks[i], "e" + std::to_string(i)));
      }
      return validate_pdi<Real>(std::move(ps), tol);
    };
    const auto s1 = partition(2);
    const auto s2 = partition(3);
    const auto r = common_refinement(s1, s2, tol);
    for (const auto* s : {&s1, &s2}) {
      for (const auto& p : s->elements()) {
        Op sum = Op::Zero(dim, dim);
        for (const auto& q : r.elements()) {
          if ((p.matrix() * q.matrix()).norm() > tol.scaled<Real>(dim)) sum += q.matrix();
        }
        EXPECT_TRUE(approx_equal<Real>(sum, p.matrix(), tol));
      }
    }
  }
}

TEST(EventAlgebra, SpinAlgebraHasFourElements) {
  const auto e = event_algebra(spin_z());
  ASSERT_EQ(e.size(), 4u);
  EXPECT_TRUE(e.contains(zero_projector<Real>(2)));
  EXPECT_TRUE(e.contains(identity_projector<Real>(2)));
  EXPECT_TRUE(e.contains(proj(testing::z_down(), "z-")));
}

TEST(EventAlgebra, SizesAndMembership) {
  const Oscillator osc;
  const auto e2 = event_algebra(osc.f2());
  EXPECT_EQ(e2.size(), 8u);
  EXPECT_TRUE(e2.contains(osc.p));
  EXPECT_FALSE(e2.contains(osc.plus));
  const auto e1 = event_algebra(osc.f1());
  EXPECT_FALSE(e1.contains(osc.n0));
  EXPECT_FALSE(e1.contains(osc.n1));
  for (const auto& a : e2.elements()) {
    for (const auto& b : e2.elements()) EXPECT_TRUE(commute(a.projector, b.projector));
  }
}

TEST(EventAlgebra, TooLargeBase) {
  std::vector<P> ps;
  for (Index k = 0; k < 17; ++k) {
    ps.push_back(projector_from_ket<Real>(basis_ket<Real>(17, k), {}, "n" + std::to_string(k)));
  }
  const auto pdi = validate_pdi<Real>(std::move(ps), {});
  EXPECT_EQ(code_of([&] { event_algebra(pdi); }), ErrorCode::TooLarge);
}

}  // namespace
}  // namespace hlab

#include <gtest/gtest.h>

#include "edmsnl/edm_core.hpp"
#include "support.hpp"

using namespace edmsnl;
using namespace edmsnl::test;

TEST(EdmCore, KOfTwoPoints) {
  Matrix P(2, 2);
  P << 0, 0, 3, 4;
  const Matrix D = kOp(P * P.transpose());
  EXPECT_DOUBLE_EQ(D(0, 1), 25.0);
  EXPECT_DOUBLE_EQ(D(1, 0), 25.0);
  EXPECT_DOUBLE_EQ(D(0, 0), 0.0);
}

TEST(EdmCore, KAdjointByHand) {
  Matrix D(3, 3);
  D << 0, 1, 4, 1, 0, 9, 4, 9, 0;
  Matrix expected(3, 3);
  expected << 10, -2, -8, -2, 20, -18, -8, -18, 26;
  EXPECT_TRUE(kAdj(D).isApprox(expected));
}

TEST(EdmCore, KDaggerOfUnitSegment) {
  Matrix E(2, 2);
  E << 0, 1, 1, 0;
  Matrix B(2, 2);
  B << 0.25, -0.25, -0.25, 0.25;
  EXPECT_TRUE(kDagger(E).isApprox(B));
}

TEST(EdmCore, AdjointPairs) {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 12; ++n) {
    const Matrix B = randomSymmetric(rng, n), D = randomSymmetric(rng, n);
    EXPECT_LT(relErr(inner(kOp(B), D), inner(B, kAdj(D))), 1e-12);
    EXPECT_LT(relErr(inner(de(B), D), inner(B, deAdj(D))), 1e-12);
  }
}

TEST(EdmCore, KDaggerInvertsOnHollowAndProjectsOnGram) {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 10; ++n) {
    const Matrix D = randomHollow(rng, n);
    EXPECT_LT((kOp(kDagger(D)) - D).norm(), 1e-11 * (1 + D.norm()));
    const Matrix B = randomSymmetric(rng, n), J = jProject(n);
    EXPECT_LT((kDagger(kOp(B)) - J * B * J).norm(), 1e-11 * (1 + B.norm()));
  }
}

TEST(EdmCore, SvecIsometry) {
  std::mt19937_64 rng(3);
  const Matrix A = randomSymmetric(rng, 5), B = randomSymmetric(rng, 5);
  EXPECT_NEAR(svec(A).dot(svec(B)), (A * B).trace(), 1e-12);
  EXPECT_TRUE(sMat(svec(A)).isApprox(A));
  EXPECT_EQ(svec(A).size(), triangular(5));
  EXPECT_EQ(orderFromTriangular(15), 5);
  EXPECT_THROW(orderFromTriangular(14), InvalidArgument);
}

TEST(EdmCore, VecIsColumnMajor) {
  Matrix M(2, 3);
  M << 1, 2, 3, 4, 5, 6;
  Vector v = vecM(M);
  EXPECT_EQ(v(1), 4);
  EXPECT_EQ(v(2), 2);
  EXPECT_TRUE(matV(v, 2, 3).isApprox(M));
}

TEST(EdmCore, BlockOperators) {
  BlockPartition part({2, 3, 1});
  EXPECT_EQ(part.order(), 6);
  EXPECT_EQ(part.offset(2), 5);
  std::mt19937_64 rng(5);
  const Matrix S = randomSymmetric(rng, 6);
  const Matrix T = randomSymmetric(rng, 3);
  EXPECT_NEAR(inner(sblkDiag(part, 1, S), T), inner(S, sBlkDiagAdj(part, 1, T)), 1e-12);
  const Matrix G = randomMatrix(rng, 2, 3);
  EXPECT_NEAR(inner(sblkOff(part, 0, 1, S), G), inner(S, sBlkOffAdj(part, 0, 1, G)), 1e-12);
  EXPECT_THROW(BlockPartition({2, -1}), InvalidArgument);
}

TEST(EdmCore, EdgePatternAdjoint) {
  Matrix H = Matrix::Zero(4, 4);
  H(0, 2) = H(2, 0) = 1;
  H(1, 3) = H(3, 1) = 1;
  EdgePattern p(H);
  ASSERT_EQ(p.size(), 2);
  EXPECT_EQ(p.positions()[0], std::make_pair(0, 2));
  EXPECT_TRUE(p.indicator().isApprox(H));
  std::mt19937_64 rng(9);
  const Matrix S = randomSymmetric(rng, 4);
  Vector v(2);
  v << 0.3, -1.2;
  EXPECT_NEAR(p.svec(S).dot(v), inner(S, p.sMat(v)), 1e-14);
  EXPECT_NEAR(p.svec(S)(0), std::sqrt(2.0) * S(0, 2), 1e-15);
}

TEST(EdmCore, Predicates) {
  Matrix D(2, 2);
  D << 0, 1, 1, 0;
  EXPECT_TRUE(isHollow(D));
  EXPECT_TRUE(isSymmetric(D));
  EXPECT_FALSE(isCentered(D));
  EXPECT_TRUE(isCentered(kDagger(D), 1e-14));
}

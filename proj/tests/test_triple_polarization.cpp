#include <gtest/gtest.h>

#include <random>

#include "folded/triple_polarization.hpp"

using namespace folded;

namespace {

Mat4 standard_omega() {
  Mat4 W = Mat4::Zero();
  W(0, 1) = 1;
  W(1, 0) = -1;
  W(2, 3) = 1;
  W(3, 2) = -1;
  return W;
}

Mat4 random_spd(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Mat4 X;
  for (int i = 0; i < 16; ++i) X.data()[i] = n(rng);
  return X * X.transpose() + 0.5 * Mat4::Identity();
}

Mat4 random_antisym(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Mat4 X;
  for (int i = 0; i < 16; ++i) X.data()[i] = n(rng);
  return X - X.transpose();
}

bool is_spd(const Mat4& S) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (S + S.transpose()));
  return es.eigenvalues().minCoeff() > 0;
}

}  // namespace

TEST(Skew, StandardStructures) {
  auto dec = skew_endomorphism(Mat4::Identity(), standard_omega(), false);
  Mat4 J0 = standard_omega().transpose();
  EXPECT_LT((dec.A - J0).norm(), 1e-15);
  EXPECT_NEAR(dec.eigenPairs[0].magnitude, 1.0, 1e-14);
  EXPECT_NEAR(dec.eigenPairs[1].magnitude, 1.0, 1e-14);
}

TEST(Skew, DegenerateGapIsReportedOnlyWhenAsked) {
  // the standard pair has equal magnitudes: splitting is degenerate
  EXPECT_THROW(
      {
        try {
          skew_endomorphism(Mat4::Identity(), standard_omega());
          throw Error(ErrorKind::Input, "no throw");
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::DegenerateSplitting) throw;
        }
      },
      Error);
}

TEST(Skew, BlockDiagonalPicksSmallPlane) {
  Mat4 W = Mat4::Zero();
  W(0, 1) = 0.1;
  W(1, 0) = -0.1;
  W(2, 3) = 1;
  W(3, 2) = -1;
  auto dec = skew_endomorphism(Mat4::Identity(), W);
  EXPECT_NEAR(dec.eigenPairs[0].magnitude, 0.1, 1e-14);
  // E plane spans the first two coordinates
  EXPECT_NEAR(dec.Eplane.bottomRows<2>().norm(), 0.0, 1e-12);
  EXPECT_NEAR(dec.Fplane.topRows<2>().norm(), 0.0, 1e-12);
}

TEST(Skew, AntisymmetryForRandomMetrics) {
  std::mt19937 rng(11);
  for (int k = 0; k < 200; ++k) {
    Mat4 g = random_spd(rng), W = random_antisym(rng);
    auto dec = skew_endomorphism(g, W);
    Mat4 gA = g * dec.A;
    EXPECT_LT((gA + gA.transpose()).norm(), 1e-10 * std::max(1.0, gA.norm()));
    // planes are g-orthogonal and omega-orthogonal
    Eigen::Matrix2d cross = dec.Eplane.transpose() * g * dec.Fplane;
    EXPECT_LT(cross.norm(), 1e-9);
    Eigen::Matrix2d wcross = dec.Eplane.transpose() * W * dec.Fplane;
    EXPECT_LT(wcross.norm(), 1e-9);
  }
}

TEST(Polarize, AlreadyCompatibleAndScaled) {
  Mat4 W = Mat4::Zero();
  W(0, 1) = 0.5;
  W(1, 0) = -0.5;
  W(2, 3) = 2;
  W(3, 2) = -2;
  auto t = compatible_triple(Mat4::Identity(), W);
  EXPECT_LT((t.J - standard_omega().transpose()).norm(), 1e-14);
  auto t2 = compatible_triple(Mat4::Identity(), 7.5 * W);
  EXPECT_LT((t2.J - t.J).norm(), 1e-12);
}

TEST(Polarize, NegativeEBlockGivesReversedStructure) {
  // E block -0.1 * Jtilde, F block positive
  Mat4 W = Mat4::Zero();
  W(0, 1) = -0.1;
  W(1, 0) = 0.1;
  W(2, 3) = 1;
  W(3, 2) = -1;
  auto dec = skew_endomorphism(Mat4::Identity(), W);
  auto t = polarize(dec, Mat4::Identity());
  EXPECT_LT(t.detOmega, 0.0);
  Eigen::Matrix2d Jt;
  Jt << 0, -1, 1, 0;  // Jtilde e_K = e_L
  const double s = t.detOmega > 0 ? 1.0 : -1.0;
  EXPECT_LT((t.J.topLeftCorner<2, 2>() - s * Jt).norm(), 1e-12);
}

TEST(Polarize, RandomTriplesAreCompatible) {
  std::mt19937 rng(12);
  int used = 0;
  for (int k = 0; k < 1500 && used < 1000; ++k) {
    Mat4 g = random_spd(rng), W = random_antisym(rng);
    auto dec = skew_endomorphism(g, W);
    if (dec.eigenPairs[1].magnitude - dec.eigenPairs[0].magnitude < 1e-3) continue;
    ++used;
    auto t = polarize(dec, g);
    const double scale = std::max(1.0, t.g.norm());
    EXPECT_LT((t.J * t.J + Mat4::Identity()).norm(), 1e-9);
    EXPECT_LT((t.J.transpose() * t.g * t.J - t.g).norm(), 1e-9 * scale);
    EXPECT_LT((t.omega - W).norm(), 1e-9 * std::max(1.0, W.norm()));
    EXPECT_TRUE(is_spd(W * t.J));
    EXPECT_LT((t.g - (W * t.J)).norm(), 1e-9 * scale);
    // scale invariance
    auto t2 = polarize(skew_endomorphism(g, 3.7 * W), g);
    EXPECT_LT((t2.J - t.J).norm(), 1e-10 * std::max(1.0, t.J.norm()));
  }
  EXPECT_EQ(used, 1000);
}

TEST(FoldLimit, OneSidedLimitsAndRate) {
  Mat4 P;
  P << 0.3, 0.1, -0.2, 0.05, 0.1, -0.1, 0.15, 0.0, -0.2, 0.15, 0.2, 0.1, 0.05, 0.0, 0.1, -0.25;
  std::vector<double> d;
  for (int k = 2; k <= 14; ++k) d.push_back(std::pow(10.0, -0.5 * k));
  auto plus = fold_limit_check(Side::Plus, d, P);
  auto minus = fold_limit_check(Side::Minus, d, P);
  EXPECT_GE(plus.rate, 0.9);
  EXPECT_GE(minus.rate, 0.9);
  EXPECT_LT((plus.nearest.bottomRightCorner<2, 2>() - minus.nearest.bottomRightCorner<2, 2>()).norm(), 1e-6);
  EXPECT_LT((plus.nearest.topLeftCorner<2, 2>() + minus.nearest.topLeftCorner<2, 2>()).norm(), 1e-6);
}

TEST(FoldLimit, OnesidedMatrixMatchesPositiveSide) {
  // J+ sends d/dr to R
  Mat4 J = onesided_matrix(Side::Plus, FoldPoint(0.6, cplx(0, 0.8)));
  EXPECT_NEAR(J(1, 0), 1.0, 1e-14);
  EXPECT_NEAR(J(3, 2), 1.0, 1e-14);
  Mat4 Jm = onesided_matrix(Side::Minus, FoldPoint(0.6, cplx(0, 0.8)));
  EXPECT_NEAR(Jm(1, 0), -1.0, 1e-14);
}

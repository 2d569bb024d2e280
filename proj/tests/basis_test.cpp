#include "spfts/basis.hpp"

#include <gtest/gtest.h>

#include "spfts/errors.hpp"
#include "spfts/rng.hpp"

using namespace spfts;

TEST(FourierBasis, ConstantFunctionNormalization) {
  const auto ctx = build_fourier_basis(1, 5);
  ASSERT_EQ(ctx->q, 1);
  const Eigen::MatrixXd gram =
      ctx->eval.transpose() * ctx->quad_weights.asDiagonal() * ctx->eval;
  EXPECT_NEAR(gram(0, 0), 1.0, 1e-12);
}

TEST(FourierBasis, DiscreteOrthonormality) {
  EXPECT_LT(build_fourier_basis(3, 101)->orthonormality_defect(), 1e-8);
  EXPECT_LT(build_fourier_basis(20, 101)->orthonormality_defect(), 1e-8);
}

TEST(FourierBasis, GridTooSmall) {
  EXPECT_THROW(build_fourier_basis(3, 12), ConfigError);
  EXPECT_THROW(build_fourier_basis(0, 10), ConfigError);
}

TEST(ProjectCurve, ReproducesBasisElements) {
  const auto ctx = build_fourier_basis(4, 101);
  const Curve c = project_curve(ctx->eval.col(1), ctx);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(4);
  expected[1] = 1.0;
  EXPECT_LT((c.coeffs - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ProjectCurve, ZeroSamples) {
  const auto ctx = build_fourier_basis(4, 101);
  const Curve c = project_curve(Eigen::VectorXd::Zero(101), ctx);
  EXPECT_LT(c.coeffs.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProjectCurve, Linearity) {
  const auto ctx = build_fourier_basis(4, 101);
  const Eigen::VectorXd samples = ctx->eval.col(0) + 2.0 * ctx->eval.col(2);
  const Curve c = project_curve(samples, ctx);
  Eigen::VectorXd expected(4);
  expected << 1.0, 0.0, 2.0, 0.0;
  EXPECT_LT((c.coeffs - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ProjectCurve, RejectsNonFinite) {
  const auto ctx = build_fourier_basis(2, 9);
  Eigen::VectorXd samples = Eigen::VectorXd::Zero(9);
  samples[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(project_curve(samples, ctx), DataError);
}

TEST(InnerProduct, OrthonormalCoordinates) {
  const auto ctx = build_fourier_basis(3, 101);
  Curve e1{Eigen::VectorXd::Zero(3), ctx};
  Curve e2{Eigen::VectorXd::Zero(3), ctx};
  e1.coeffs[0] = 1.0;
  e2.coeffs[1] = 1.0;
  EXPECT_DOUBLE_EQ(inner_product(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(inner_product(e1, e2), 0.0);
}

TEST(InnerProduct, ContextMismatch) {
  const auto ctx_a = build_fourier_basis(3, 101);
  const auto ctx_b = build_fourier_basis(4, 101);
  const Curve f{Eigen::VectorXd::Ones(3), ctx_a};
  const Curve g{Eigen::VectorXd::Ones(4), ctx_b};
  EXPECT_THROW(inner_product(f, g), ConfigError);
}

// Parseval: coefficient inner products agree with grid quadrature of the
// reconstructions.
TEST(InnerProduct, MatchesQuadratureOracle) {
  const auto ctx = build_fourier_basis(5, 101);
  RandomStream rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(5), b(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.next_normal();
      b[i] = rng.next_normal();
    }
    const Curve f{a, ctx}, g{b, ctx};
    const Eigen::VectorXd fu = reconstruct(f), gu = reconstruct(g);
    const double quad = (ctx->quad_weights.array() * fu.array() * gu.array()).sum();
    EXPECT_NEAR(inner_product(f, g), quad, 1e-8);
  }
}

TEST(ProjectCurve, ProjectionAfterReconstructionIsIdentity) {
  const auto ctx = build_fourier_basis(6, 101);
  RandomStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd coeffs(6);
    for (int i = 0; i < 6; ++i) coeffs[i] = rng.next_normal();
    const Curve back = project_curve(reconstruct(coeffs, *ctx), ctx);
    EXPECT_LT((back.coeffs - coeffs).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FunctionalPanel, ValidatesDimensions) {
  const auto ctx = build_fourier_basis(2, 9);
  FunctionalPanel panel;
  panel.context = ctx;
  panel.slices = {Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(3, 4)};
  EXPECT_NO_THROW(panel.validate());
  panel.slices[1] = Eigen::MatrixXd::Zero(3, 5);
  EXPECT_THROW(panel.validate(), ConfigError);
}

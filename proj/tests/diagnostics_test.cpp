#include "spfts/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "spfts/errors.hpp"
#include "spfts/rng.hpp"
#include "spfts/serialize.hpp"
#include "spfts/spectral.hpp"

using namespace spfts;

TEST(SpuriousVector, DirectEvaluation) {
  const Eigen::VectorXd d = spurious_vector(1, 2);
  EXPECT_NEAR(d[0], 0.0, 1e-15);  // cos(pi/2)
  EXPECT_NEAR(d[1], -1.0, 1e-15); // cos(pi)
}

TEST(SpuriousVector, NearUnitNorm) {
  const int T = 200;
  const Eigen::VectorXd d = spurious_vector(1, T);
  EXPECT_LT(std::abs(d.squaredNorm() - 1.0), 5.0 / T);
}

TEST(SpuriousVector, NearOrthogonality) {
  const int T = 200;
  for (int j = 1; j <= 4; ++j) {
    for (int k = j + 1; k <= 5; ++k) {
      EXPECT_LT(std::abs(spurious_vector(j, T).dot(spurious_vector(k, T))), 3.0 / T);
    }
  }
}

TEST(SpuriousVector, MatchesLeftSingularVectors) {
  const int T = 200;
  const MThetaSvd svd = mtheta_svd(T);
  for (int k = 1; k <= 5; ++k) {
    const Eigen::VectorXd d = spurious_vector(k, T);
    EXPECT_GE(std::abs(d.dot(svd.W.col(k - 1))) / d.norm(), 1.0 - 10.0 / T);
  }
}

TEST(SpuriousVector, RangeChecks) {
  EXPECT_THROW(spurious_vector(0, 10), ConfigError);
  EXPECT_THROW(spurious_vector(10, 10), ConfigError);
}

TEST(Alignment, SelfAndOrthogonal) {
  const int T = 50;
  Eigen::VectorXd d = spurious_vector(3, T);
  d.normalize();
  EXPECT_NEAR(alignment(d, 3), 1.0, 1e-12);

  // build a unit vector orthogonal to d_3
  Eigen::VectorXd u = spurious_vector(1, T);
  u -= u.dot(d) * d;
  u.normalize();
  EXPECT_LT(alignment(u, 3), 0.05);
}

TEST(Alignment, RequiresUnitNorm) {
  EXPECT_THROW(alignment(Eigen::VectorXd::Ones(10), 1), ConfigError);
}

// Null distribution: a random unit vector aligns at scale sqrt(2/(pi T)).
TEST(Alignment, NullDistribution) {
  const int T = 200, draws = 1000;
  RandomStream rng(404);
  double sum = 0.0;
  int below = 0;
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd u(T);
    for (int t = 0; t < T; ++t) u[t] = rng.next_normal();
    u.normalize();
    const double a = alignment(u, 1);
    sum += a;
    if (a < 0.2) ++below;
  }
  EXPECT_NEAR(sum / draws, std::sqrt(2.0 / (M_PI * T)), 0.01);
  EXPECT_GE(below, static_cast<int>(0.99 * draws));
}

TEST(TheoryEigenvalue, UnitNormalizationAndHomogeneity) {
  EXPECT_NEAR(theory_eigenvalue(1, M_PI, 1.0, 1.0), 1.0, 1e-14);
  const double base = theory_eigenvalue(2, 100.0, 7.0, 0.3);
  EXPECT_NEAR(theory_eigenvalue(2, 200.0, 7.0, 0.3), 4.0 * base, 1e-10);
  EXPECT_THROW(theory_eigenvalue(1, 10.0, 1.0, 0.0), ConfigError);
}

TEST(TheoryShare, BaselConstants) {
  EXPECT_NEAR(theory_share(1), 6.0 / (M_PI * M_PI), 1e-15);
  EXPECT_NEAR(theory_share(1), 0.607927, 1e-6);
  EXPECT_NEAR(theory_share(2), 0.151982, 1e-6);
  double partial = 0.0;
  for (int k = 1; k <= 10000; ++k) partial += theory_share(k);
  EXPECT_LT(std::abs(partial - 1.0), 1e-3);
}

TEST(EigenvectorAcf, SmoothCosineIsPersistent) {
  Eigen::VectorXd d = spurious_vector(1, 200);
  d.normalize();
  EXPECT_GT(eigenvector_acf(d, 1)[0], 0.95);
}

TEST(EigenvectorAcf, WhiteNoiseBand) {
  const int T = 200, draws = 400;
  RandomStream rng(505);
  int inside = 0;
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd u(T);
    for (int t = 0; t < T; ++t) u[t] = rng.next_normal();
    u.normalize();
    if (std::abs(eigenvector_acf(u, 1)[0]) < 2.0 / std::sqrt(static_cast<double>(T))) ++inside;
  }
  // nominal 95% coverage; accept a generous band around it
  EXPECT_GE(inside, static_cast<int>(0.90 * draws));
  EXPECT_LE(inside, static_cast<int>(0.99 * draws));
}

TEST(EigenvectorAcf, AlternatingSeries) {
  Eigen::VectorXd u(100);
  for (int t = 0; t < 100; ++t) u[t] = (t % 2 == 0) ? 1.0 : -1.0;
  EXPECT_NEAR(eigenvector_acf(u, 1)[0], -1.0, 0.02);
}

TEST(EigenvectorAcf, ConstantSeriesSignalled) {
  EXPECT_THROW(eigenvector_acf(Eigen::VectorXd::Ones(50), 1), NumericError);
}

namespace {

EigenDecomposition decomposition_of(const Eigen::MatrixXd& s, int k_max) {
  return eigendecompose(GramMatrix{s}, k_max);
}

}  // namespace

TEST(BuildReport, FlagsDegenerateSpectrum) {
  const EigenDecomposition eig = decomposition_of(Eigen::MatrixXd::Zero(10, 10), 3);
  ReportInputs in;
  in.T = 10;
  in.p = 2;
  in.k_max = 3;
  in.acf_lags = 4;
  const SpectralReport rep = build_report(eig, in);
  EXPECT_TRUE(rep.degenerate);
  EXPECT_EQ(rep.alignments[0], 0.0);
}

TEST(BuildReport, JsonRoundTripIsLossless) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(12, 12);
  RandomStream rng(88);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j <= i; ++j) {
      s(i, j) = rng.next_normal();
      s(j, i) = s(i, j);
    }
  }
  s = (s * s.transpose()).eval();  // PSD
  const EigenDecomposition eig = decomposition_of(s, 4);
  ReportInputs in;
  in.T = 12;
  in.p = 3;
  in.k_max = 4;
  in.trace_ce_omega = 1.25;
  in.acf_lags = 5;
  const SpectralReport rep = build_report(eig, in);
  const SpectralReport back = spectral_report_from_json(to_json(rep));
  EXPECT_EQ(rep.T, back.T);
  EXPECT_EQ(rep.eigenvalues, back.eigenvalues);
  EXPECT_EQ(rep.alignments, back.alignments);
  EXPECT_EQ(rep.variance_shares, back.variance_shares);
  EXPECT_EQ(rep.acf, back.acf);
}

TEST(BuildReport, ScaleInvarianceOfAlignmentsAndShares) {
  Eigen::MatrixXd g(15, 15);
  RandomStream rng(91);
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) g(i, j) = rng.next_normal();
  }
  const Eigen::MatrixXd s = g * g.transpose();

  ReportInputs in;
  in.T = 15;
  in.p = 2;
  in.k_max = 4;
  in.acf_lags = 5;
  const SpectralReport rep_a = build_report(decomposition_of(s, 4), in);

  // Dyadic panel scale: every float op scales exactly, so the invariance is
  // bit-exact (panel x2 means Gram x4).
  const SpectralReport rep_dyadic = build_report(decomposition_of(4.0 * s, 4), in);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(rep_a.alignments[k], rep_dyadic.alignments[k]);
    EXPECT_EQ(rep_a.variance_shares[k], rep_dyadic.variance_shares[k]);
    EXPECT_EQ(rep_dyadic.eigenvalues[k], 4.0 * rep_a.eigenvalues[k]);
  }

  // General scale: invariant up to eigensolver rounding.
  const double scale_sq = 7.5 * 7.5;
  const SpectralReport rep_b = build_report(decomposition_of(scale_sq * s, 4), in);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(rep_a.alignments[k], rep_b.alignments[k], 1e-12);
    EXPECT_NEAR(rep_a.variance_shares[k], rep_b.variance_shares[k], 1e-12);
    EXPECT_NEAR(rep_b.eigenvalues[k], scale_sq * rep_a.eigenvalues[k],
                1e-10 * rep_b.eigenvalues[k]);
  }
}

TEST(BuildReport, SharesSumToOneAtFullK) {
  Eigen::MatrixXd g(10, 10);
  RandomStream rng(92);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) g(i, j) = rng.next_normal();
  }
  const Eigen::MatrixXd s = g * g.transpose();
  const EigenDecomposition eig = decomposition_of(s, 10);
  ReportInputs in;
  in.T = 10;
  in.p = 1;
  in.k_max = 10;
  in.acf_lags = 3;
  const SpectralReport rep = build_report(eig, in);
  double total = 0.0;
  for (double share : rep.variance_shares) total += share;
  EXPECT_NEAR(total, 1.0, 1e-10);
  for (std::size_t k = 1; k < rep.variance_shares.size(); ++k) {
    EXPECT_LE(rep.variance_shares[k], rep.variance_shares[k - 1] + 1e-15);
  }
}

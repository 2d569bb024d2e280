// End-to-end acceptance suite. Each test prints one PASS/FAIL line; the final
// test audits the l1/l2 sandwich over every eigenvalue vector recorded while
// the suite ran.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <vector>

#include "spfts/diagnostics.hpp"
#include "spfts/dgp.hpp"
#include "spfts/experiment.hpp"
#include "spfts/rank.hpp"
#include "spfts/rng.hpp"
#include "spfts/spectral.hpp"
#include "spfts/stats.hpp"

using namespace spfts;

namespace {

// ---- global spectrum audit -------------------------------------------------

struct SpectrumAudit {
  std::mutex mu;
  long recorded = 0;
  long violations = 0;
};

SpectrumAudit& audit() {
  static SpectrumAudit instance;
  return instance;
}

void record_spectrum(const Eigen::VectorXd& values) {
  auto& a = audit();
  std::lock_guard<std::mutex> lock(a.mu);
  ++a.recorded;
  if (!l1l2_sandwich_holds(values)) ++a.violations;
}

void record_spectrum(const std::vector<double>& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  record_spectrum(v);
}

// ---- reporting helpers -----------------------------------------------------

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(const char* name, bool pass, double seconds) {
  std::printf("[ACCEPTANCE] %-36s %s  (%.1fs)\n", name, pass ? "PASS" : "FAIL", seconds);
  std::fflush(stdout);
}

// ---- shared fixtures ---------------------------------------------------------

ModelConfig shipped_model(CovarianceSetting cov, LoadingScheme scheme, int K,
                          std::uint64_t seed) {
  ModelConfig cfg;
  cfg.T = 200;
  cfg.p = 100;
  cfg.q = 20;
  cfg.K = K;
  cfg.covariance.setting = cov;
  cfg.loadings.scheme = scheme;
  cfg.seed = seed;
  return cfg;
}

SimulateSummary run_cell(const ModelConfig& model, int replicates, int k_max) {
  SimulateConfig cfg;
  cfg.model = model;
  cfg.replicates = replicates;
  cfg.k_max = k_max;
  cfg.acf_lags = 1;
  const SimulateSummary summary = run_simulate(cfg, false);
  for (const auto& rep : summary.reports) record_spectrum(rep.eigenvalues);
  return summary;
}

// Setting 1 at the published scale; shared by three criteria.
const SimulateSummary& setting1_reference() {
  static const SimulateSummary summary = run_cell(
      shipped_model(CovarianceSetting::delocalized_flat, LoadingScheme::full_rank, 50, 20240601),
      50, 5);
  return summary;
}

std::vector<double> alignment_sample(const SimulateSummary& summary, int k) {
  std::vector<double> out;
  for (const auto& rep : summary.reports) out.push_back(rep.alignments[static_cast<std::size_t>(k - 1)]);
  return out;
}

}  // namespace

// Criterion: closed-form SVD of the centered cumulation matrix is exact.
TEST(Acceptance, SvdClosedFormExactness) {
  Stopwatch timer;
  bool pass = true;
  for (int T : {8, 64, 200}) {
    const MThetaSvd svd = mtheta_svd(T);
    const Eigen::MatrixXd target = centering_matrix(T) * cumulation_matrix(T).transpose();
    Eigen::MatrixXd rec = svd.W * svd.sigma.asDiagonal() * svd.V.transpose();
    const double rec_err = (target - rec).norm();
    const double w_defect =
        (svd.W.transpose() * svd.W - Eigen::MatrixXd::Identity(T, T)).cwiseAbs().maxCoeff();
    const double v_defect =
        (svd.V.transpose() * svd.V - Eigen::MatrixXd::Identity(T, T)).cwiseAbs().maxCoeff();
    EXPECT_LT(rec_err, 1e-8) << "T=" << T;
    EXPECT_LT(w_defect, 1e-10) << "T=" << T;
    EXPECT_LT(v_defect, 1e-10) << "T=" << T;
    EXPECT_EQ(svd.sigma[T - 1], 0.0) << "T=" << T;
    pass = pass && rec_err < 1e-8 && w_defect < 1e-10 && v_defect < 1e-10 &&
           svd.sigma[T - 1] == 0.0;
    record_spectrum(svd.sigma);
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 1.0);
  report("svd_closed_form", pass && elapsed < 1.0, elapsed);
}

// Criterion: blockwise adjoint/trace/HS identities at 1e-12 relative accuracy.
TEST(Acceptance, OperatorProductIdentities) {
  Stopwatch timer;
  RandomStream rng(7001);
  bool pass = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 2 + static_cast<int>(rng.next_u64() % 7);
    const int k = 1 + static_cast<int>(rng.next_u64() % 4);
    const auto ctx = build_fourier_basis(q, 4 * q + 1);
    auto random_matrix = [&](int rows, int cols) {
      Eigen::MatrixXd m(rows, cols);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
      }
      return m;
    };
    const KernelOperator c1{random_matrix(q, q), ctx};
    const KernelOperator c2{random_matrix(q, q), ctx};
    OperatorMatrix om = OperatorMatrix::zero(k, k, ctx);
    for (auto& b : om.blocks) b = random_matrix(q, q);
    const OperatorMatrix s = sandwich(c1, om, c2);

    const Eigen::MatrixXd lhs = adjoint(s).assemble();
    const Eigen::MatrixXd rhs = sandwich(KernelOperator{c2.mat.transpose(), ctx}, adjoint(om),
                                         KernelOperator{c1.mat.transpose(), ctx})
                                    .assemble();
    const double adj_err =
        (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
    const double tr_err =
        std::abs(trace(s) - s.assemble().trace()) / std::max(1.0, std::abs(trace(s)));
    const double hs_err = std::abs(hs_norm(s) - s.assemble().norm()) / std::max(1.0, hs_norm(s));
    EXPECT_LT(adj_err, 1e-12);
    EXPECT_LT(tr_err, 1e-12);
    EXPECT_LT(hs_err, 1e-12);
    pass = pass && adj_err < 1e-12 && tr_err < 1e-12 && hs_err < 1e-12;
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 1.0);
  report("operator_product_identities", pass && elapsed < 1.0, elapsed);
}

// Criterion: T x T Gram and (pq) x (pq) sample covariance share nonzero spectra.
TEST(Acceptance, GramCovarianceDuality) {
  Stopwatch timer;
  bool pass = true;
  for (int p = 2; p <= 5; ++p) {
    for (int T = 2; T <= 5; ++T) {
      for (int q = 2; q <= 5; ++q) {
        ModelConfig cfg;
        cfg.T = T;
        cfg.p = p;
        cfg.q = q;
        cfg.K = 2;
        cfg.seed = 1000 + static_cast<std::uint64_t>(p * 100 + T * 10 + q);
        const auto ctx = build_fourier_basis(q, 4 * q + 1);
        const SimulationDraw draw = simulate_panel(cfg, ctx);
        const GramMatrix gram = gram_matrix(draw.panel);

        Eigen::MatrixXd stacked = draw.panel.to_coefficient_matrix();
        stacked = stacked.colwise() - stacked.rowwise().mean();
        const Eigen::MatrixXd cov = stacked * stacked.transpose() / static_cast<double>(p);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_gram(gram.S, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_cov(cov, Eigen::EigenvaluesOnly);
        record_spectrum(Eigen::VectorXd(es_gram.eigenvalues().cwiseMax(0.0)));
        const int shared = std::min(T, p * q);
        const Eigen::VectorXd a = es_gram.eigenvalues().tail(shared).reverse();
        const Eigen::VectorXd b = es_cov.eigenvalues().tail(shared).reverse();
        for (int i = 0; i < shared; ++i) {
          if (a[i] > 1e-10 || b[i] > 1e-10) {
            EXPECT_NEAR(a[i], b[i], 1e-8) << "p=" << p << " T=" << T << " q=" << q;
            pass = pass && std::abs(a[i] - b[i]) < 1e-8;
          }
        }
      }
    }
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 5.0);
  report("gram_covariance_duality", pass && elapsed < 5.0, elapsed);
}

// Criterion: Monte Carlo first moment of the quadratic form v' W v.
TEST(Acceptance, BilinearFormFirstMoment) {
  Stopwatch timer;
  const int T = 32, p = 8, q = 4, K = 2, reps = 500;
  const auto ctx = build_fourier_basis(q, 101);
  const CovarianceSpec cov = make_covariance(CovarianceSetting::delocalized_flat, q, ctx);
  const LoadingSpec loadings = make_loadings(LoadingScheme::full_rank, p, K, q, 8101);
  const OperatorMatrix om = build_omega(loadings, ctx);
  const double expected = trace_ce_omega(cov, om);
  const Eigen::VectorXd v = mtheta_svd(T).V.col(0);

  std::vector<double> draws;
  draws.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(9000, static_cast<std::uint64_t>(r));
    std::vector<Eigen::MatrixXd> innovations;
    for (int n = 0; n < q; ++n) {
      Eigen::MatrixXd eps(K, T);
      const double sd = std::sqrt(cov.c[n]);
      for (int k = 0; k < K; ++k) {
        for (int t = 0; t < T; ++t) eps(k, t) = sd * rng.next_normal();
      }
      innovations.push_back(std::move(eps));
    }
    const Eigen::MatrixXd w = w_matrix(innovations, om);
    draws.push_back(v.dot(w * v));
  }
  const double mc_mean = mean(draws);
  const double se = sample_stddev(draws) / std::sqrt(static_cast<double>(reps));
  const bool in_band = std::abs(mc_mean - expected) < 3.0 * se;
  EXPECT_TRUE(in_band) << "mean=" << mc_mean << " expected=" << expected << " se=" << se;

  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 10.0);
  report("bilinear_first_moment", in_band && elapsed < 10.0, elapsed);
}

// Criterion: the delocalized full-rank model reproduces the trigonometric
// eigenvectors, the share law, and the eigenvalue law at the published scale.
TEST(Acceptance, SpuriousRegimeReproduction) {
  Stopwatch timer;
  const SimulateSummary& summary = setting1_reference();

  bool pass = true;
  for (int k = 1; k <= 3; ++k) {
    const double med = summary.median_alignment[static_cast<std::size_t>(k - 1)];
    EXPECT_GE(med, 0.9) << "k=" << k;
    pass = pass && med >= 0.9;
  }
  const double share_gap = std::abs(summary.median_share[0] - 6.0 / (M_PI * M_PI));
  EXPECT_LE(share_gap, 0.1);
  pass = pass && share_gap <= 0.1;

  const double ratio = summary.mean_eigenvalue[0] / summary.mean_theory_eigenvalue[0];
  EXPECT_GE(ratio, 0.8);
  EXPECT_LE(ratio, 1.2);
  pass = pass && ratio >= 0.8 && ratio <= 1.2;

  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 120.0);
  report("spurious_regime_reproduction", pass && elapsed < 120.0, elapsed);
}

// Criterion: two strong factors with low-effective-rank loadings still hit the
// spurious limit under a delocalized innovation covariance.
TEST(Acceptance, FewStrongFactorsStillSpurious) {
  Stopwatch timer;
  const SimulateSummary summary = run_cell(
      shipped_model(CovarianceSetting::delocalized_flat, LoadingScheme::low_eff_rank, 2, 42),
      50, 5);
  bool pass = true;
  for (int k = 1; k <= 3; ++k) {
    const double med = summary.median_alignment[static_cast<std::size_t>(k - 1)];
    EXPECT_GE(med, 0.9) << "k=" << k;
    pass = pass && med >= 0.9;
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 120.0);
  report("few_strong_factors_spurious", pass && elapsed < 120.0, elapsed);
}

// Criterion: localized / low-effective-rank models break away from the limit,
// with rank-sum separation from the delocalized reference.
TEST(Acceptance, NonSpuriousContrast) {
  Stopwatch timer;
  struct Cell {
    const char* name;
    CovarianceSetting cov;
    LoadingScheme scheme;
    int K;
  };
  const std::vector<Cell> cells = {
      {"geometric/full K=2", CovarianceSetting::localized_geometric, LoadingScheme::full_rank, 2},
      {"geometric/low K=2", CovarianceSetting::localized_geometric, LoadingScheme::low_eff_rank, 2},
      {"geometric/low K=10", CovarianceSetting::localized_geometric, LoadingScheme::low_eff_rank, 10},
      {"geometric/low K=50", CovarianceSetting::localized_geometric, LoadingScheme::low_eff_rank, 50},
      {"rank2/full K=2", CovarianceSetting::localized_rank2, LoadingScheme::full_rank, 2},
      {"rank2/low K=2", CovarianceSetting::localized_rank2, LoadingScheme::low_eff_rank, 2},
      {"rank2/low K=10", CovarianceSetting::localized_rank2, LoadingScheme::low_eff_rank, 10},
      {"rank2/low K=50", CovarianceSetting::localized_rank2, LoadingScheme::low_eff_rank, 50},
  };

  const SimulateSummary& reference = setting1_reference();
  bool pass = true;
  for (const auto& cell : cells) {
    const SimulateSummary summary =
        run_cell(shipped_model(cell.cov, cell.scheme, cell.K, 77), 50, 5);
    int k_star = 1;
    double worst = 2.0;
    for (int k = 1; k <= 5; ++k) {
      const double med = summary.median_alignment[static_cast<std::size_t>(k - 1)];
      if (med < worst) {
        worst = med;
        k_star = k;
      }
    }
    const MannWhitneyResult mw =
        mann_whitney_u(alignment_sample(summary, k_star), alignment_sample(reference, k_star));
    EXPECT_LT(worst, 0.8) << cell.name;
    EXPECT_LT(mw.p_value, 0.01) << cell.name << " k*=" << k_star;
    pass = pass && worst < 0.8 && mw.p_value < 0.01;
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 300.0);
  report("non_spurious_contrast", pass && elapsed < 300.0, elapsed);
}

// Criterion: closed-form effective-rank ratio of the low-effective-rank loadings.
TEST(Acceptance, LowRankLoadingClosedForm) {
  Stopwatch timer;
  bool pass = true;
  for (int K : {2, 5, 10, 50}) {
    const LoadingSpec spec = make_loadings(LoadingScheme::low_eff_rank, 100, K, 4, 31 + K);
    const double expected =
        3.0 * std::pow(1.0 - std::pow(2.0, -K), 2) / (1.0 - std::pow(4.0, -K));
    for (const auto& a : spec.A) {
      const Eigen::MatrixXd gram = a.transpose() * a;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
      record_spectrum(Eigen::VectorXd(es.eigenvalues().cwiseMax(0.0)));
      const double ratio_sq = std::pow(es.eigenvalues().sum(), 2) / es.eigenvalues().squaredNorm();
      EXPECT_NEAR(ratio_sq, expected, 1e-8) << "K=" << K;
      pass = pass && std::abs(ratio_sq - expected) < 1e-8;
      if (K == 2) {
        EXPECT_NEAR(ratio_sq, 1.8, 1e-8);
        pass = pass && std::abs(ratio_sq - 1.8) < 1e-8;
      }
    }
  }
  const double elapsed = timer.seconds();
  report("low_rank_closed_form", pass, elapsed);
}

// Criterion: measured effective rank follows the predicted growth order over a
// (q, K) grid; constant-order settings stay flat against the sqrt(qK) driver.
TEST(Acceptance, EffectiveRankScalingOrders) {
  Stopwatch timer;
  const int p = 400;
  const std::vector<int> grid = {5, 10, 20, 40};
  struct SettingSpec {
    const char* name;
    CovarianceSetting cov;
    LoadingScheme scheme;
    const char* order;  // sqrt(qK) | sqrt(q) | sqrt(K) | one
  };
  const std::vector<SettingSpec> settings = {
      {"deloc/full", CovarianceSetting::delocalized_flat, LoadingScheme::full_rank, "sqrt(qK)"},
      {"deloc/low", CovarianceSetting::delocalized_flat, LoadingScheme::low_eff_rank, "sqrt(q)"},
      {"geom/full", CovarianceSetting::localized_geometric, LoadingScheme::full_rank, "sqrt(K)"},
      {"geom/low", CovarianceSetting::localized_geometric, LoadingScheme::low_eff_rank, "one"},
      {"rank2/full", CovarianceSetting::localized_rank2, LoadingScheme::full_rank, "sqrt(K)"},
      {"rank2/low", CovarianceSetting::localized_rank2, LoadingScheme::low_eff_rank, "one"},
  };

  bool pass = true;
  std::uint64_t seed = 55001;
  for (const auto& setting : settings) {
    std::vector<double> xs, ys;
    for (int q : grid) {
      const auto ctx = build_fourier_basis(q, std::max(101, 4 * q + 1));
      const CovarianceSpec cov = make_covariance(setting.cov, q, ctx);
      for (int K : grid) {
        const LoadingSpec loadings = make_loadings(setting.scheme, p, K, q, ++seed);
        const OperatorMatrix om = build_omega(loadings, ctx);
        const double measured = effective_rank_hs(cov, om);
        double order;
        if (std::string(setting.order) == "sqrt(qK)") {
          order = std::sqrt(static_cast<double>(q) * K);
        } else if (std::string(setting.order) == "sqrt(q)") {
          order = std::sqrt(static_cast<double>(q));
        } else if (std::string(setting.order) == "sqrt(K)") {
          order = std::sqrt(static_cast<double>(K));
        } else {
          order = std::sqrt(static_cast<double>(q) * K);  // flatness driver
        }
        xs.push_back(std::log(order));
        ys.push_back(std::log(measured));
      }
    }
    const double slope = ols_slope(xs, ys);
    if (std::string(setting.order) == "one") {
      EXPECT_LT(std::abs(slope), 0.15) << setting.name;
      pass = pass && std::abs(slope) < 0.15;
    } else {
      EXPECT_NEAR(slope, 1.0, 0.15) << setting.name;
      pass = pass && std::abs(slope - 1.0) < 0.15;
    }
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 60.0);
  report("effective_rank_scaling", pass && elapsed < 60.0, elapsed);
}

// Criterion: the persistence probe splits the eigenvector pool at the product
// of the covariance rank and loading rank.
TEST(Acceptance, PersistenceProbeSplit) {
  Stopwatch timer;
  ProbeConfig cfg;
  cfg.model = shipped_model(CovarianceSetting::localized_rank2, LoadingScheme::custom, 10, 6100);
  cfg.model.loadings.product_rank = 3;
  cfg.replicates = 50;
  cfg.k_max = 8;
  const ProbeSummary summary = run_probe(cfg, false);
  EXPECT_EQ(summary.conjectured_split, 6);
  const bool majority = summary.split_hits > cfg.replicates / 2;
  EXPECT_TRUE(majority) << "split hits " << summary.split_hits << "/" << cfg.replicates;
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 120.0);
  report("persistence_probe_split", summary.conjectured_split == 6 && majority && elapsed < 120.0,
         elapsed);
}

// Substituted end-to-end check: a synthetic integrated CSV panel aligns with
// the trigonometric limits; an i.i.d. panel does not.
TEST(Acceptance, PipelineEndToEnd) {
  Stopwatch timer;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spfts_acceptance_csv";
  fs::create_directories(dir);

  const int p = 40, T = 150, m = 51, q = 6;
  const auto grid = Eigen::VectorXd::LinSpaced(m, 0.0, 100.0);
  const auto ctx = data_basis_context(q, grid);

  auto write_csv = [&](const std::string& name, bool integrated) {
    std::ofstream out(dir / name);
    out << "series,time,grid,value\n";
    out.precision(12);
    RandomStream rng(integrated ? 111 : 222);
    for (int i = 0; i < p; ++i) {
      Eigen::VectorXd level = Eigen::VectorXd::Zero(q);
      for (int t = 0; t < T; ++t) {
        Eigen::VectorXd coeffs(q);
        for (int n = 0; n < q; ++n) coeffs[n] = 0.05 * rng.next_normal();
        if (integrated) {
          level += coeffs;
          coeffs = level;
        }
        const Eigen::VectorXd curve = reconstruct(coeffs, *ctx);
        for (int g = 0; g < m; ++g) {
          out << "s" << i << "," << 1900 + t << "," << grid[g] << "," << std::exp(curve[g])
              << "\n";
        }
      }
    }
    return (dir / name).string();
  };

  AnalyzeConfig cfg;
  cfg.schema = CsvSchema::long_format;
  cfg.q = q;
  cfg.k_max = 5;

  cfg.data_path = write_csv("integrated.csv", true);
  const AnalyzeResult walk = run_analyze(cfg, false);
  record_spectrum(walk.report.eigenvalues);
  bool pass = true;
  for (int k = 1; k <= 3; ++k) {
    const double a = walk.report.alignments[static_cast<std::size_t>(k - 1)];
    EXPECT_GE(a, 0.9) << "integrated panel, k=" << k;
    pass = pass && a >= 0.9;
  }

  cfg.data_path = write_csv("stationary.csv", false);
  const AnalyzeResult iid = run_analyze(cfg, false);
  record_spectrum(iid.report.eigenvalues);
  for (int k = 1; k <= 5; ++k) {
    const double a = iid.report.alignments[static_cast<std::size_t>(k - 1)];
    EXPECT_LT(a, 0.5) << "stationary panel, k=" << k;
    pass = pass && a < 0.5;
  }
  fs::remove_all(dir);
  const double elapsed = timer.seconds();
  report("pipeline_end_to_end", pass, elapsed);
}

// Criterion: the l1/l2 sandwich held for every eigenvalue vector recorded above.
TEST(Acceptance, SpectrumSandwichAudit) {
  Stopwatch timer;
  auto& a = audit();
  std::lock_guard<std::mutex> lock(a.mu);
  EXPECT_GT(a.recorded, 0);
  EXPECT_EQ(a.violations, 0);
  report("l1l2_spectrum_audit", a.recorded > 0 && a.violations == 0, timer.seconds());
}

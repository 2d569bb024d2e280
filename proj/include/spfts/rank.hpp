#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spfts/dgp.hpp"
#include "spfts/operators.hpp"

namespace spfts {

// Spectral summary of B_n = A_n A_n' for one basis direction, computed from the
// K x K Gram A_n' A_n (same nonzero spectrum).
struct PerDirectionStats {
  int n = 0;            // 1-based basis index
  double trace_b = 0.0; // <B_n>
  double hs_b = 0.0;    // ||B_n||_2
  double op_b = 0.0;    // ||B_n|| (largest eigenvalue)
  int rank_b = 0;       // eigenvalues above 1e-10 * max
  double alpha_b = 0.0; // least nonzero / largest eigenvalue
  double ratio_b = 0.0; // <B_n> / ||B_n||_2
};

std::vector<PerDirectionStats> per_direction_stats(const LoadingSpec& loadings);

// Effective rank trace / operator-norm of C_eps^{1/2} Omega C_eps^{1/2}.
double effective_rank(const CovarianceSpec& cov, const OperatorMatrix& om);

// Trace / Hilbert-Schmidt variant of the same ratio; this is the quantity the
// separable bounds control and the one whose growth order is tabulated.
double effective_rank_hs(const CovarianceSpec& cov, const OperatorMatrix& om);

// <C_eps Omega> = sum_k tr(C_eps Omega_kk).
double trace_ce_omega(const CovarianceSpec& cov, const OperatorMatrix& om);

struct RankBounds {
  double upper = 0.0;  // ||C_eps||_2^{-1} * sup_n <B_n>/||B_n||_2
  double lower = 0.0;  // ||C_eps||_2^{-1} * (1 + sup_n c_n <B_n>/||B_n||_2)
};

RankBounds separable_rank_bounds(const CovarianceSpec& cov,
                                 const std::vector<PerDirectionStats>& per_n);

enum class Regime { localized, delocalized, borderline };
const char* to_string(Regime r);

// Delocalized when ||C_eps||_2^2 < threshold, localized when it exceeds
// 2.5 * threshold; the band in between is reported as borderline.
Regime classify_regime(const CovarianceSpec& cov, double threshold = 0.1);

// One grid point of the divergence probe: a scale coordinate (typically K) and
// the statistic max_n c_n <B_n>/||B_n||_2 evaluated there.
struct DivergenceGridPoint {
  double scale = 0.0;
  double statistic = 0.0;
};

struct SpuriousnessConditions {
  bool cond_a = false;  // covariance delocalized
  bool cond_b = false;  // divergence of c_n <B_n>/||B_n||_2 along the grid
  double statistic = 0.0;  // value at the model's own scale
  double slope = 0.0;      // log-log slope across the grid (0 when no grid)
  std::vector<DivergenceGridPoint> grid;
};

double divergence_statistic(const CovarianceSpec& cov,
                            const std::vector<PerDirectionStats>& per_n);

// cond_a from the regime of `cov`; cond_b from a positive log-log slope of the
// statistic across the supplied grid (at least two points required).
SpuriousnessConditions spuriousness_conditions(const CovarianceSpec& cov,
                                               const std::vector<PerDirectionStats>& per_n,
                                               const std::vector<DivergenceGridPoint>& grid = {},
                                               double slope_cutoff = 0.05);

struct NoiseCondition {
  double lhs = 0.0;  // <C_zeta> = p * sum_n var_n
  double rhs = 0.0;  // T * <C_eps Omega>
  bool satisfied = false;
};

NoiseCondition noise_condition(const NoiseSpec& noise, const CovarianceSpec& cov,
                               const OperatorMatrix& om, int T, int p,
                               double cutoff = 0.1);

struct EffectiveRankReport {
  int schema_version = 1;
  int T = 0, p = 0, q = 0, K = 0;
  double effective_rank_op = 0.0;  // trace / operator norm
  double effective_rank_hs = 0.0;  // trace / Hilbert-Schmidt norm
  double trace_c = 0.0, hs_c = 0.0, op_c = 0.0;
  double hs_ceps = 0.0;  // ||C_eps||_2
  std::vector<PerDirectionStats> per_n;
  double upper_bound = 0.0, lower_bound = 0.0;
  Regime regime = Regime::borderline;
  bool cond_a = false, cond_b = false;
  double divergence_slope = 0.0;
  double noise_lhs = 0.0, noise_rhs = 0.0;
  bool noise_ok = false;
  std::string order_tag;  // predicted growth order, empty for custom models
};

// Predicted growth order of the effective rank for the shipped setting
// combinations ("sqrt(qK)", "sqrt(q)", "sqrt(K)", "~1"); empty for custom.
std::string predicted_order_tag(CovarianceSetting cov, LoadingScheme scheme);

// Materializes the model's covariance and loadings and assembles the full
// ledger. `k_grid` (optional) drives the divergence probe; loadings at each
// grid K are redrawn with the same scheme.
EffectiveRankReport build_rank_report(const ModelConfig& cfg, const BasisContextPtr& ctx,
                                      const std::vector<int>& k_grid = {});

}  // namespace spfts

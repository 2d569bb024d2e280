#include "spfts/rank.hpp"

#include <cmath>

#include "spfts/errors.hpp"
#include "spfts/stats.hpp"

namespace spfts {

namespace {

constexpr double kRankTolerance = 1e-10;  // singular values above tol * max count

}  // namespace

std::vector<PerDirectionStats> per_direction_stats(const LoadingSpec& loadings) {
  loadings.validate();
  std::vector<PerDirectionStats> out;
  out.reserve(loadings.A.size());
  for (int n = 0; n < loadings.q(); ++n) {
    const auto& a = loadings.A[static_cast<std::size_t>(n)];
    // B_n = A_n A_n' shares its nonzero spectrum with the K x K Gram A_n' A_n.
    const Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("per_direction_stats: eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);

    PerDirectionStats s;
    s.n = n + 1;
    s.trace_b = ev.sum();
    s.hs_b = ev.norm();
    s.op_b = ev.size() ? ev.maxCoeff() : 0.0;
    const double cut = kRankTolerance * s.op_b;
    double least_nonzero = s.op_b;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev[i] > cut) {
        ++s.rank_b;
        least_nonzero = std::min(least_nonzero, ev[i]);
      }
    }
    s.alpha_b = s.op_b > 0 ? least_nonzero / s.op_b : 0.0;
    s.ratio_b = s.hs_b > 0 ? s.trace_b / s.hs_b : 0.0;
    out.push_back(s);
  }
  return out;
}

namespace {

OperatorMatrix symmetric_sandwich(const CovarianceSpec& cov, const OperatorMatrix& om) {
  const KernelOperator root = sqrt_covariance(cov);
  return sandwich(root, om, root);
}

}  // namespace

double effective_rank(const CovarianceSpec& cov, const OperatorMatrix& om) {
  const OperatorMatrix c = symmetric_sandwich(cov, om);
  const double tr = trace(c);
  const double op = op_norm(c);
  if (op <= 0) throw NumericError("effective_rank: zero operator");
  return tr / op;
}

double effective_rank_hs(const CovarianceSpec& cov, const OperatorMatrix& om) {
  const OperatorMatrix c = symmetric_sandwich(cov, om);
  const double tr = trace(c);
  const double hs = hs_norm(c);
  if (hs <= 0) throw NumericError("effective_rank_hs: zero operator");
  return tr / hs;
}

double trace_ce_omega(const CovarianceSpec& cov, const OperatorMatrix& om) {
  return trace(sandwich(covariance_operator(cov), om, KernelOperator::identity(cov.context)));
}

RankBounds separable_rank_bounds(const CovarianceSpec& cov,
                                 const std::vector<PerDirectionStats>& per_n) {
  if (per_n.empty()) throw ConfigError("separable_rank_bounds: empty ledger");
  const double hs_ceps = cov.hs_norm();
  if (hs_ceps <= 0) throw NumericError("separable_rank_bounds: zero covariance");
  double sup_ratio = 0.0;
  double sup_weighted = 0.0;
  for (const auto& s : per_n) {
    sup_ratio = std::max(sup_ratio, s.ratio_b);
    if (s.n <= cov.c.size()) {
      sup_weighted = std::max(sup_weighted, cov.c[s.n - 1] * s.ratio_b);
    }
  }
  return RankBounds{sup_ratio / hs_ceps, (1.0 + sup_weighted) / hs_ceps};
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::localized: return "localized";
    case Regime::delocalized: return "delocalized";
    case Regime::borderline: return "borderline";
  }
  return "?";
}

Regime classify_regime(const CovarianceSpec& cov, double threshold) {
  const double hs_sq = cov.c.squaredNorm();
  if (hs_sq < threshold) return Regime::delocalized;
  if (hs_sq > 2.5 * threshold) return Regime::localized;
  return Regime::borderline;
}

double divergence_statistic(const CovarianceSpec& cov,
                            const std::vector<PerDirectionStats>& per_n) {
  double stat = 0.0;
  for (const auto& s : per_n) {
    if (s.n <= cov.c.size()) stat = std::max(stat, cov.c[s.n - 1] * s.ratio_b);
  }
  return stat;
}

SpuriousnessConditions spuriousness_conditions(const CovarianceSpec& cov,
                                               const std::vector<PerDirectionStats>& per_n,
                                               const std::vector<DivergenceGridPoint>& grid,
                                               double slope_cutoff) {
  SpuriousnessConditions out;
  out.cond_a = classify_regime(cov) == Regime::delocalized;
  out.statistic = divergence_statistic(cov, per_n);
  out.grid = grid;
  if (grid.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& g : grid) {
      if (g.scale > 0 && g.statistic > 0) {
        xs.push_back(std::log(g.scale));
        ys.push_back(std::log(g.statistic));
      }
    }
    if (xs.size() >= 2) {
      out.slope = ols_slope(xs, ys);
      out.cond_b = out.slope > slope_cutoff;
    }
  }
  return out;
}

NoiseCondition noise_condition(const NoiseSpec& noise, const CovarianceSpec& cov,
                               const OperatorMatrix& om, int T, int p, double cutoff) {
  NoiseCondition out;
  out.lhs = static_cast<double>(p) * noise.variances.sum();
  out.rhs = static_cast<double>(T) * trace_ce_omega(cov, om);
  out.satisfied = out.lhs <= cutoff * out.rhs;
  return out;
}

std::string predicted_order_tag(CovarianceSetting cov, LoadingScheme scheme) {
  if (cov == CovarianceSetting::custom || scheme == LoadingScheme::custom) return "";
  const bool deloc = cov == CovarianceSetting::delocalized_flat;
  if (scheme == LoadingScheme::full_rank) return deloc ? "sqrt(qK)" : "sqrt(K)";
  return deloc ? "sqrt(q)" : "~1";
}

EffectiveRankReport build_rank_report(const ModelConfig& cfg, const BasisContextPtr& ctx,
                                      const std::vector<int>& k_grid) {
  cfg.validate();
  EffectiveRankReport rep;
  rep.T = cfg.T;
  rep.p = cfg.p;
  rep.q = cfg.q;
  rep.K = cfg.K;

  const CovarianceSpec cov = make_covariance(cfg.covariance, cfg.q, ctx);
  const LoadingSpec loadings = materialize_loadings(cfg.loadings, cfg.p, cfg.K, cfg.q, cfg.seed);
  const OperatorMatrix om = build_omega(loadings, ctx);
  const OperatorMatrix c = symmetric_sandwich(cov, om);

  rep.trace_c = trace(c);
  rep.hs_c = hs_norm(c);
  rep.op_c = op_norm(c);
  if (rep.op_c <= 0 || rep.hs_c <= 0) throw NumericError("build_rank_report: zero operator");
  rep.effective_rank_op = rep.trace_c / rep.op_c;
  rep.effective_rank_hs = rep.trace_c / rep.hs_c;
  rep.hs_ceps = cov.hs_norm();
  rep.per_n = per_direction_stats(loadings);

  const RankBounds bounds = separable_rank_bounds(cov, rep.per_n);
  rep.upper_bound = bounds.upper;
  rep.lower_bound = bounds.lower;
  rep.regime = classify_regime(cov);

  std::vector<DivergenceGridPoint> grid;
  for (int k_scale : k_grid) {
    if (k_scale < 1) continue;
    LoadingConfig grid_cfg = cfg.loadings;
    if (grid_cfg.scheme == LoadingScheme::custom && grid_cfg.product_rank == 0) {
      continue;  // explicit matrices cannot be redrawn at another K
    }
    if (grid_cfg.product_rank > std::min(cfg.p, k_scale)) continue;
    if (grid_cfg.scheme == LoadingScheme::low_eff_rank && k_scale > cfg.p) continue;
    const LoadingSpec grid_loadings = materialize_loadings(
        grid_cfg, cfg.p, k_scale, cfg.q, derive_key(cfg.seed, static_cast<std::uint64_t>(k_scale)));
    grid.push_back({static_cast<double>(k_scale),
                    divergence_statistic(cov, per_direction_stats(grid_loadings))});
  }
  const SpuriousnessConditions conds = spuriousness_conditions(cov, rep.per_n, grid);
  rep.cond_a = conds.cond_a;
  rep.cond_b = conds.cond_b;
  rep.divergence_slope = conds.slope;

  const NoiseSpec noise = cfg.noise.variances.size() ? cfg.noise : NoiseSpec::geometric(cfg.q);
  const NoiseCondition nc = noise_condition(noise, cov, om, cfg.T, cfg.p);
  rep.noise_lhs = nc.lhs;
  rep.noise_rhs = nc.rhs;
  rep.noise_ok = nc.satisfied;

  rep.order_tag = predicted_order_tag(cfg.covariance.setting, cfg.loadings.scheme);
  return rep;
}

}  // namespace spfts

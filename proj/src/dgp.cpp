#include "spfts/dgp.hpp"

#include <Eigen/QR>
#include <cmath>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

// Substream tags for the per-model random streams.
enum : std::uint64_t {
  kStreamLoadings = 1,
  kStreamInnovations = 2,
  kStreamNoise = 3,
  kStreamReplicates = 4,
};

Eigen::MatrixXd gaussian_matrix(int rows, int cols, RandomStream& rng) {
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = rng.next_normal();
  }
  return g;
}

}  // namespace

const char* to_string(CovarianceSetting s) {
  switch (s) {
    case CovarianceSetting::delocalized_flat: return "delocalized_flat";
    case CovarianceSetting::localized_geometric: return "localized_geometric";
    case CovarianceSetting::localized_rank2: return "localized_rank2";
    case CovarianceSetting::custom: return "custom";
  }
  return "?";
}

const char* to_string(LoadingScheme s) {
  switch (s) {
    case LoadingScheme::full_rank: return "full_rank";
    case LoadingScheme::low_eff_rank: return "low_eff_rank";
    case LoadingScheme::custom: return "custom";
  }
  return "?";
}

const char* to_string(InnovationDistribution d) {
  switch (d) {
    case InnovationDistribution::gaussian: return "gaussian";
  }
  return "?";
}

void LoadingSpec::validate() const {
  if (A.empty()) throw ConfigError("loading spec has no matrices");
  for (const auto& a : A) {
    if (a.rows() != p() || a.cols() != K()) {
      throw ConfigError("loading matrices must share dimensions");
    }
    if (!a.allFinite()) throw DataError("loading matrices contain non-finite entries");
  }
}

NoiseSpec NoiseSpec::geometric(int q) {
  Eigen::VectorXd v(q);
  for (int n = 0; n < q; ++n) v[n] = std::pow(2.0, -(n + 1));
  return NoiseSpec{std::move(v)};
}

NoiseSpec NoiseSpec::none(int q) { return NoiseSpec{Eigen::VectorXd::Zero(q)}; }

void NoiseSpec::validate() const {
  if ((variances.array() < 0).any()) throw ConfigError("noise variances must be nonnegative");
}

void ModelConfig::validate() const {
  if (T < 2) throw ConfigError("model requires T >= 2");
  if (p < 1 || q < 1 || K < 1) throw ConfigError("model counts must be >= 1");
  if (covariance.setting == CovarianceSetting::localized_rank2 && q < 2) {
    throw ConfigError("localized_rank2 covariance requires q >= 2");
  }
  if (covariance.setting == CovarianceSetting::custom && covariance.custom_c.size() != q) {
    throw ConfigError("custom covariance must provide q eigenvalues");
  }
  if (loadings.scheme == LoadingScheme::low_eff_rank && K > p) {
    throw ConfigError("low_eff_rank loadings require K <= p");
  }
  if (noise.variances.size() != 0 && noise.variances.size() != q) {
    throw ConfigError("noise variances must have length q");
  }
  noise.validate();
}

CovarianceSpec make_covariance(CovarianceSetting setting, int q, const BasisContextPtr& ctx) {
  if (q < 1) throw ConfigError("covariance requires q >= 1");
  Eigen::VectorXd c(q);
  switch (setting) {
    case CovarianceSetting::delocalized_flat:
      c.setConstant(1.0 / q);
      break;
    case CovarianceSetting::localized_geometric:
      for (int n = 0; n < q; ++n) c[n] = std::pow(2.0, -(n + 1));
      break;
    case CovarianceSetting::localized_rank2:
      if (q < 2) throw ConfigError("localized_rank2 requires q >= 2");
      c.setZero();
      c[0] = c[1] = 0.5;
      break;
    case CovarianceSetting::custom:
      throw ConfigError("custom covariance needs explicit eigenvalues");
  }
  return make_covariance_spec(std::move(c), ctx);  // renormalizes to trace one
}

CovarianceSpec make_covariance(const CovarianceConfig& config, int q, const BasisContextPtr& ctx) {
  if (config.setting == CovarianceSetting::custom) {
    return make_covariance_spec(config.custom_c, ctx);
  }
  return make_covariance(config.setting, q, ctx);
}

Eigen::MatrixXd sample_haar_orthogonal(int n, RandomStream& rng) {
  if (n < 1) throw ConfigError("sample_haar_orthogonal requires n >= 1");
  const Eigen::MatrixXd g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q_mat = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q_mat.col(j) = -q_mat.col(j);
  }
  return q_mat;
}

Eigen::MatrixXd sample_haar_orthogonal(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_haar_orthogonal(n, rng);
}

Eigen::MatrixXd sample_haar_columns(int p, int k, RandomStream& rng) {
  if (k > p) throw ConfigError("sample_haar_columns requires k <= p");
  const Eigen::MatrixXd g = gaussian_matrix(p, k, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q_mat =
      qr.householderQ() * Eigen::MatrixXd::Identity(p, k);  // thin factor
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0) q_mat.col(j) = -q_mat.col(j);
  }
  return q_mat;
}

LoadingSpec make_loadings(LoadingScheme scheme, int p, int K, int q, std::uint64_t seed) {
  if (p < 1 || K < 1 || q < 1) throw ConfigError("loading dimensions must be >= 1");
  if (scheme == LoadingScheme::low_eff_rank && K > p) {
    throw ConfigError("low_eff_rank loadings require K <= p");
  }
  if (scheme == LoadingScheme::custom) {
    throw ConfigError("custom loadings cannot be drawn; supply matrices explicitly");
  }
  RandomStream rng(seed, kStreamLoadings);
  LoadingSpec spec;
  spec.scheme = scheme;
  spec.seed = seed;
  spec.A.reserve(static_cast<std::size_t>(q));
  Eigen::VectorXd half_powers(K);
  for (int j = 0; j < K; ++j) half_powers[j] = std::pow(2.0, -0.5 * (j + 1));
  for (int n = 0; n < q; ++n) {
    if (scheme == LoadingScheme::full_rank) {
      spec.A.push_back(gaussian_matrix(p, K, rng));
    } else {
      const Eigen::MatrixXd u_p = sample_haar_columns(p, K, rng);
      const Eigen::MatrixXd u_k = sample_haar_orthogonal(K, rng);
      spec.A.push_back(std::sqrt(static_cast<double>(p)) * u_p * half_powers.asDiagonal() *
                       u_k.transpose());
    }
  }
  return spec;
}

LoadingSpec make_rank_product_loadings(int p, int K, int r, int q, std::uint64_t seed) {
  if (r < 1 || r > std::min(p, K)) {
    throw ConfigError("rank-product loadings require 1 <= r <= min(p, K)");
  }
  RandomStream rng(seed, kStreamLoadings);
  LoadingSpec spec;
  spec.scheme = LoadingScheme::custom;
  spec.seed = seed;
  spec.A.reserve(static_cast<std::size_t>(q));
  for (int n = 0; n < q; ++n) {
    const Eigen::MatrixXd left = gaussian_matrix(p, r, rng);
    const Eigen::MatrixXd right = gaussian_matrix(r, K, rng);
    spec.A.push_back(left * right);
  }
  return spec;
}

LoadingSpec materialize_loadings(const LoadingConfig& config, int p, int K, int q,
                                 std::uint64_t seed) {
  if (config.scheme == LoadingScheme::custom) {
    if (config.product_rank > 0) {
      return make_rank_product_loadings(p, K, config.product_rank, q, seed);
    }
    if (static_cast<int>(config.custom_A.size()) != q) {
      throw ConfigError("custom loadings must provide q matrices");
    }
    LoadingSpec spec{LoadingScheme::custom, config.custom_A, seed};
    spec.validate();
    return spec;
  }
  return make_loadings(config.scheme, p, K, q, seed);
}

SimulationDraw simulate_panel(const ModelConfig& cfg, const BasisContextPtr& ctx) {
  cfg.validate();
  if (!ctx || ctx->q != cfg.q) throw ConfigError("simulate_panel: context order must equal q");

  SimulationDraw draw;
  draw.covariance = make_covariance(cfg.covariance, cfg.q, ctx);
  draw.loadings = materialize_loadings(cfg.loadings, cfg.p, cfg.K, cfg.q, cfg.seed);
  draw.noise = cfg.noise.variances.size() ? cfg.noise : NoiseSpec::geometric(cfg.q);

  RandomStream innov_rng(cfg.seed, kStreamInnovations);
  RandomStream noise_rng(cfg.seed, kStreamNoise);

  draw.innovations.reserve(static_cast<std::size_t>(cfg.q));
  draw.factors.reserve(static_cast<std::size_t>(cfg.q));
  draw.panel.context = ctx;
  draw.panel.slices.reserve(static_cast<std::size_t>(cfg.q));

  for (int n = 0; n < cfg.q; ++n) {
    const double sd = std::sqrt(draw.covariance.c[n]);
    Eigen::MatrixXd eps(cfg.K, cfg.T);
    for (int k = 0; k < cfg.K; ++k) {
      for (int t = 0; t < cfg.T; ++t) eps(k, t) = sd * innov_rng.next_normal();
    }
    Eigen::MatrixXd f = eps;
    for (int t = 1; t < cfg.T; ++t) f.col(t) += f.col(t - 1);

    Eigen::MatrixXd slice = draw.loadings.A[static_cast<std::size_t>(n)] * f;
    const double noise_sd = std::sqrt(draw.noise.variances[n]);
    if (noise_sd > 0) {
      for (int i = 0; i < cfg.p; ++i) {
        for (int t = 0; t < cfg.T; ++t) slice(i, t) += noise_sd * noise_rng.next_normal();
      }
    }
    draw.innovations.push_back(std::move(eps));
    draw.factors.push_back(std::move(f));
    draw.panel.slices.push_back(std::move(slice));
  }
  return draw;
}

SimulationDraw simulate_replicate(const ModelConfig& cfg, const BasisContextPtr& ctx,
                                  std::uint64_t replicate) {
  ModelConfig derived = cfg;
  derived.seed = derive_key(derive_key(cfg.seed, kStreamReplicates), replicate);
  return simulate_panel(derived, ctx);
}

}  // namespace spfts

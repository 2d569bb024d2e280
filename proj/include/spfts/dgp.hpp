#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "spfts/basis.hpp"
#include "spfts/operators.hpp"
#include "spfts/rng.hpp"

namespace spfts {

enum class CovarianceSetting { delocalized_flat, localized_geometric, localized_rank2, custom };
enum class LoadingScheme { full_rank, low_eff_rank, custom };
enum class InnovationDistribution { gaussian };  // only Gaussian ships

const char* to_string(CovarianceSetting s);
const char* to_string(LoadingScheme s);
const char* to_string(InnovationDistribution d);

// Materialized loading operators: one p x K matrix per basis direction n <= q.
struct LoadingSpec {
  LoadingScheme scheme = LoadingScheme::full_rank;
  std::vector<Eigen::MatrixXd> A;
  std::uint64_t seed = 0;

  int q() const { return static_cast<int>(A.size()); }
  int p() const { return A.empty() ? 0 : static_cast<int>(A.front().rows()); }
  int K() const { return A.empty() ? 0 : static_cast<int>(A.front().cols()); }

  void validate() const;
};

struct NoiseSpec {
  Eigen::VectorXd variances;  // length q, nonnegative; default 2^{-n}

  static NoiseSpec geometric(int q);
  static NoiseSpec none(int q);
  void validate() const;
};

// Generative description of the loadings, kept serializable. `product_rank`
// draws A_n as G_{p x r} * G_{r x K} (rank-deficient loadings for the
// persistence probe); `custom` carries explicit matrices.
struct LoadingConfig {
  LoadingScheme scheme = LoadingScheme::full_rank;
  int product_rank = 0;  // > 0 selects the rank-product construction
  std::vector<Eigen::MatrixXd> custom_A;
};

struct CovarianceConfig {
  CovarianceSetting setting = CovarianceSetting::delocalized_flat;
  Eigen::VectorXd custom_c;
};

// Full data-generating process: T x p panel of curves over a q-dimensional
// basis, K random-walk factors, loading scheme, innovation covariance, noise.
struct ModelConfig {
  int T = 200;
  int p = 100;
  int q = 20;
  int K = 50;
  CovarianceConfig covariance;
  LoadingConfig loadings;
  NoiseSpec noise;  // empty variances -> geometric default
  InnovationDistribution distribution = InnovationDistribution::gaussian;
  std::uint64_t seed = 1;

  void validate() const;
};

CovarianceSpec make_covariance(CovarianceSetting setting, int q, const BasisContextPtr& ctx);
CovarianceSpec make_covariance(const CovarianceConfig& config, int q, const BasisContextPtr& ctx);

// Haar-distributed orthogonal matrix via QR of a Gaussian matrix with the sign
// of the R diagonal fixed.
Eigen::MatrixXd sample_haar_orthogonal(int n, RandomStream& rng);
Eigen::MatrixXd sample_haar_orthogonal(int n, std::uint64_t seed);

// First k columns of a Haar orthogonal p x p matrix (thin QR of a p x k Gaussian).
Eigen::MatrixXd sample_haar_columns(int p, int k, RandomStream& rng);

LoadingSpec make_loadings(LoadingScheme scheme, int p, int K, int q, std::uint64_t seed);

// A_n = G_{p x r} * G_{r x K} with i.i.d. standard Gaussian factors; yields a
// custom-scheme spec with every A_n of rank r almost surely.
LoadingSpec make_rank_product_loadings(int p, int K, int r, int q, std::uint64_t seed);

LoadingSpec materialize_loadings(const LoadingConfig& config, int p, int K, int q,
                                 std::uint64_t seed);

inline OperatorMatrix build_omega(const LoadingSpec& loadings, const BasisContextPtr& ctx) {
  return loadings_gram_operator(loadings.A, ctx);
}

struct SimulationDraw {
  FunctionalPanel panel;
  std::vector<Eigen::MatrixXd> factors;      // q slices, each K x T
  std::vector<Eigen::MatrixXd> innovations;  // q slices, each K x T
  LoadingSpec loadings;
  CovarianceSpec covariance;
  NoiseSpec noise;
};

// Simulate the panel: innovations eps_{kt} with independent N(0, c_n)
// coordinates, factors as their running sums, panel slice n equal to
// A_n F_n + noise. Deterministic given cfg (including the seed).
SimulationDraw simulate_panel(const ModelConfig& cfg, const BasisContextPtr& ctx);

// Same model with the seed replaced by a replicate-specific subkey.
SimulationDraw simulate_replicate(const ModelConfig& cfg, const BasisContextPtr& ctx,
                                  std::uint64_t replicate);

}  // namespace spfts

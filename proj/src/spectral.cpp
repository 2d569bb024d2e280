#include "spfts/spectral.hpp"

#include <cmath>

#include "spfts/diagnostics.hpp"
#include "spfts/errors.hpp"

namespace spfts {

GramMatrix gram_matrix(const FunctionalPanel& panel) {
  panel.validate();
  const int T = panel.T();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(T, T);
  for (const auto& slice : panel.slices) {
    const Eigen::MatrixXd centered = slice.colwise() - slice.rowwise().mean();
    S.noalias() += centered.transpose() * centered;
  }
  S /= static_cast<double>(panel.p());
  S = 0.5 * (S + S.transpose());  // kill accumulation asymmetry
  return GramMatrix{std::move(S)};
}

Eigen::MatrixXd centering_matrix(int T) {
  if (T < 1) throw ConfigError("centering_matrix requires T >= 1");
  return Eigen::MatrixXd::Identity(T, T) -
         Eigen::MatrixXd::Constant(T, T, 1.0 / static_cast<double>(T));
}

Eigen::MatrixXd cumulation_matrix(int T) {
  if (T < 1) throw ConfigError("cumulation_matrix requires T >= 1");
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(T, T);
  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) theta(s, t) = 1.0;
  }
  return theta;
}

MThetaSvd mtheta_svd(int T) {
  if (T < 2) throw ConfigError("mtheta_svd requires T >= 2");
  MThetaSvd out;
  out.sigma.resize(T);
  out.W.resize(T, T);
  out.V.resize(T, T);
  const double scale = std::sqrt(2.0 / T);
  for (int t = 1; t < T; ++t) {
    out.sigma[t - 1] = 1.0 / (2.0 * std::sin(t * M_PI / (2.0 * T)));
    for (int n = 1; n <= T; ++n) {
      out.W(n - 1, t - 1) = -scale * std::cos((n - 0.5) * M_PI * t / T);
      out.V(n - 1, t - 1) = scale * std::sin((n - 1.0) * M_PI * t / T);
    }
  }
  out.sigma[T - 1] = 0.0;
  out.W.col(T - 1).setConstant(1.0 / std::sqrt(static_cast<double>(T)));
  out.V.col(T - 1).setZero();
  out.V(0, T - 1) = 1.0;
  return out;
}

Eigen::MatrixXd w_matrix(const std::vector<Eigen::MatrixXd>& innovations,
                         const OperatorMatrix& om) {
  if (innovations.empty()) throw ConfigError("w_matrix: empty innovations");
  const int q = static_cast<int>(innovations.size());
  const int K = static_cast<int>(innovations.front().rows());
  const int T = static_cast<int>(innovations.front().cols());
  if (om.rows != K || om.cols != K) throw ConfigError("w_matrix: operator matrix must be K x K");
  if (om.context->q != q) throw ConfigError("w_matrix: context order must match innovations");
  for (const auto& slice : innovations) {
    if (slice.rows() != K || slice.cols() != T) {
      throw ConfigError("w_matrix: innovation slices have inconsistent dimensions");
    }
  }

  // eps_k as a q x T coefficient matrix per factor.
  std::vector<Eigen::MatrixXd> eps(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    eps[static_cast<std::size_t>(k)].resize(q, T);
    for (int n = 0; n < q; ++n) {
      eps[static_cast<std::size_t>(k)].row(n) = innovations[static_cast<std::size_t>(n)].row(k);
    }
  }

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(T, T);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      W.noalias() += eps[static_cast<std::size_t>(k)].transpose() * om.block(k, l) *
                     eps[static_cast<std::size_t>(l)];
    }
  }
  return W;
}

EigenDecomposition eigendecompose(const GramMatrix& gram, int k_max) {
  const int T = gram.T();
  if (k_max < 1 || k_max > T) throw ConfigError("eigendecompose: need 1 <= k_max <= T");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.S);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigendecompose: eigensolver failed to converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(T, k_max);
  for (int k = 1; k <= k_max; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(T - k);
    Eigen::VectorXd ref;
    if (k < T) {
      ref = spurious_vector(k, T);
    } else {
      ref = Eigen::VectorXd::Zero(T);
      ref[0] = 1.0;
    }
    if (v.dot(ref) < 0) v = -v;
    out.vectors.col(k - 1) = v;
  }
  return out;
}

}  // namespace spfts

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spfts/basis.hpp"
#include "spfts/operators.hpp"

namespace spfts {

// T x T matrix of demeaned cross-time inner products, scaled by 1/p. Shares its
// nonzero spectrum with the sample covariance operator of the panel.
struct GramMatrix {
  Eigen::MatrixXd S;

  int T() const { return static_cast<int>(S.rows()); }
};

GramMatrix gram_matrix(const FunctionalPanel& panel);

// M = I - 11'/T, the projection onto the mean-zero subspace.
Eigen::MatrixXd centering_matrix(int T);

// Upper triangular matrix of ones; right-multiplying a row of innovations by it
// produces their running sums.
Eigen::MatrixXd cumulation_matrix(int T);

// Closed-form SVD of M * Theta': sigma_t = (2 sin(t pi / 2T))^{-1} for t < T and
// sigma_T = 0, with explicit trigonometric singular vectors.
struct MThetaSvd {
  Eigen::VectorXd sigma;  // descending, length T
  Eigen::MatrixXd W;      // T x T left vectors (columns)
  Eigen::MatrixXd V;      // T x T right vectors (columns)
};

MThetaSvd mtheta_svd(int T);

// W_{st} = sum_{k,l} <eps_{ks}, Omega_{kl} eps_{lt}> from innovation coefficient
// slices (q entries, each K x T).
Eigen::MatrixXd w_matrix(const std::vector<Eigen::MatrixXd>& innovations,
                         const OperatorMatrix& om);

struct EigenDecomposition {
  Eigen::VectorXd values;   // all T eigenvalues, descending
  Eigen::MatrixXd vectors;  // T x k_max, unit columns
};

// Symmetric eigendecomposition of the Gram matrix. Column k - 1 is sign-fixed so
// its inner product with the matching trigonometric limit vector (or with e_1
// when k = T) is nonnegative.
EigenDecomposition eigendecompose(const GramMatrix& gram, int k_max);

}  // namespace spfts

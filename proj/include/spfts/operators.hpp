#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spfts/basis.hpp"

namespace spfts {

// Integral operator on the truncated space, identified with the q x q matrix of
// its action on basis coefficients: c -> G c.
struct KernelOperator {
  Eigen::MatrixXd mat;
  BasisContextPtr context;

  static KernelOperator identity(const BasisContextPtr& ctx);
};

// K x L matrix of kernel operators sharing one context. Acts on stacked
// coefficient vectors of H^L; self-adjoint instances satisfy block(i,j) =
// block(j,i)^T.
struct OperatorMatrix {
  int rows = 0;
  int cols = 0;
  BasisContextPtr context;
  std::vector<Eigen::MatrixXd> blocks;  // row-major, rows*cols entries, each q x q

  Eigen::MatrixXd& block(int i, int j) { return blocks[static_cast<std::size_t>(i) * cols + j]; }
  const Eigen::MatrixXd& block(int i, int j) const {
    return blocks[static_cast<std::size_t>(i) * cols + j];
  }

  static OperatorMatrix zero(int rows, int cols, const BasisContextPtr& ctx);
  static OperatorMatrix identity(int k, const BasisContextPtr& ctx);

  // Dense (rows*q) x (cols*q) matrix with block (i, j) at offset (i*q, j*q).
  Eigen::MatrixXd assemble() const;

  double self_adjoint_defect() const;  // max-entry distance to the adjoint
};

// Diagonal covariance operator sum_n c_n phi_n (x) phi_n described by its
// eigenvalues on the basis; simulation convention normalizes sum c_n = 1.
struct CovarianceSpec {
  Eigen::VectorXd c;
  BasisContextPtr context;

  double trace() const { return c.sum(); }
  double hs_norm() const { return c.norm(); }
  double op_norm() const { return c.size() ? c.maxCoeff() : 0.0; }
};

CovarianceSpec make_covariance_spec(Eigen::VectorXd c, const BasisContextPtr& ctx);

// Blockwise two-sided composition: block (i, j) of the result is C1 * block(i,j) * C2.
OperatorMatrix sandwich(const KernelOperator& c1, const OperatorMatrix& om, const KernelOperator& c2);

// Block (i, j) of the adjoint is the transpose of block (j, i).
OperatorMatrix adjoint(const OperatorMatrix& om);

// Trace on H^K: sum of the diagonal-block traces. Requires a square matrix.
double trace(const OperatorMatrix& om);

// Hilbert-Schmidt norm: sqrt of the sum of squared block Frobenius norms.
double hs_norm(const OperatorMatrix& om);

// Largest singular value of the assembled matrix.
double op_norm(const OperatorMatrix& om);

KernelOperator covariance_operator(const CovarianceSpec& spec);       // diag(c_n)
KernelOperator sqrt_covariance(const CovarianceSpec& spec);           // diag(sqrt(c_n))

// K x K operator matrix with block (k, l) = diag_n((A_n' A_n)_{kl}); the Gram of
// the loading operators, self-adjoint and nonnegative definite by construction.
OperatorMatrix loadings_gram_operator(const std::vector<Eigen::MatrixXd>& a_mats,
                                      const BasisContextPtr& ctx);

}  // namespace spfts

#include "spfts/operators.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

int context_order(const BasisContextPtr& ctx) {
  if (!ctx) throw ConfigError("operator requires a basis context");
  return ctx->q;
}

void check_same_context(const BasisContextPtr& lhs, const BasisContextPtr& rhs) {
  if (!lhs || !rhs || !same_context(*lhs, *rhs)) {
    throw ConfigError("operands live in different basis contexts");
  }
}

}  // namespace

KernelOperator KernelOperator::identity(const BasisContextPtr& ctx) {
  const int q = context_order(ctx);
  return KernelOperator{Eigen::MatrixXd::Identity(q, q), ctx};
}

OperatorMatrix OperatorMatrix::zero(int rows, int cols, const BasisContextPtr& ctx) {
  const int q = context_order(ctx);
  OperatorMatrix om;
  om.rows = rows;
  om.cols = cols;
  om.context = ctx;
  om.blocks.assign(static_cast<std::size_t>(rows) * cols, Eigen::MatrixXd::Zero(q, q));
  return om;
}

OperatorMatrix OperatorMatrix::identity(int k, const BasisContextPtr& ctx) {
  OperatorMatrix om = zero(k, k, ctx);
  for (int i = 0; i < k; ++i) om.block(i, i).setIdentity();
  return om;
}

Eigen::MatrixXd OperatorMatrix::assemble() const {
  const int q = context_order(context);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows) * q, static_cast<Eigen::Index>(cols) * q);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out.block(static_cast<Eigen::Index>(i) * q, static_cast<Eigen::Index>(j) * q, q, q) =
          block(i, j);
    }
  }
  return out;
}

double OperatorMatrix::self_adjoint_defect() const {
  if (rows != cols) return std::numeric_limits<double>::infinity();
  double defect = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      defect = std::max(defect,
                        (block(i, j) - block(j, i).transpose()).cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

CovarianceSpec make_covariance_spec(Eigen::VectorXd c, const BasisContextPtr& ctx) {
  if (!ctx) throw ConfigError("covariance spec requires a basis context");
  if (c.size() != ctx->q) throw ConfigError("covariance spec length must equal q");
  if ((c.array() < 0).any()) throw ConfigError("covariance eigenvalues must be nonnegative");
  const double total = c.sum();
  if (total <= 0) throw ConfigError("covariance eigenvalues must have positive sum");
  c /= total;  // simulation convention: trace one
  return CovarianceSpec{std::move(c), ctx};
}

OperatorMatrix sandwich(const KernelOperator& c1, const OperatorMatrix& om,
                        const KernelOperator& c2) {
  check_same_context(c1.context, om.context);
  check_same_context(c2.context, om.context);
  const int q = context_order(om.context);
  if (c1.mat.rows() != q || c1.mat.cols() != q || c2.mat.rows() != q || c2.mat.cols() != q) {
    throw ConfigError("sandwich: kernel operator dimensions do not match the context");
  }
  OperatorMatrix out = om;
  for (auto& b : out.blocks) b = c1.mat * b * c2.mat;
  return out;
}

OperatorMatrix adjoint(const OperatorMatrix& om) {
  OperatorMatrix out = OperatorMatrix::zero(om.cols, om.rows, om.context);
  for (int i = 0; i < om.rows; ++i) {
    for (int j = 0; j < om.cols; ++j) {
      out.block(j, i) = om.block(i, j).transpose();
    }
  }
  return out;
}

double trace(const OperatorMatrix& om) {
  if (om.rows != om.cols) throw ConfigError("trace requires a square operator matrix");
  double tr = 0.0;
  for (int i = 0; i < om.rows; ++i) tr += om.block(i, i).trace();
  return tr;
}

double hs_norm(const OperatorMatrix& om) {
  double sq = 0.0;
  for (const auto& b : om.blocks) sq += b.squaredNorm();
  return std::sqrt(sq);
}

double op_norm(const OperatorMatrix& om) {
  const Eigen::MatrixXd full = om.assemble();
  if (full.size() == 0) return 0.0;
  if (om.rows == om.cols && om.self_adjoint_defect() < 1e-10) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("op_norm: eigensolver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(full);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

KernelOperator covariance_operator(const CovarianceSpec& spec) {
  return KernelOperator{Eigen::MatrixXd(spec.c.asDiagonal()), spec.context};
}

KernelOperator sqrt_covariance(const CovarianceSpec& spec) {
  if ((spec.c.array() < 0).any()) {
    throw ConfigError("sqrt_covariance: negative eigenvalue");
  }
  return KernelOperator{Eigen::MatrixXd(spec.c.array().sqrt().matrix().asDiagonal()),
                        spec.context};
}

OperatorMatrix loadings_gram_operator(const std::vector<Eigen::MatrixXd>& a_mats,
                                      const BasisContextPtr& ctx) {
  const int q = context_order(ctx);
  if (static_cast<int>(a_mats.size()) != q) {
    throw ConfigError("loadings list must have one matrix per basis direction");
  }
  const int k = static_cast<int>(a_mats.front().cols());
  OperatorMatrix om = OperatorMatrix::zero(k, k, ctx);
  for (int n = 0; n < q; ++n) {
    if (a_mats[static_cast<std::size_t>(n)].cols() != k) {
      throw ConfigError("loadings matrices must share dimensions");
    }
    const Eigen::MatrixXd gram =
        a_mats[static_cast<std::size_t>(n)].transpose() * a_mats[static_cast<std::size_t>(n)];
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        om.block(i, j)(n, n) = gram(i, j);
      }
    }
  }
  return om;
}

}  // namespace spfts

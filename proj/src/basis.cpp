#include "spfts/basis.hpp"

#include <cmath>

#include "spfts/errors.hpp"

namespace spfts {

namespace {

Eigen::MatrixXd fourier_eval(int q, const Eigen::VectorXd& grid) {
  const int m = static_cast<int>(grid.size());
  Eigen::MatrixXd eval(m, q);
  eval.col(0).setOnes();
  const double root2 = std::sqrt(2.0);
  for (int n = 1; n < q; ++n) {
    const int freq = (n + 1) / 2;
    for (int j = 0; j < m; ++j) {
      const double arg = 2.0 * M_PI * freq * grid[j];
      eval(j, n) = root2 * (n % 2 == 1 ? std::sin(arg) : std::cos(arg));
    }
  }
  return eval;
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  const int m = static_cast<int>(grid.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  if (m == 1) {
    w[0] = 1.0;  // degenerate grid; weight normalized to the unit interval
    return w;
  }
  for (int j = 0; j + 1 < m; ++j) {
    const double h = grid[j + 1] - grid[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

void check_grid(const Eigen::VectorXd& grid) {
  for (int j = 0; j + 1 < grid.size(); ++j) {
    if (!(grid[j] < grid[j + 1])) {
      throw ConfigError("basis grid must be strictly increasing");
    }
  }
  if (grid.size() && (grid[0] < -1e-12 || grid[grid.size() - 1] > 1.0 + 1e-12)) {
    throw ConfigError("basis grid must lie in [0, 1]");
  }
}

}  // namespace

double BasisContext::orthonormality_defect() const {
  const Eigen::MatrixXd gram = eval.transpose() * quad_weights.asDiagonal() * eval;
  return (gram - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff();
}

BasisContextPtr build_fourier_basis(int q, int m) {
  if (q < 1) throw ConfigError("basis truncation order must be >= 1");
  if (m < 4 * q + 1) {
    throw ConfigError("grid too small: need m >= 4q + 1 points, got m = " + std::to_string(m) +
                      " for q = " + std::to_string(q));
  }
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  auto ctx = std::make_shared<BasisContext>();
  ctx->q = q;
  ctx->grid = grid;
  ctx->eval = fourier_eval(q, grid);
  ctx->quad_weights = trapezoid_weights(grid);
  return ctx;
}

BasisContextPtr build_fourier_basis(int q, const Eigen::VectorXd& grid) {
  if (q < 1) throw ConfigError("basis truncation order must be >= 1");
  if (grid.size() < q) throw ConfigError("need at least q grid points for projection");
  check_grid(grid);
  auto ctx = std::make_shared<BasisContext>();
  ctx->q = q;
  ctx->grid = grid;
  ctx->eval = fourier_eval(q, grid);
  ctx->quad_weights = trapezoid_weights(grid);
  return ctx;
}

bool same_context(const BasisContext& lhs, const BasisContext& rhs) {
  return lhs.q == rhs.q && lhs.grid.size() == rhs.grid.size() && lhs.a == rhs.a &&
         lhs.b == rhs.b && lhs.grid == rhs.grid;
}

Curve project_curve(const Eigen::VectorXd& samples, const BasisContextPtr& ctx) {
  if (!ctx) throw ConfigError("project_curve: null basis context");
  if (samples.size() != ctx->grid.size()) {
    throw ConfigError("project_curve: sample length does not match the grid");
  }
  if (!samples.allFinite()) throw DataError("project_curve: non-finite sample values");
  return Curve{project_columns(samples, *ctx).col(0), ctx};
}

Eigen::MatrixXd project_columns(const Eigen::MatrixXd& samples, const BasisContext& ctx) {
  if (samples.rows() != ctx.grid.size()) {
    throw ConfigError("project_columns: sample rows do not match the grid");
  }
  const Eigen::MatrixXd wphi = ctx.quad_weights.asDiagonal() * ctx.eval;
  const Eigen::MatrixXd normal = ctx.eval.transpose() * wphi;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("project_columns: normal equations are singular");
  }
  return ldlt.solve(wphi.transpose() * samples);
}

double inner_product(const Curve& f, const Curve& g) {
  if (!f.context || !g.context || !same_context(*f.context, *g.context)) {
    throw ConfigError("inner_product: curves live in different basis contexts");
  }
  return f.coeffs.dot(g.coeffs);
}

Eigen::VectorXd reconstruct(const Curve& f) { return reconstruct(f.coeffs, *f.context); }

Eigen::VectorXd reconstruct(const Eigen::VectorXd& coeffs, const BasisContext& ctx) {
  if (coeffs.size() != ctx.q) throw ConfigError("reconstruct: coefficient length mismatch");
  return ctx.eval * coeffs;
}

Curve FunctionalPanel::curve(int i, int t) const {
  Eigen::VectorXd c(q());
  for (int n = 0; n < q(); ++n) c[n] = slices[static_cast<std::size_t>(n)](i, t);
  return Curve{std::move(c), context};
}

Eigen::MatrixXd FunctionalPanel::to_coefficient_matrix() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(p()) * q(), T());
  for (int n = 0; n < q(); ++n) {
    out.middleRows(static_cast<Eigen::Index>(n) * p(), p()) = slices[static_cast<std::size_t>(n)];
  }
  return out;
}

void FunctionalPanel::validate() const {
  if (!context) throw ConfigError("panel has no basis context");
  if (static_cast<int>(slices.size()) != context->q) {
    throw ConfigError("panel slice count does not match the context order");
  }
  for (const auto& slice : slices) {
    if (slice.rows() != p() || slice.cols() != T()) {
      throw ConfigError("panel slices have inconsistent dimensions");
    }
    if (!slice.allFinite()) throw DataError("panel contains non-finite coefficients");
  }
}

}  // namespace spfts

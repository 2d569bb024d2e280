#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace spfts {

// Truncated orthonormal coordinate system for L2 functions on [a, b]: a grid of
// quadrature abscissae, the basis evaluated on that grid, and trapezoid weights.
// Everything downstream works on coefficient vectors; the grid exists only for
// ingestion and plotting.
struct BasisContext {
  double a = 0.0;
  double b = 1.0;
  int q = 0;
  Eigen::VectorXd grid;          // m strictly increasing abscissae in [a, b]
  Eigen::MatrixXd eval;          // m x q values phi_n(u_j)
  Eigen::VectorXd quad_weights;  // m nonnegative trapezoid weights

  int m() const { return static_cast<int>(grid.size()); }

  // max_{n,n'} |sum_j w_j phi_n(u_j) phi_n'(u_j) - delta_{nn'}|
  double orthonormality_defect() const;
};

using BasisContextPtr = std::shared_ptr<const BasisContext>;

// Real Fourier system on [0, 1]: constant, then sine/cosine pairs, on a uniform
// m-point grid. Requires m >= 4q + 1 so trapezoid quadrature resolves all
// products of basis functions exactly.
BasisContextPtr build_fourier_basis(int q, int m);

// Same system evaluated on an arbitrary strictly increasing grid in [0, 1]
// (used for ingested data grids). No orthonormality guarantee is made here;
// projection stays well-posed as a weighted least-squares problem.
BasisContextPtr build_fourier_basis(int q, const Eigen::VectorXd& grid);

bool same_context(const BasisContext& lhs, const BasisContext& rhs);

struct Curve {
  Eigen::VectorXd coeffs;  // length q
  BasisContextPtr context;
};

// Weighted least-squares projection of grid samples onto the basis.
Curve project_curve(const Eigen::VectorXd& samples, const BasisContextPtr& ctx);

// Column-wise projection of an m x N sample matrix; returns q x N coefficients.
Eigen::MatrixXd project_columns(const Eigen::MatrixXd& samples, const BasisContext& ctx);

double inner_product(const Curve& f, const Curve& g);

// Grid values of the curve with the given coefficients.
Eigen::VectorXd reconstruct(const Curve& f);
Eigen::VectorXd reconstruct(const Eigen::VectorXd& coeffs, const BasisContext& ctx);

// p x T panel of curves stored as q slices of p x T coefficient matrices:
// coefficient (i, t, n) lives at slices[n](i, t).
struct FunctionalPanel {
  BasisContextPtr context;
  std::vector<Eigen::MatrixXd> slices;

  int p() const { return slices.empty() ? 0 : static_cast<int>(slices.front().rows()); }
  int T() const { return slices.empty() ? 0 : static_cast<int>(slices.front().cols()); }
  int q() const { return static_cast<int>(slices.size()); }

  Curve curve(int i, int t) const;

  // Stacked (p*q) x T coefficient matrix; row n * p + i holds slice n, series i.
  Eigen::MatrixXd to_coefficient_matrix() const;

  void validate() const;  // consistent dimensions, finite entries
};

}  // namespace spfts

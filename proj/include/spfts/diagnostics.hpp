#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spfts/spectral.hpp"

namespace spfts {

// Deterministic limit vector d_k with coordinates sqrt(2/T) cos(pi k t / T),
// t = 1..T. Unit norm up to O(1/T); nearly orthogonal across k.
Eigen::VectorXd spurious_vector(int k, int T);

// |<u, d_k / ||d_k||>| for a unit vector u.
double alignment(const Eigen::VectorXd& u, int k);

// Limit law of the k-th sample eigenvalue: T^2 / (k^2 pi^2 p) * <C_eps Omega>.
double theory_eigenvalue(int k, double T, double p, double trace_ce_omega);

// Limit law of the k-th variance share: 6 / (k pi)^2.
double theory_share(int k);

// Sample autocorrelations of u read as a length-T series, lags 1..max_lag.
Eigen::VectorXd eigenvector_acf(const Eigen::VectorXd& u, int max_lag);

struct SpectralReport {
  int schema_version = 1;
  int T = 0;
  int p = 0;
  int k_max = 0;
  bool degenerate = false;             // zero / numerically empty spectrum
  double total_variance = 0.0;         // sum of all eigenvalues
  double trace_ce_omega = 0.0;         // model constant behind the eigenvalue law
  std::vector<double> eigenvalues;     // top k_max, descending
  std::vector<double> variance_shares; // eigenvalues / total_variance
  std::vector<double> alignments;      // |<u_k, d_k>| per k
  std::vector<double> theory_eigenvalues;
  std::vector<double> theory_shares;
  std::vector<std::vector<double>> acf;  // per eigenvector, lags 1..acf_lags
};

struct ReportInputs {
  int T = 0;
  int p = 0;
  int k_max = 5;
  double trace_ce_omega = 0.0;  // <= 0 disables the theoretical eigenvalue column
  int acf_lags = 20;
};

SpectralReport build_report(const EigenDecomposition& eig, const ReportInputs& in);

}  // namespace spfts

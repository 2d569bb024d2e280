#include "spfts/diagnostics.hpp"

#include <cmath>

#include "spfts/errors.hpp"
#include "spfts/stats.hpp"

namespace spfts {

Eigen::VectorXd spurious_vector(int k, int T) {
  if (k < 1 || k >= T) throw ConfigError("spurious_vector: need 1 <= k < T");
  Eigen::VectorXd d(T);
  const double scale = std::sqrt(2.0 / T);
  for (int t = 1; t <= T; ++t) d[t - 1] = scale * std::cos(M_PI * k * t / T);
  return d;
}

double alignment(const Eigen::VectorXd& u, int k) {
  const int T = static_cast<int>(u.size());
  if (std::abs(u.norm() - 1.0) > 1e-8) throw ConfigError("alignment: input must be unit norm");
  const Eigen::VectorXd d = spurious_vector(k, T);
  return std::abs(u.dot(d)) / d.norm();
}

double theory_eigenvalue(int k, double T, double p, double trace_ce_omega) {
  if (k < 1 || T <= 0 || p <= 0) throw ConfigError("theory_eigenvalue: inputs must be positive");
  if (trace_ce_omega <= 0) throw ConfigError("theory_eigenvalue: trace must be positive");
  return T * T / (static_cast<double>(k) * k * M_PI * M_PI * p) * trace_ce_omega;
}

double theory_share(int k) {
  if (k < 1) throw ConfigError("theory_share: k must be >= 1");
  return 6.0 / (static_cast<double>(k) * k * M_PI * M_PI);
}

Eigen::VectorXd eigenvector_acf(const Eigen::VectorXd& u, int max_lag) {
  return sample_acf(u, max_lag);
}

SpectralReport build_report(const EigenDecomposition& eig, const ReportInputs& in) {
  const int T = static_cast<int>(eig.values.size());
  if (in.T != T) throw ConfigError("build_report: T does not match the decomposition");
  if (in.k_max < 1 || in.k_max > eig.vectors.cols()) {
    throw ConfigError("build_report: k_max exceeds the available eigenvectors");
  }

  SpectralReport rep;
  rep.T = in.T;
  rep.p = in.p;
  rep.k_max = in.k_max;
  rep.trace_ce_omega = in.trace_ce_omega;
  rep.total_variance = eig.values.sum();
  rep.degenerate = !(rep.total_variance > 0.0) ||
                   eig.values[0] <= 1e-14 * std::max(1.0, std::abs(rep.total_variance));

  for (int k = 1; k <= in.k_max; ++k) {
    rep.eigenvalues.push_back(eig.values[k - 1]);
    rep.variance_shares.push_back(rep.degenerate ? 0.0 : eig.values[k - 1] / rep.total_variance);
    rep.theory_shares.push_back(theory_share(k));
    rep.theory_eigenvalues.push_back(
        in.trace_ce_omega > 0 ? theory_eigenvalue(k, in.T, in.p, in.trace_ce_omega) : 0.0);
    if (rep.degenerate || k >= T) {
      rep.alignments.push_back(0.0);
    } else {
      rep.alignments.push_back(alignment(eig.vectors.col(k - 1), k));
    }
    if (rep.degenerate || in.acf_lags < 1 || in.acf_lags >= T) {
      rep.acf.emplace_back();
    } else {
      const Eigen::VectorXd acf = eigenvector_acf(eig.vectors.col(k - 1), in.acf_lags);
      rep.acf.emplace_back(acf.data(), acf.data() + acf.size());
    }
  }
  return rep;
}

}  // namespace spfts

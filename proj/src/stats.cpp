#include "spfts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spfts/errors.hpp"

namespace spfts {

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double quantile(std::vector<double> xs, double prob) {
  if (xs.empty()) throw ConfigError("quantile of empty sample");
  if (prob < 0 || prob > 1) throw ConfigError("quantile probability out of [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = prob * (static_cast<double>(xs.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * xs[lo] + frac * xs[hi];
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ConfigError("sample_stddev needs at least two values");
  const double m = mean(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - m) * (x - m);
  return std::sqrt(sq / (static_cast<double>(xs.size()) - 1.0));
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ConfigError("ols_slope needs two equally sized samples");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("ols_slope: regressor has zero variance");
  return sxy / sxx;
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n1 = xs.size(), n2 = ys.size();
  if (n1 == 0 || n2 == 0) throw ConfigError("mann_whitney_u needs nonempty samples");

  struct Tagged {
    double value;
    bool first;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(n1 + n2);
  for (double x : xs) pooled.push_back({x, true});
  for (double y : ys) pooled.push_back({y, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Tagged& a, const Tagged& b) { return a.value < b.value; });

  // Midranks with tie correction.
  const std::size_t n = pooled.size();
  std::vector<double> ranks(n);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].value == pooled[i].value) ++j;
    const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[k] = r;
    const double tied = static_cast<double>(j - i + 1);
    tie_term += tied * tied * tied - tied;
    i = j + 1;
  }

  double rank_sum1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (pooled[k].first) rank_sum1 += ranks[k];
  }
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double u1 = rank_sum1 - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double dn = dn1 + dn2;
  const double var = dn1 * dn2 / 12.0 * (dn + 1.0 - tie_term / (dn * (dn - 1.0)));

  MannWhitneyResult out;
  out.u = u1;
  if (var <= 0) {
    out.z = 0.0;
    out.p_value = 1.0;
    return out;
  }
  const double continuity = (u1 > mu) ? -0.5 : (u1 < mu ? 0.5 : 0.0);
  out.z = (u1 - mu + continuity) / std::sqrt(var);
  out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  return out;
}

Eigen::VectorXd sample_acf(const Eigen::VectorXd& series, int max_lag) {
  const int T = static_cast<int>(series.size());
  if (max_lag < 1 || max_lag >= T) throw ConfigError("sample_acf: need 1 <= max_lag < T");
  const Eigen::VectorXd centered = series.array() - series.mean();
  const double denom = centered.squaredNorm();
  if (denom <= 0) throw NumericError("sample_acf: constant series has undefined correlations");
  Eigen::VectorXd acf(max_lag);
  for (int h = 1; h <= max_lag; ++h) {
    acf[h - 1] = centered.head(T - h).dot(centered.tail(T - h)) / denom;
  }
  return acf;
}

bool l1l2_sandwich_holds(const Eigen::VectorXd& x, double rel_tol, double slack) {
  const Eigen::VectorXd abs = x.cwiseAbs();
  const double max_val = abs.size() ? abs.maxCoeff() : 0.0;
  if (max_val == 0.0) return true;  // zero vector: all sides vanish
  const double cut = rel_tol * max_val;
  double min_nonzero = max_val;
  int nnz = 0;
  double l1 = 0.0, l2sq = 0.0;
  for (int i = 0; i < abs.size(); ++i) {
    if (abs[i] > cut) {
      ++nnz;
      min_nonzero = std::min(min_nonzero, abs[i]);
      l1 += abs[i];
      l2sq += abs[i] * abs[i];
    }
  }
  const double ratio = l1 / std::sqrt(l2sq);
  const double alpha = min_nonzero / max_val;
  const double upper = std::sqrt(static_cast<double>(nnz));
  const double lower = 2.0 * std::sqrt(alpha) / (1.0 + alpha) * upper;
  return ratio >= lower - slack && ratio <= upper + slack;
}

}  // namespace spfts

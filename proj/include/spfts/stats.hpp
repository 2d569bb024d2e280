#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spfts {

double median(std::vector<double> xs);
double quantile(std::vector<double> xs, double prob);  // linear interpolation
double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

// OLS slope of ys on xs.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct MannWhitneyResult {
  double u = 0.0;        // U statistic of the first sample
  double z = 0.0;        // normal approximation with tie correction
  double p_value = 1.0;  // two-sided
};

// Rank-sum test for a location difference between two samples.
MannWhitneyResult mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys);

// Sample autocorrelations at lags 1..max_lag; throws when the series is constant.
Eigen::VectorXd sample_acf(const Eigen::VectorXd& series, int max_lag);

// l1/l2 sandwich for nonnegative vectors:
//   2 sqrt(alpha)/(1+alpha) * sqrt(||x||_0) <= ||x||_1/||x||_2 <= sqrt(||x||_0)
// with alpha the smallest-to-largest nonzero ratio. Entries below
// rel_tol * max are treated as zero. Returns true when the sandwich holds.
bool l1l2_sandwich_holds(const Eigen::VectorXd& x, double rel_tol = 1e-10,
                         double slack = 1e-9);

}  // namespace spfts

#pragma once

#include <vector>

namespace resispike {

double normal_cdf(double z);
// 1 - normal_cdf(z) without cancellation for large z.
double normal_sf(double z);

double sample_mean(const std::vector<double>& xs);
// Unbiased (n - 1) standard deviation.
double sample_sd(const std::vector<double>& xs);

// Linear interpolation between order statistics (R type 7).
double empirical_quantile(std::vector<double> xs, double p);

// sup |F_n - Phi| of the sample against the standard normal.
double ks_distance_normal(std::vector<double> xs);

}  // namespace resispike

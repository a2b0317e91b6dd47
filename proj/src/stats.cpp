#include "resispike/stats.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace resispike {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "sample_mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "sample_sd: need at least two values");
  const double mu = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / double(xs.size() - 1));
}

double empirical_quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "empirical_quantile: p outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double h = (double(xs.size()) - 1.0) * p;
  const auto lo = std::size_t(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - double(lo)) * (xs[hi] - xs[lo]);
}

double ks_distance_normal(std::vector<double> xs) {
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "ks_distance_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  return d;
}

}  // namespace resispike

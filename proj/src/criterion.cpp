#include "resispike/criterion.hpp"

#include "resispike/algebra.hpp"
#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace resispike {

double theta_hat_solve(const Spectrum& bulk, double theta) {
  if (bulk.empty()) throw Error(ErrorCode::InvalidArgument, "theta_hat_solve: empty bulk");
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::NoRoot, "theta_hat_solve: theta must exceed 1");
  }
  if (!(bulk.max() > 0.0)) throw Error(ErrorCode::NoRoot, "theta_hat_solve: bulk is identically zero");
  try {
    return solve_t_transform(bulk, 1.0 / (theta - 1.0));
  } catch (const Error& e) {
    throw Error(ErrorCode::NoRoot, std::string("theta_hat_solve: ") + e.what());
  }
}

double mu_from_alpha2(double theta, double alpha2) {
  const ResidualEigs r = lemma_residual_eigs(theta, alpha2);
  if (r.complex) {
    throw Error(ErrorCode::ComplexBranch, "criterion: negative radicand at theta " + std::to_string(theta) +
                                              ", alpha^2 " + std::to_string(alpha2));
  }
  // Printed arrangement of the plus branch.
  const double q = 1.0 + theta * theta - (theta - 1.0) * (theta - 1.0) * alpha2;
  const double root = std::sqrt(std::max(q * q - 4.0 * theta * theta, 0.0));
  return 0.5 * (theta + alpha2 - theta * alpha2 + (1.0 + (theta - 1.0) * alpha2 + root) / theta);
}

namespace {

double alpha2_fixed_point(const Spectrum& bulk, double theta) {
  const double th = theta_hat_solve(bulk, theta);
  const double m12 = m_functional(bulk, th, 1, 2);
  return theta / ((theta - 1.0) * (theta - 1.0) * th * m12);
}

}  // namespace

double criterion_mu(const Spectrum& bulk_x, const Spectrum& bulk_y, double theta) {
  const double a2 = alpha2_fixed_point(bulk_x, theta) * alpha2_fixed_point(bulk_y, theta);
  return mu_from_alpha2(theta, a2);
}

double criterion_mu_largetheta(const Spectrum& bulk_x, const Spectrum& bulk_y, double theta, SeriesSign sign) {
  const double a2 = alpha2_series(bulk_x, theta, sign) * alpha2_series(bulk_y, theta, sign);
  return mu_from_alpha2(theta, a2);
}

double criterion_detection_threshold(const Spectrum& bulk) {
  if (bulk.empty() || !(bulk.max() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "criterion_detection_threshold: empty bulk");
  }
  double edge = detection_edge(bulk, bulk.dim() + 1, std::nullopt);
  // An atom above the edge rule would put the pole inside; step just past it.
  edge = std::max(edge, bulk.max() * (1.0 + 1e-6) + kPoleGap);
  return 1.0 + 1.0 / t_transform(bulk, edge);
}

double default_regime_switch(const Spectrum& bulk_x, const Spectrum& bulk_y) {
  const double m = double(std::max(bulk_x.dim(), bulk_y.dim()) + 1);
  return 5.0 * std::sqrt(m) * 0.5 * (moment(bulk_x, 2) + moment(bulk_y, 2));
}

std::vector<double> default_theta_grid(const Spectrum& bulk_x, const Spectrum& bulk_y, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "default_theta_grid: need at least two points");
  const double m = double(std::max(bulk_x.dim(), bulk_y.dim()) + 1);
  const double lo = 1.5 * std::max(criterion_detection_threshold(bulk_x), criterion_detection_threshold(bulk_y));
  const double hi = 1e4 * std::sqrt(m);
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "default_theta_grid: empty range");
  std::vector<double> grid(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) grid[i] = std::exp(a + (b - a) * double(i) / double(points - 1));
  grid.back() = hi;
  return grid;
}

CriterionCurve criterion_check(const Spectrum& bulk_x, const Spectrum& bulk_y, const std::vector<double>& theta_grid,
                               const CriterionOptions& options) {
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > theta_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "criterion_check: grid must be strictly increasing");
    }
  }
  CriterionCurve curve;
  curve.regime_switch = options.regime_switch.value_or(default_regime_switch(bulk_x, bulk_y));
  curve.thetas = theta_grid;
  curve.mu.reserve(theta_grid.size());
  curve.alpha2.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    double a2;
    if (theta > curve.regime_switch) {
      a2 = alpha2_series(bulk_x, theta, options.sign) * alpha2_series(bulk_y, theta, options.sign);
    } else {
      a2 = alpha2_fixed_point(bulk_x, theta) * alpha2_fixed_point(bulk_y, theta);
    }
    curve.alpha2.push_back(a2);
    curve.mu.push_back(mu_from_alpha2(theta, a2));
  }
  curve.min_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < curve.mu.size(); ++i) curve.min_step = std::min(curve.min_step, curve.mu[i] - curve.mu[i - 1]);
  if (curve.mu.size() < 2) curve.min_step = 0.0;
  curve.verdict = curve.min_step >= -kMonotoneTol;
  return curve;
}

CriterionCurve criterion_check(const Spectrum& bulk_x, const Spectrum& bulk_y) {
  return criterion_check(bulk_x, bulk_y, default_theta_grid(bulk_x, bulk_y));
}

}  // namespace resispike

#pragma once

#include "resispike/algebra.hpp"
#include "resispike/nulllaw.hpp"
#include "resispike/spike.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace resispike {

enum class MatrixVariant { BothFiltered, FilteredRaw };

const char* to_string(MatrixVariant v) noexcept;
MatrixVariant matrix_variant_from_string(const std::string& s);

constexpr double kUnitWindow = 1e-6;

struct TestOptions {
  double alpha = 0.05;
  MatrixVariant variant = MatrixVariant::BothFiltered;
  bool center = true;
  // The monotonicity check costs a grid of fixed-point solves; simulations
  // switch it off.
  bool check_criterion = true;
};

struct TestDiagnostics {
  bool detectable_x = false;
  bool detectable_y = false;
  bool criterion_evaluated = false;
  bool criterion_ok = false;
  bool swapped = false;  // inputs exchanged so that n_X >= n_Y
  MatrixVariant variant = MatrixVariant::BothFiltered;
  bool degenerate = false;       // spike directions parallel, at most one non-unit eigenvalue
  bool law_calibrated = true;    // false for filtered_raw
  double unit_window = kUnitWindow;
  double theta_unbiased_x = 0.0;
  double theta_unbiased_y = 0.0;
  double angle_sq = 0.0;         // <u_hat_X, u_hat_Y>^2
  std::size_t m = 0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  std::size_t extra_isolated_x = 0;
  std::size_t extra_isolated_y = 0;
  std::vector<std::string> warnings;

  bool operator==(const TestDiagnostics&) const = default;
};

struct TestReport {
  double lambda_max_obs = 1.0;
  double lambda_min_obs = 1.0;
  double p_max = 1.0;
  double p_min = 1.0;
  bool reject = false;
  double alpha_level = 0.05;
  NullLaw law;
  TestDiagnostics diagnostics;

  bool operator==(const TestReport&) const = default;
};

// Non-unit eigenvalues of S_X P_Y S_X for two filtered covariances, from the
// 2x2 compression onto span{u_X, u_Y}. Values within kUnitWindow of 1 are
// reported as 1.
struct ResidualPair {
  double hi = 1.0;
  double lo = 1.0;
  bool degenerate = false;
};
ResidualPair residual_pair(const FilteredCovariance& fx, const FilteredCovariance& fy);

// X, Y: m x n data, rows are variables.
TestReport residual_spike_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TestOptions& options = {});

// Sum of log eigenvalues above rank_tol * max.
double gen_logdet(const Eigen::MatrixXd& a, double rank_tol = 1e-10);

struct ClassicalStats {
  double t1 = 0.0;   // n_X log|a I + b K|
  double t2 = 0.0;   // log of the generalized determinant of K
  double t3 = 0.0;   // trace of K
  double lrt = 0.0;  // (n_X + n_Y) log|a I + b K| - n_Y log|K|
  std::size_t rank = 0;

  bool operator==(const ClassicalStats&) const = default;
};

// K = S_X^{-1/2} S_Y S_X^{-1/2} with the generalized inverse of S_X.
ClassicalStats classical_statistics(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool center = true);

struct StatQuantiles {
  double low = 0.0;
  double high = 0.0;

  bool operator==(const StatQuantiles&) const = default;
};

struct NullQuantiles {
  StatQuantiles t1, t2, t3, lrt;
  std::size_t replicates = 0;

  bool operator==(const NullQuantiles&) const = default;
};

// Empirical (alpha/2, 1 - alpha/2) quantiles of the classical statistics
// when both groups are Gaussian with covariance `common`.
NullQuantiles simulate_null_quantiles(std::size_t m, std::size_t n_x, std::size_t n_y, const PerturbationSpec& common,
                                      std::size_t reps, std::uint64_t seed, double alpha = 0.05, bool center = true,
                                      unsigned workers = 1);

struct BaselineReport {
  ClassicalStats stats;
  NullQuantiles quantiles;
  bool reject_t1 = false;
  bool reject_t2 = false;
  bool reject_t3 = false;
  bool reject_lrt = false;
  double alpha_level = 0.05;

  bool operator==(const BaselineReport&) const = default;
};

bool outside(const StatQuantiles& q, double value);

// Statistics on the data plus null quantiles simulated under the pooled
// plug-in perturbation.
BaselineReport baselines(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t null_reps,
                         std::uint64_t seed, double alpha = 0.05, bool center = true, unsigned workers = 1);

}  // namespace resispike

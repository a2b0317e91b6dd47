#pragma once

#include "resispike/testkit.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace resispike {

enum class Family { ArNormal, StudentT8, Arma };

const char* to_string(Family f) noexcept;
Family family_from_string(const std::string& s);

constexpr std::size_t kArmaBurnIn = 200;

struct ScenarioConfig {
  std::string name = "scenario";
  Family family = Family::ArNormal;
  std::size_t m = 100;
  std::size_t n_x = 500;
  std::size_t n_y = 500;
  double rho = 0.0;  // AR coefficient across observations
  std::array<double, 2> arma_ar{0.6, 0.2};
  std::array<double, 2> arma_ma{0.5, 0.2};
  double theta_x = 5000.0;
  double theta_y = 5000.0;
  std::size_t u_x = 0;  // zero-based basis index
  std::size_t u_y = 0;
  std::size_t replicates = 200;
  std::size_t null_replicates = 200;  // baseline quantiles in power studies
  std::uint64_t seed = 1;
  double alpha = 0.05;
  bool center = false;
  unsigned workers = 1;

  bool operator==(const ScenarioConfig&) const = default;
};

void validate(const ScenarioConfig& config);

// Unperturbed data for one replicate. Streams: group 0 for X, 1 for Y.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> generate(const ScenarioConfig& config, std::size_t replicate_index);

// One m x n block of the family, drawn from (seed, replicate, group).
Eigen::MatrixXd generate_block(const ScenarioConfig& config, std::size_t n, std::uint64_t replicate,
                               std::uint64_t group);

// P^(1/2) data with P = I + (theta - 1) e_u e_u^T: row u scaled by sqrt(theta).
Eigen::MatrixXd apply_perturbation(const Eigen::MatrixXd& data, double theta, std::size_t u_index);
// Same for an arbitrary unit direction.
Eigen::MatrixXd apply_perturbation(const Eigen::MatrixXd& data, const PerturbationSpec& pert);

struct MonteCarloSummary {
  std::string stat_name;
  double empirical_mean = 0.0;
  double empirical_sd = 0.0;
  double theory_mean = 0.0;
  double theory_sd = 0.0;
  std::size_t replicates = 0;

  bool operator==(const MonteCarloSummary&) const = default;
};

struct NullStudyResult {
  MonteCarloSummary lambda_max;
  MonteCarloSummary lambda_min;
  std::vector<double> max_samples;  // replicate order
  std::vector<double> min_samples;
  std::vector<double> p_max;
  std::vector<double> p_min;
  std::vector<bool> rejected;
  // sqrt(m)(lambda_max - lambda+)/sigma+ per replicate, each with its own law.
  std::vector<double> standardized_max;
  std::size_t failures = 0;  // replicates where the test raised

  double rejection_rate() const;

  bool operator==(const NullStudyResult&) const = default;
};

NullStudyResult run_null_study(const ScenarioConfig& config);

struct PowerCell {
  double theta_x = 1.0;
  std::size_t u_x = 0;
  double theta_y = 1.0;
  std::size_t u_y = 0;

  bool operator==(const PowerCell&) const = default;
};

struct PowerRow {
  PowerCell cell;
  double rate_t = 0.0;
  double rate_t1 = 0.0;
  double rate_t2 = 0.0;
  double rate_t3 = 0.0;
  double rate_lrt = 0.0;
  std::size_t replicates = 0;
  std::size_t failures = 0;  // residual spike test errors, counted as non-rejections
  NullQuantiles quantiles;

  bool operator==(const PowerRow&) const = default;
};

// Rejection frequencies at config.alpha. Baseline quantiles come from
// config.null_replicates draws where both groups carry the X perturbation.
std::vector<PowerRow> run_power_study(const ScenarioConfig& config, const std::vector<PowerCell>& cells);

}  // namespace resispike

#pragma once

#include "resispike/spectra.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace resispike {

// P = I + (theta - 1) u u^T
struct PerturbationSpec {
  double theta = 1.0;
  Eigen::VectorXd u;

  static PerturbationSpec canonical(double theta, std::size_t m, std::size_t index = 0);
  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd sqrt_dense() const;
};

// All m eigenvalues of P^(1/2) W P^(1/2), descending, via the secular equation
//   sum_i lambda_i w_i / (z - lambda_i) = 1 / (theta - 1),  w_i = <v_i, u>^2.
std::vector<double> secular_eigenvalues(const EigenDecomposition& w, const PerturbationSpec& pert);

struct AngleResult {
  double tilde_sq = 0.0;            // <u_tilde, u>^2
  double hat_sq = 0.0;              // <u_hat, u>^2 through tilde_sq
  double hat_sq_derivative = 0.0;   // <u_hat, u>^2 through T'_{W,u}
  Eigen::VectorXd u_hat;            // eigenvector of P^(1/2) W P^(1/2) for lambda_s
  double normalization_residual = 0.0;  // | |u_hat| - 1 | after the closed-form scaling
};

AngleResult angle_formulas(const EigenDecomposition& w, const PerturbationSpec& pert, double lambda_s);

struct ResidualEigs {
  double lam_hi = 1.0;
  double lam_lo = 1.0;
  bool complex = false;  // negative radicand; lam_hi = lam_lo = real part
};

// Non-unit eigenvalues of D = P_X^(-1/2) P_Y P_X^(-1/2) with a common theta
// and <u_X, u_Y>^2 = alpha2.
ResidualEigs lemma_residual_eigs(double theta, double alpha2);
// Same with separate spikes (D2).
ResidualEigs lemma_residual_eigs_2theta(double theta_x, double theta_y, double alpha2);

}  // namespace resispike

#pragma once

#include "resispike/algebra.hpp"
#include "resispike/spectra.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace resispike {

struct GaussianApprox {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // already divided by m
  std::vector<std::string> labels;

  bool operator==(const GaussianApprox& o) const {
    return labels == o.labels && mean.size() == o.mean.size() && cov.rows() == o.cov.rows() &&
           cov.cols() == o.cov.cols() && mean == o.mean && cov == o.cov;
  }
};

double min_eigenvalue(const Eigen::MatrixXd& sym);
bool is_psd(const Eigen::MatrixXd& sym, double tol = 1e-10);

// Limit covariance of sqrt(m) (sum lambda^s1/(rho-lambda)^s2 u_p1 u_p2,
// same with r) for invariant unit vectors. The factor 2 applies when p1 = p2.
Eigen::Matrix2d invariant_vector_cov(const SpectralMeasure& measure, double rho, std::array<int, 2> s,
                                     std::array<int, 2> r, bool same_index);
Eigen::Matrix2d invariant_vector_cov(const Spectrum& spec, double rho, std::array<int, 2> s,
                                     std::array<int, 2> r, bool same_index);

// Location rho above the bulk with T(rho) = 1/(theta - 1), flat weights.
double rho_solve(const SpectralMeasure& measure, double theta);

// (1 - a_X^2)(1 - a_X^2) as printed, or the symmetric (1 - a_X^2)(1 - a_Y^2).
enum class AngleTerm { Verbatim, Symmetric };
// Covariance between theta_unbiased_X and <u_X, u_Y>^2: the single-sample
// sigma_{theta,alpha^2,X} multiplied by alpha_Y^2 (Scaled), or used as is.
enum class CrossTerm { Scaled, AsPrinted };

struct JointLawOptions {
  AngleTerm angle_term = AngleTerm::Verbatim;
  CrossTerm cross_term = CrossTerm::Scaled;
};

// Small-theta ingredients of one group.
struct SingleGroupTerms {
  double rho = 0.0;
  double alpha2 = 0.0;
  double var_theta = 0.0;   // sigma^2_theta (times m)
  double var_alpha2 = 0.0;  // sigma^2_alpha^2
  double cov_theta_alpha2 = 0.0;
};

SingleGroupTerms small_theta_terms(const SpectralMeasure& measure, double theta);

struct JointLaws {
  GaussianApprox single_x;  // (theta_unbiased_X, <u_X, u>^2)
  GaussianApprox single_y;
  GaussianApprox joint;     // (theta_unbiased_X, theta_unbiased_Y, <u_X, u_Y>^2)
};

JointLaws joint_law_smalltheta(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m,
                               const JointLawOptions& options = {});
JointLaws joint_law_largetheta(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m);
// Means from the small-theta law, covariances from the large-theta law.
JointLaws joint_law_mixed(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m,
                          const JointLawOptions& options = {});

JointLaws joint_law_smalltheta(const Spectrum& x, const Spectrum& y, double theta, std::size_t m,
                               const JointLawOptions& options = {});
JointLaws joint_law_largetheta(const Spectrum& x, const Spectrum& y, double theta, std::size_t m);
JointLaws joint_law_mixed(const Spectrum& x, const Spectrum& y, double theta, std::size_t m,
                          const JointLawOptions& options = {});

// Three plug-in estimates of <u_hat, u>^2 built from the spectrum of W and
// the weighted functionals sum lambda^r/(rho-lambda)^s <v_i, u>^2.
struct AnglePlugin {
  std::array<double, 3> values{};
  double spread = 0.0;  // max - min
};
AnglePlugin angle_plugin_estimates(const EigenDecomposition& w, const PerturbationSpec& pert, double rho);

// theta / ((theta-1)^2 theta_hat M12(theta_hat)) with weighted M12 and
// theta_hat the top secular root; equals the exact squared angle.
double angle_exact(const EigenDecomposition& w, const PerturbationSpec& pert);

// <u_X, e1><u_Y, e1> + sqrt(M2X - 1) sqrt(M2Y - 1) / theta * z, z ~ N(0, 1/m).
double double_angle(double cos_x, double cos_y, double m2x, double m2y, double theta, double z);

namespace wishart {

// Limit covariance of sqrt(m)(sum lambda u^2, sum lambda^2 u^2).
Eigen::Matrix2d invariant_cov(double c);

double alpha2(double c, double theta);
double var_theta(double c, double theta);
double cov_theta_alpha2(double c, double theta);
double var_alpha2(double c, double theta);
// Joint <u_X, u_Y>^2 variance for equal ratios, from the entries above.
double joint_angle_var(double c, double theta);
// The closed form as printed; disagrees with simulation (see README).
double joint_angle_var_printed(double c, double theta);

// theta -> infinity block: var_theta, cov, var_alpha2, joint angle variance.
double var_theta_large(double c, double theta);
double cov_theta_alpha2_large(double c);
double var_alpha2_large(double c, double theta);
double joint_angle_var_large(double c, double theta);

}  // namespace wishart

}  // namespace resispike

#pragma once

#include "resispike/spectra.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace resispike {

struct SpikeOptions {
  // Rescale so that the bulk (all eigenvalues but the top one) has mean 1.
  bool normalize = true;
  // Effective sample size; used for the detectability edge when known.
  std::optional<double> n_obs;
};

struct SpikeEstimate {
  double theta_hat = 0.0;       // top eigenvalue (after normalization)
  double theta_unbiased = 0.0;  // bias-corrected spike
  Eigen::VectorXd u_hat;        // unit spike eigenvector
  Spectrum bulk;                // remaining m - 1 eigenvalues
  bool detectable = false;
  double detection_edge = 0.0;
  double c_hat = 0.0;           // aspect ratio used by the edge rule
  double scale = 1.0;           // divisor applied to the raw eigenvalues
  std::size_t extra_isolated = 0;  // bulk values above the edge (k > 1 warning)

  std::size_t dim() const noexcept { return bulk.dim() + 1; }
};

// Eigen-decomposition of a sample covariance computed from an m x n data matrix
// (rows are variables). Uses the n x n Gram matrix when n < m.
struct SampleDecomposition {
  std::size_t m = 0;
  std::size_t n = 0;
  double n_eff = 0.0;       // n, or n - 1 after centering
  Eigen::VectorXd values;   // all m eigenvalues of X X^T / n_eff, descending
  Eigen::MatrixXd vectors;  // leading eigenvectors, one column per positive eigenvalue at least
};

SampleDecomposition decompose_sample(const Eigen::MatrixXd& data, bool center);

// BBP-style edge: (1 + sqrt(c))^2 * mean(bulk) + 5 m^(-2/3). Without n the
// ratio comes from the bulk spread, c = M2 / M1^2 - 1.
double detection_edge(const Spectrum& bulk, std::size_t m, std::optional<double> n_obs, double* c_used = nullptr);

SpikeEstimate estimate_spike(const Eigen::MatrixXd& sigma_hat, const SpikeOptions& options = {});
SpikeEstimate estimate_spike(const SampleDecomposition& sample, bool normalize = true);
// Core routine: eigenvalues in descending order plus the top eigenvector.
SpikeEstimate estimate_spike_from_eigen(const Eigen::VectorXd& values, const Eigen::VectorXd& top_vector,
                                        const SpikeOptions& options);

// I + (theta_unbiased - 1) u u^T, kept in rank-one form.
class FilteredCovariance {
 public:
  FilteredCovariance(double theta_unbiased, Eigen::VectorXd u_hat);

  double theta_unbiased() const noexcept { return theta_; }
  const Eigen::VectorXd& u_hat() const noexcept { return u_; }
  std::size_t dim() const noexcept { return std::size_t(u_.size()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd inv_sqrt_dense() const;

 private:
  double theta_;
  Eigen::VectorXd u_;
};

FilteredCovariance filtered_matrix(const SpikeEstimate& est);

// S A S with S = I + (theta^(-1/2) - 1) u u^T, in O(m^2).
Eigen::MatrixXd inv_sqrt_apply(const FilteredCovariance& f, const Eigen::MatrixXd& a);

// Squared cosine between the sample and population spike direction for a
// given theta, from the bulk alone.
double alpha2_from_bulk(const Spectrum& bulk, double theta);
double angle_estimate_alpha2(const SpikeEstimate& est, double theta);

// 1/theta expansion of the same angle. The 1/theta^2 coefficient is
// 1 - 2 M2 + 3 M2^2 - 2 M3; AsPrinted uses +2 M2 instead of -2 M2, which does
// not reduce to 1 for a flat bulk.
enum class SeriesSign { Corrected, AsPrinted };
double alpha2_series(const Spectrum& bulk, double theta, SeriesSign sign = SeriesSign::Corrected);
double angle_estimate_alpha2_largetheta(const SpikeEstimate& est, double theta,
                                        SeriesSign sign = SeriesSign::Corrected);

// theta - 1 + M2: large-theta location of the top sample eigenvalue.
double theta_hat_largetheta(const Spectrum& bulk, double theta);

}  // namespace resispike

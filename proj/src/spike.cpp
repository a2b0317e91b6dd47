#include "resispike/spike.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace resispike {

SampleDecomposition decompose_sample(const Eigen::MatrixXd& data, bool center) {
  const auto m = std::size_t(data.rows());
  const auto n = std::size_t(data.cols());
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "decompose_sample: need at least two variables");
  if (n < (center ? 2u : 1u)) throw Error(ErrorCode::InvalidArgument, "decompose_sample: too few observations");
  if (!data.allFinite()) throw Error(ErrorCode::InvalidArgument, "decompose_sample: non-finite data");

  Eigen::MatrixXd xc = data;
  if (center) xc.colwise() -= data.rowwise().mean();

  SampleDecomposition out;
  out.m = m;
  out.n = n;
  out.n_eff = center ? double(n - 1) : double(n);
  out.values = Eigen::VectorXd::Zero(Eigen::Index(m));

  if (n < m) {
    const Eigen::MatrixXd gram = (xc.transpose() * xc) / out.n_eff;
    const EigenDecomposition g = eig_sym(gram);
    const double top = std::max(g.values[0], 0.0);
    Eigen::Index r = 0;
    while (r < g.values.size() && g.values[r] > kZeroClampRel * top) ++r;
    out.vectors.resize(Eigen::Index(m), std::max<Eigen::Index>(r, 1));
    for (Eigen::Index j = 0; j < r; ++j) {
      out.values[j] = g.values[j];
      out.vectors.col(j) = xc * g.vectors.col(j) / std::sqrt(out.n_eff * g.values[j]);
    }
    if (r == 0) {
      out.vectors.col(0).setZero();
      out.vectors(0, 0) = 1.0;
    }
  } else {
    const Eigen::MatrixXd sigma = (xc * xc.transpose()) / out.n_eff;
    EigenDecomposition e = eig_sym(sigma);
    out.values = e.values.cwiseMax(0.0);
    out.vectors = std::move(e.vectors);
  }
  return out;
}

double detection_edge(const Spectrum& bulk, std::size_t m, std::optional<double> n_obs, double* c_used) {
  const double mean = bulk.mean();
  double c = 0.0;
  if (n_obs && *n_obs > 0.0) {
    c = double(m) / *n_obs;
  } else if (mean > 0.0) {
    c = std::max(moment(bulk, 2) / (mean * mean) - 1.0, 0.0);
  }
  if (c_used) *c_used = c;
  const double r = 1.0 + std::sqrt(c);
  return r * r * mean + 5.0 * std::pow(double(m), -2.0 / 3.0);
}

SpikeEstimate estimate_spike_from_eigen(const Eigen::VectorXd& values, const Eigen::VectorXd& top_vector,
                                        const SpikeOptions& options) {
  const auto m = std::size_t(values.size());
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "estimate_spike: dimension must be at least 2");
  if (std::size_t(top_vector.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "estimate_spike: eigenvector length mismatch");
  }
  double bulk_sum = 0.0;
  for (std::size_t i = 1; i < m; ++i) bulk_sum += std::max(values[Eigen::Index(i)], 0.0);
  const double bulk_mean = bulk_sum / double(m - 1);
  if (!(bulk_mean > 0.0)) throw Error(ErrorCode::ZeroTrace, "estimate_spike: bulk eigenvalues are all zero");

  SpikeEstimate est;
  est.scale = options.normalize ? bulk_mean : 1.0;
  est.theta_hat = values[0] / est.scale;
  std::vector<double> bulk(m - 1);
  for (std::size_t i = 1; i < m; ++i) bulk[i - 1] = std::max(values[Eigen::Index(i)], 0.0) / est.scale;
  est.bulk = Spectrum(std::move(bulk), options.normalize);

  if (est.theta_hat - est.bulk.max() < 1e-9) {
    throw Error(ErrorCode::DegenerateSpectrum, "estimate_spike: top eigenvalue is not separated (gap " +
                                                   std::to_string(est.theta_hat - est.bulk.max()) + ")");
  }
  est.theta_unbiased = 1.0 + 1.0 / t_transform(est.bulk, est.theta_hat);
  est.u_hat = top_vector.normalized();
  est.detection_edge = detection_edge(est.bulk, m, options.n_obs, &est.c_hat);
  est.detectable = est.theta_hat > est.detection_edge;
  for (double v : est.bulk.values()) {
    if (v > est.detection_edge) ++est.extra_isolated;
  }
  return est;
}

SpikeEstimate estimate_spike(const Eigen::MatrixXd& sigma_hat, const SpikeOptions& options) {
  const EigenDecomposition e = eig_sym(sigma_hat);
  (void)e.spectrum();  // PSD check
  return estimate_spike_from_eigen(e.values.cwiseMax(0.0), e.vectors.col(0), options);
}

SpikeEstimate estimate_spike(const SampleDecomposition& sample, bool normalize) {
  SpikeOptions opts;
  opts.normalize = normalize;
  opts.n_obs = sample.n_eff;
  return estimate_spike_from_eigen(sample.values, sample.vectors.col(0), opts);
}

FilteredCovariance::FilteredCovariance(double theta_unbiased, Eigen::VectorXd u_hat)
    : theta_(theta_unbiased), u_(std::move(u_hat)) {
  if (!(theta_ > 0.0) || !std::isfinite(theta_)) {
    throw Error(ErrorCode::InvalidArgument, "FilteredCovariance: spike must be positive");
  }
  if (std::abs(u_.norm() - 1.0) > kUnitTol) throw Error(ErrorCode::NotUnit, "FilteredCovariance: u_hat");
}

Eigen::VectorXd FilteredCovariance::apply(const Eigen::VectorXd& v) const {
  return v + (theta_ - 1.0) * u_.dot(v) * u_;
}

Eigen::MatrixXd FilteredCovariance::dense() const {
  const auto m = Eigen::Index(dim());
  return Eigen::MatrixXd::Identity(m, m) + (theta_ - 1.0) * u_ * u_.transpose();
}

Eigen::MatrixXd FilteredCovariance::inv_sqrt_dense() const {
  const auto m = Eigen::Index(dim());
  return Eigen::MatrixXd::Identity(m, m) + (1.0 / std::sqrt(theta_) - 1.0) * u_ * u_.transpose();
}

FilteredCovariance filtered_matrix(const SpikeEstimate& est) {
  if (!est.detectable) {
    throw Error(ErrorCode::NotDetectable, "filtered_matrix: spike below the detection edge (theta_hat " +
                                              std::to_string(est.theta_hat) + ", edge " +
                                              std::to_string(est.detection_edge) + ")");
  }
  return FilteredCovariance(est.theta_unbiased, est.u_hat);
}

Eigen::MatrixXd inv_sqrt_apply(const FilteredCovariance& f, const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || std::size_t(a.rows()) != f.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "inv_sqrt_apply: matrix does not match filter dimension");
  }
  const double s_coef = 1.0 / std::sqrt(f.theta_unbiased()) - 1.0;
  const Eigen::VectorXd& u = f.u_hat();
  const Eigen::VectorXd w = a * u;
  const double s = u.dot(w);
  Eigen::MatrixXd out = a;
  out.noalias() += s_coef * (u * w.transpose() + w * u.transpose());
  out.noalias() += (s_coef * s_coef * s) * (u * u.transpose());
  return out;
}

double alpha2_from_bulk(const Spectrum& bulk, double theta) {
  if (!(theta > 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha2_from_bulk: theta must exceed 1");
  const double rho = solve_t_transform(bulk, 1.0 / (theta - 1.0));
  const double m12 = m_functional(bulk, rho, 1, 2);
  return theta / ((theta - 1.0) * (theta - 1.0) * rho * m12);
}

double angle_estimate_alpha2(const SpikeEstimate& est, double theta) {
  return alpha2_from_bulk(est.bulk, theta);
}

double alpha2_series(const Spectrum& bulk, double theta, SeriesSign sign) {
  if (theta == 0.0) throw Error(ErrorCode::InvalidArgument, "alpha2_series: theta must be nonzero");
  const double m2 = moment(bulk, 2);
  const double m3 = moment(bulk, 3);
  const double lin = sign == SeriesSign::Corrected ? -2.0 * m2 : 2.0 * m2;
  return 1.0 + (1.0 - m2) / theta + (1.0 + lin + 3.0 * m2 * m2 - 2.0 * m3) / (theta * theta);
}

double angle_estimate_alpha2_largetheta(const SpikeEstimate& est, double theta, SeriesSign sign) {
  return alpha2_series(est.bulk, theta, sign);
}

double theta_hat_largetheta(const Spectrum& bulk, double theta) { return theta - 1.0 + moment(bulk, 2); }

}  // namespace resispike

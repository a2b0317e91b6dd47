#include "resispike/algebra.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace resispike {

PerturbationSpec PerturbationSpec::canonical(double theta, std::size_t m, std::size_t index) {
  if (index >= m) throw Error(ErrorCode::InvalidArgument, "PerturbationSpec::canonical: index out of range");
  PerturbationSpec p;
  p.theta = theta;
  p.u = Eigen::VectorXd::Unit(Eigen::Index(m), Eigen::Index(index));
  return p;
}

Eigen::MatrixXd PerturbationSpec::dense() const {
  const auto m = u.size();
  return Eigen::MatrixXd::Identity(m, m) + (theta - 1.0) * u * u.transpose();
}

Eigen::MatrixXd PerturbationSpec::sqrt_dense() const {
  const auto m = u.size();
  return Eigen::MatrixXd::Identity(m, m) + (std::sqrt(theta) - 1.0) * u * u.transpose();
}

namespace {

struct Pole {
  double value;
  double g;  // value * cluster weight
};

constexpr double kClusterRel = 1e-12;
constexpr double kZeroWeight = 1e-14;

// Bisection for a decreasing function that is positive at lo and nonpositive at hi.
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 2e-16 * std::abs(hi)) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> secular_eigenvalues(const EigenDecomposition& w, const PerturbationSpec& pert) {
  const std::size_t m = w.dim();
  if (std::size_t(pert.u.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "secular_eigenvalues: perturbation dimension mismatch");
  }
  const Eigen::VectorXd weights = projection_weights(w, pert.u);
  std::vector<double> out;
  out.reserve(m);
  if (pert.theta == 1.0) {
    for (std::size_t i = 0; i < m; ++i) out.push_back(w.values[Eigen::Index(i)]);
    return out;
  }
  if (!(pert.theta > 1.0)) throw Error(ErrorCode::InvalidArgument, "secular_eigenvalues: theta must exceed 1");

  const double top = std::max(w.values.maxCoeff(), 0.0);
  const double zero_level = kZeroClampRel * top;
  std::vector<Pole> poles;
  std::size_t i = 0;
  while (i < m) {
    const double lead = w.values[Eigen::Index(i)];
    if (lead <= zero_level) {
      // Null directions of W are unaffected by the perturbation.
      out.push_back(lead);
      ++i;
      continue;
    }
    std::size_t j = i;
    double wsum = 0.0, vsum = 0.0;
    while (j < m && lead - w.values[Eigen::Index(j)] <= kClusterRel * top &&
           w.values[Eigen::Index(j)] > zero_level) {
      wsum += weights[Eigen::Index(j)];
      vsum += w.values[Eigen::Index(j)];
      ++j;
    }
    const std::size_t size = j - i;
    const double value = vsum / double(size);
    if (wsum < kZeroWeight) {
      for (std::size_t k = 0; k < size; ++k) out.push_back(w.values[Eigen::Index(i + k)]);
    } else {
      for (std::size_t k = 0; k + 1 < size; ++k) out.push_back(value);
      poles.push_back({value, value * wsum});
    }
    i = j;
  }

  const double target = 1.0 / (pert.theta - 1.0);
  const auto f = [&](double z) {
    double acc = 0.0;
    for (const Pole& p : poles) acc += p.g / (z - p.value);
    return acc - target;
  };
  if (!poles.empty()) {
    double gsum = 0.0;
    for (const Pole& p : poles) gsum += p.g;
    const double hi = poles.front().value + (pert.theta - 1.0) * gsum;
    if (f(hi) > 1e-12 * target) throw Error(ErrorCode::RootBracketFailure, "secular_eigenvalues: top bracket");
    out.push_back(bisect_decreasing(f, poles.front().value, hi));
    for (std::size_t k = 0; k + 1 < poles.size(); ++k) {
      const double lo = poles[k + 1].value, up = poles[k].value;
      if (!(up > lo)) throw Error(ErrorCode::RootBracketFailure, "secular_eigenvalues: empty interval");
      out.push_back(bisect_decreasing(f, lo, up));
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

AngleResult angle_formulas(const EigenDecomposition& w, const PerturbationSpec& pert, double lambda_s) {
  const Eigen::VectorXd weights = projection_weights(w, pert.u);
  const double theta = pert.theta;
  if (theta == 1.0) throw Error(ErrorCode::InvalidArgument, "angle_formulas: theta must differ from 1");
  const Eigen::VectorXd proj = w.vectors.transpose() * pert.u;
  double a = 0.0, b = 0.0;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(proj.size());
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double lam = w.values[i];
    if (weights[i] < kZeroWeight || lam == 0.0) continue;
    const double gap = lambda_s - lam;
    if (std::abs(gap) < 1e-12 * std::max(std::abs(lambda_s), 1.0)) {
      throw Error(ErrorCode::PoleTooClose, "angle_formulas: lambda_s coincides with a pole");
    }
    a += lam * lam * weights[i] / (gap * gap);
    b += lam * weights[i] / (gap * gap);
    coef[i] = lam * proj[i] / gap;
  }
  const double t1 = theta - 1.0;
  AngleResult r;
  r.tilde_sq = 1.0 / (t1 * t1 * a);
  r.hat_sq = theta * r.tilde_sq / (1.0 + t1 * r.tilde_sq);
  // T'_{W,u}(z) = -sum lambda w / (z - lambda)^2 = -b
  r.hat_sq_derivative = -theta / (t1 * t1 * lambda_s * (-b));

  Eigen::VectorXd u_tilde = w.vectors * coef;
  u_tilde /= u_tilde.norm();
  const double ct = u_tilde.dot(pert.u);
  r.u_hat = (u_tilde + (std::sqrt(theta) - 1.0) * ct * pert.u) / std::sqrt(1.0 + t1 * ct * ct);
  r.normalization_residual = std::abs(r.u_hat.norm() - 1.0);
  return r;
}

namespace {

void check_lemma_args(double alpha2, double theta_x, double theta_y) {
  if (!(theta_x > 0.0) || !(theta_y > 0.0) || !std::isfinite(theta_x) || !std::isfinite(theta_y)) {
    throw Error(ErrorCode::InvalidArgument, "lemma: spikes must be positive");
  }
  if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) {
    throw Error(ErrorCode::InvalidArgument, "lemma: alpha2 must be nonnegative");
  }
}

// Roots of theta_x z^2 - q z + theta_y = 0, which is the shared shape of both
// lemma formulas; the smaller root is taken from the product to avoid
// cancellation.
ResidualEigs quadratic_pair(double q, double radicand, double theta_x, double theta_y) {
  ResidualEigs r;
  if (radicand < -1e-12 * q * q) {
    r.complex = true;
    r.lam_hi = r.lam_lo = q / (2.0 * theta_x);
    return r;
  }
  const double root = std::sqrt(std::max(radicand, 0.0));
  if (q >= 0.0) {
    r.lam_hi = (q + root) / (2.0 * theta_x);
    r.lam_lo = 2.0 * theta_y / (q + root);
  } else {
    r.lam_lo = (q - root) / (2.0 * theta_x);
    r.lam_hi = 2.0 * theta_y / (q - root);
  }
  return r;
}

}  // namespace

ResidualEigs lemma_residual_eigs(double theta, double alpha2) {
  check_lemma_args(alpha2, theta, theta);
  // -(1/(2 theta)) (k +- sqrt(R)), with k = -1 + a - 2 a theta - theta^2 (1 - a)
  // and R = -4 theta^2 + (1 + theta^2 - (theta - 1)^2 a)^2. Note -k equals the
  // bracket inside R.
  const double k = -1.0 + alpha2 - 2.0 * alpha2 * theta - theta * theta * (1.0 - alpha2);
  const double bracket = 1.0 + theta * theta - (theta - 1.0) * (theta - 1.0) * alpha2;
  const double radicand = -4.0 * theta * theta + bracket * bracket;
  return quadratic_pair(-k, radicand, theta, theta);
}

ResidualEigs lemma_residual_eigs_2theta(double theta_x, double theta_y, double alpha2) {
  check_lemma_args(alpha2, theta_x, theta_y);
  // (1/2)(theta_y + a - theta_y a + (1 + (theta_y - 1) a +- sqrt(R2)) / theta_x)
  // = (q +- sqrt(R2)) / (2 theta_x) with q the bracket inside R2.
  const double q = 1.0 + theta_y * theta_x - (theta_y - 1.0) * (theta_x - 1.0) * alpha2;
  const double radicand = -4.0 * theta_y * theta_x + q * q;
  return quadratic_pair(q, radicand, theta_x, theta_y);
}

}  // namespace resispike

#include "resispike/asymptotics.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>

namespace resispike {

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& sym, double tol) {
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sym.cwiseAbs().maxCoeff())) {
    return false;
  }
  return min_eigenvalue(sym) >= -tol;
}

Eigen::Matrix2d invariant_vector_cov(const SpectralMeasure& measure, double rho, std::array<int, 2> s,
                                     std::array<int, 2> r, bool same_index) {
  const auto mf = [&](int a, int b) { return measure.m_functional(rho, a, b); };
  const double ms = mf(s[0], s[1]);
  const double mr = mf(r[0], r[1]);
  const double f = same_index ? 2.0 : 1.0;
  Eigen::Matrix2d out;
  out(0, 0) = f * (mf(2 * s[0], 2 * s[1]) - ms * ms);
  out(1, 1) = f * (mf(2 * r[0], 2 * r[1]) - mr * mr);
  out(0, 1) = out(1, 0) = f * (mf(s[0] + r[0], s[1] + r[1]) - ms * mr);
  return out;
}

Eigen::Matrix2d invariant_vector_cov(const Spectrum& spec, double rho, std::array<int, 2> s, std::array<int, 2> r,
                                     bool same_index) {
  return invariant_vector_cov(EmpiricalMeasure(spec), rho, s, r, same_index);
}

double rho_solve(const SpectralMeasure& measure, double theta) {
  if (!(theta > 1.0)) throw Error(ErrorCode::InvalidArgument, "rho_solve: theta must exceed 1");
  return solve_t_transform(measure, 1.0 / (theta - 1.0));
}

SingleGroupTerms small_theta_terms(const SpectralMeasure& measure, double theta) {
  SingleGroupTerms t;
  try {
    t.rho = rho_solve(measure, theta);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotDetectable, std::string("small-theta law: ") + e.what());
  }
  const double rho = t.rho;
  const auto mf = [&](int a, int b) { return measure.m_functional(rho, a, b); };
  const double m11 = mf(1, 1), m12 = mf(1, 2), m13 = mf(1, 3);
  const double m22 = mf(2, 2), m23 = mf(2, 3), m24 = mf(2, 4);
  const double t1 = theta - 1.0;

  t.alpha2 = theta / (t1 * t1 * rho * m12);
  t.var_theta = 2.0 * (m22 - m11 * m11) / std::pow(m11, 4);

  const double k = 2.0 * rho * m13 / m12 - 1.0;
  const double pre = 2.0 * theta * theta / std::pow(t1 * rho * m12, 4);
  t.var_alpha2 = pre * (rho * rho * (m24 - m12 * m12) + k * k * (m22 - m11 * m11) -
                        2.0 * rho * k * (m23 - m11 * m12));

  const double lead = 2.0 * theta / (m11 * m11 * std::pow(m12, 3) * rho * rho * t1 * t1);
  t.cov_theta_alpha2 = lead * (m11 * m12 * m12 * rho + 2.0 * m13 * m22 * rho +
                               m11 * m11 * (m12 - 2.0 * m13 * rho) - m12 * (m22 + m23 * rho));
  return t;
}

namespace {

void require_dim(std::size_t m, double theta) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "joint law: m must be positive");
  if (!(theta > 1.0) || !std::isfinite(theta)) throw Error(ErrorCode::InvalidArgument, "joint law: theta must exceed 1");
}

GaussianApprox single(double mean_theta, double mean_angle, double v_theta, double cov, double v_angle,
                      std::size_t m, const char* group) {
  GaussianApprox g;
  g.mean = Eigen::Vector2d(mean_theta, mean_angle);
  g.cov.resize(2, 2);
  g.cov << v_theta, cov, cov, v_angle;
  g.cov /= double(m);
  g.labels = {std::string("theta_unbiased_") + group, std::string("angle_sq_") + group};
  return g;
}

GaussianApprox joint(const Eigen::Vector3d& mean, double vx, double vy, double cx, double cy, double va,
                     std::size_t m) {
  GaussianApprox g;
  g.mean = mean;
  g.cov.resize(3, 3);
  g.cov << vx, 0.0, cx, 0.0, vy, cy, cx, cy, va;
  g.cov /= double(m);
  g.labels = {"theta_unbiased_X", "theta_unbiased_Y", "angle_sq_XY"};
  return g;
}

}  // namespace

JointLaws joint_law_smalltheta(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m,
                               const JointLawOptions& options) {
  require_dim(m, theta);
  const SingleGroupTerms tx = small_theta_terms(x, theta);
  const SingleGroupTerms ty = small_theta_terms(y, theta);
  JointLaws out;
  out.single_x = single(theta, tx.alpha2, tx.var_theta, tx.cov_theta_alpha2, tx.var_alpha2, m, "X");
  out.single_y = single(theta, ty.alpha2, ty.var_theta, ty.cov_theta_alpha2, ty.var_alpha2, m, "Y");

  const double axy = tx.alpha2 * ty.alpha2;
  const double last = options.angle_term == AngleTerm::Verbatim ? (1.0 - tx.alpha2) : (1.0 - ty.alpha2);
  const double va = tx.var_alpha2 * ty.alpha2 * ty.alpha2 + ty.var_alpha2 * tx.alpha2 * tx.alpha2 +
                    4.0 * axy * (1.0 - tx.alpha2) * last;
  double cx = tx.cov_theta_alpha2, cy = ty.cov_theta_alpha2;
  if (options.cross_term == CrossTerm::Scaled) {
    cx *= ty.alpha2;
    cy *= tx.alpha2;
  }
  out.joint = joint(Eigen::Vector3d(theta, theta, axy), tx.var_theta, ty.var_theta, cx, cy, va, m);
  // Unscaled cross terms can exceed what the diagonal allows.
  if (!is_psd(out.joint.cov, 1e-10 * std::max(1.0, out.joint.cov.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::NotPsd, "joint_law_smalltheta: as-printed cross terms give an indefinite covariance at theta " +
                                       std::to_string(theta));
  }
  return out;
}

namespace {

struct LargeTerms {
  double m2, m3, m4;
  double var_theta, cov, var_alpha2, q;
};

LargeTerms large_terms(const SpectralMeasure& s, double theta) {
  LargeTerms t;
  t.m2 = s.moment(2);
  t.m3 = s.moment(3);
  t.m4 = s.moment(4);
  t.var_theta = 2.0 * theta * theta * (t.m2 - 1.0);
  t.cov = 2.0 * (2.0 * t.m2 * t.m2 - t.m2 - t.m3);
  t.q = 4.0 * std::pow(t.m2, 3) - t.m2 * t.m2 - 4.0 * t.m2 * t.m3 + t.m4;
  t.var_alpha2 = 2.0 * t.q / (theta * theta);
  return t;
}

}  // namespace

JointLaws joint_law_largetheta(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m) {
  require_dim(m, theta);
  const LargeTerms tx = large_terms(x, theta);
  const LargeTerms ty = large_terms(y, theta);
  JointLaws out;
  out.single_x = single(theta, 1.0 + (1.0 - tx.m2) / theta, tx.var_theta, tx.cov, tx.var_alpha2, m, "X");
  out.single_y = single(theta, 1.0 + (1.0 - ty.m2) / theta, ty.var_theta, ty.cov, ty.var_alpha2, m, "Y");
  const double s = 2.0 * tx.q + 2.0 * ty.q + 4.0 * (tx.m2 - 1.0) * (ty.m2 - 1.0);
  out.joint = joint(Eigen::Vector3d(theta, theta, 1.0 + (2.0 - tx.m2 - ty.m2) / theta), tx.var_theta,
                    ty.var_theta, tx.cov, ty.cov, s / (theta * theta), m);
  return out;
}

JointLaws joint_law_mixed(const SpectralMeasure& x, const SpectralMeasure& y, double theta, std::size_t m,
                          const JointLawOptions& options) {
  JointLaws small = joint_law_smalltheta(x, y, theta, m, options);
  const JointLaws large = joint_law_largetheta(x, y, theta, m);
  small.single_x.cov = large.single_x.cov;
  small.single_y.cov = large.single_y.cov;
  small.joint.cov = large.joint.cov;
  return small;
}

JointLaws joint_law_smalltheta(const Spectrum& x, const Spectrum& y, double theta, std::size_t m,
                               const JointLawOptions& options) {
  return joint_law_smalltheta(EmpiricalMeasure(x), EmpiricalMeasure(y), theta, m, options);
}

JointLaws joint_law_largetheta(const Spectrum& x, const Spectrum& y, double theta, std::size_t m) {
  return joint_law_largetheta(EmpiricalMeasure(x), EmpiricalMeasure(y), theta, m);
}

JointLaws joint_law_mixed(const Spectrum& x, const Spectrum& y, double theta, std::size_t m,
                          const JointLawOptions& options) {
  return joint_law_mixed(EmpiricalMeasure(x), EmpiricalMeasure(y), theta, m, options);
}

AnglePlugin angle_plugin_estimates(const EigenDecomposition& w, const PerturbationSpec& pert, double rho) {
  const double theta = pert.theta;
  if (!(theta > 1.0)) throw Error(ErrorCode::InvalidArgument, "angle_plugin_estimates: theta must exceed 1");
  const Spectrum spec = w.spectrum();
  const double t1 = theta - 1.0;
  const double m12 = m_functional(spec, rho, 1, 2);
  const double m13 = m_functional(spec, rho, 1, 3);
  const double m2 = moment(spec, 2);
  const auto wm = [&](int r, int s) { return weighted_m_functional(w, pert.u, rho, r, s); };
  const double w11 = wm(1, 1), w12 = wm(1, 2);
  const double w1 = wm(1, 0), w2 = wm(2, 0), w3 = wm(3, 0);

  AnglePlugin out;
  // First-order expansion of the exact angle around rho. The middle term
  // carries 1/rho; without it the estimate drifts like rho (W1 - 1).
  out.values[0] = theta / (t1 * t1) *
                  (1.0 / (rho * m12) + (2.0 * m13 / m12 - 1.0 / rho) * (w11 - 1.0 / t1) / (rho * m12 * m12) -
                   (w12 - m12) / (rho * m12 * m12));
  out.values[1] = 1.0 + (1.0 - w2 + 2.0 * m2 * (w1 - 1.0)) / theta +
                  (1.0 - 2.0 * w2 + 3.0 * w2 * w2 - 2.0 * w3) / (theta * theta);
  out.values[2] = 1.0 + 1.0 / theta - w2 / theta + 2.0 * m2 * (w1 - 1.0) / theta;
  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  out.spread = *hi - *lo;
  return out;
}

double angle_exact(const EigenDecomposition& w, const PerturbationSpec& pert) {
  const double theta = pert.theta;
  if (!(theta > 1.0)) throw Error(ErrorCode::InvalidArgument, "angle_exact: theta must exceed 1");
  const double top = secular_eigenvalues(w, pert).front();
  const double t1 = theta - 1.0;
  return theta / (t1 * t1 * top * weighted_m_functional(w, pert.u, top, 1, 2));
}

double double_angle(double cos_x, double cos_y, double m2x, double m2y, double theta, double z) {
  if (m2x < 1.0 || m2y < 1.0) throw Error(ErrorCode::InvalidArgument, "double_angle: M2 below 1");
  return cos_x * cos_y + std::sqrt(m2x - 1.0) * std::sqrt(m2y - 1.0) / theta * z;
}

namespace wishart {

Eigen::Matrix2d invariant_cov(double c) {
  Eigen::Matrix2d out;
  out << 2.0 * c, 2.0 * c * (2.0 + c), 2.0 * c * (2.0 + c), 2.0 * c * (c + 1.0) * (c + 4.0);
  return out;
}

double alpha2(double c, double theta) {
  const double t1 = theta - 1.0;
  return (1.0 - c / (t1 * t1)) / (1.0 + c / t1);
}

double var_theta(double c, double theta) {
  const double t1 = theta - 1.0;
  return -2.0 * c * t1 * t1 * theta * theta / (c - t1 * t1);
}

double cov_theta_alpha2(double c, double theta) {
  const double t1 = theta - 1.0;
  return -2.0 * c * c * t1 * std::pow(theta, 3) / ((c - t1 * t1) * (c + t1) * (c + t1));
}

double var_alpha2(double c, double theta) {
  const double t1 = theta - 1.0;
  const double poly = c * c + (theta * (theta + 2.0) - 2.0) * c + t1 * t1;
  return -2.0 * c * c * theta * theta * poly / ((c - t1 * t1) * std::pow(c + t1, 4));
}

double joint_angle_var(double c, double theta) {
  const double a = alpha2(c, theta);
  return 2.0 * var_alpha2(c, theta) * a * a + 4.0 * a * a * (1.0 - a) * (1.0 - a);
}

double joint_angle_var_printed(double c, double theta) {
  const double t1 = theta - 1.0;
  const double d = c - t1 * t1;
  const double poly = c * c * c + 4.0 * c * c * t1 + c * t1 * (theta * (theta + 5.0) - 5.0) + 2.0 * std::pow(t1, 3);
  return 4.0 * c * c * theta * theta * d * d * poly / (std::pow(t1, 4) * std::pow(c + t1, 7));
}

double var_theta_large(double c, double theta) { return 2.0 * c * theta * theta; }
double cov_theta_alpha2_large(double c) { return 2.0 * c * c; }
double var_alpha2_large(double c, double theta) { return 2.0 * c * c * (c + 1.0) / (theta * theta); }
double joint_angle_var_large(double c, double theta) { return 4.0 * c * c * (c + 2.0) / (theta * theta); }

}  // namespace wishart

}  // namespace resispike

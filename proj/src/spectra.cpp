#include "resispike/spectra.hpp"

#include "resispike/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace resispike {

namespace {

void require_nonempty(const Spectrum& spec, const char* fn) {
  if (spec.empty()) throw Error(ErrorCode::InvalidArgument, std::string(fn) + ": empty spectrum");
}

void require_exponent(int s, int lo, const char* fn) {
  if (s < lo || s > kMaxMoment) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(fn) + ": exponent " + std::to_string(s) + " outside [" +
                    std::to_string(lo) + ", " + std::to_string(kMaxMoment) + "]");
  }
}

void require_unit(const Eigen::VectorXd& u, std::size_t m, const char* fn) {
  if (std::size_t(u.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, std::string(fn) + ": vector length " +
                                                  std::to_string(u.size()) + " vs dimension " +
                                                  std::to_string(m));
  }
  if (std::abs(u.norm() - 1.0) > kUnitTol) {
    throw Error(ErrorCode::NotUnit, std::string(fn) + ": |u| = " + std::to_string(u.norm()));
  }
}

double ipow(double x, int s) {
  double r = 1.0;
  for (int i = 0; i < s; ++i) r *= x;
  return r;
}

}  // namespace

Spectrum::Spectrum(std::vector<double> values, bool normalized) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "Spectrum: non-finite eigenvalue");
  }
  std::sort(values_.begin(), values_.end(), std::greater<>());
  if (!values_.empty()) {
    const double top = std::max(values_.front(), 0.0);
    const double neg_floor = -kNegativeTolRel * top;
    for (double& v : values_) {
      if (v < neg_floor || (top == 0.0 && v < 0.0)) {
        throw Error(ErrorCode::NotPsd, "Spectrum: eigenvalue " + std::to_string(v) +
                                           " below tolerance for max " + std::to_string(top));
      }
      if (v < kZeroClampRel * top) v = 0.0;
    }
  }
  if (normalized) {
    const double m = double(values_.size());
    if (values_.empty() || std::abs(sum() - m) > 1e-8 * m) {
      throw Error(ErrorCode::InvalidArgument, "Spectrum: normalized flag requires sum == dim");
    }
    normalized_ = true;
  }
}

double Spectrum::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

Spectrum EigenDecomposition::spectrum() const {
  return Spectrum(std::vector<double>(values.data(), values.data() + values.size()));
}

EigenDecomposition eig_sym(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eig_sym: matrix is " + std::to_string(matrix.rows()) +
                                                  "x" + std::to_string(matrix.cols()));
  }
  if (!matrix.allFinite()) throw Error(ErrorCode::InvalidArgument, "eig_sym: non-finite entry");
  const double scale = matrix.norm();
  const double asym = (matrix - matrix.transpose()).norm();
  if (asym > kSymmetryTol * scale) {
    throw Error(ErrorCode::NonSymmetric,
                "eig_sym: relative asymmetry " + std::to_string(scale > 0 ? asym / scale : asym));
  }
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "eig_sym: eigensolver did not converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Spectrum normalize_trace(const Spectrum& spec) {
  require_nonempty(spec, "normalize_trace");
  const double total = spec.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTrace, "normalize_trace: trace is zero");
  const double factor = double(spec.dim()) / total;
  std::vector<double> scaled(spec.values());
  for (double& v : scaled) v *= factor;
  // Rescaling can drift the sum by a few ulps; that is well inside the flag tolerance.
  return Spectrum(std::move(scaled), true);
}

double moment(const Spectrum& spec, int s) {
  require_nonempty(spec, "moment");
  require_exponent(s, 1, "moment");
  double acc = 0.0;
  for (double v : spec.values()) acc += ipow(v, s);
  return acc / double(spec.dim());
}

double m_functional(const Spectrum& spec, double rho, int s1, int s2) {
  require_nonempty(spec, "m_functional");
  require_exponent(s1, 0, "m_functional");
  require_exponent(s2, 0, "m_functional");
  if (s2 == 0) return s1 == 0 ? 1.0 : moment(spec, s1);
  if (rho - spec.max() < kPoleGap) {
    throw Error(ErrorCode::PoleTooClose, "m_functional: rho - max = " + std::to_string(rho - spec.max()));
  }
  double acc = 0.0;
  for (double v : spec.values()) acc += ipow(v, s1) / ipow(rho - v, s2);
  return acc / double(spec.dim());
}

double t_transform(const Spectrum& spec, double z) { return m_functional(spec, z, 1, 1); }

Eigen::VectorXd projection_weights(const EigenDecomposition& decomp, const Eigen::VectorXd& u) {
  require_unit(u, decomp.dim(), "projection_weights");
  return (decomp.vectors.transpose() * u).array().square().matrix();
}

double weighted_m_functional(const EigenDecomposition& decomp, const Eigen::VectorXd& u, double rho,
                             int r, int s) {
  require_exponent(r, 0, "weighted_m_functional");
  require_exponent(s, 0, "weighted_m_functional");
  const Eigen::VectorXd w = projection_weights(decomp, u);
  if (s > 0 && rho - decomp.values.maxCoeff() < kPoleGap) {
    throw Error(ErrorCode::PoleTooClose, "weighted_m_functional: rho too close to the spectrum");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double lam = decomp.values[i];
    acc += ipow(lam, r) / ipow(rho - lam, s) * w[i];
  }
  return acc;
}

double weighted_t_transform(const EigenDecomposition& decomp, const Eigen::VectorXd& u, double z) {
  return weighted_m_functional(decomp, u, z, 1, 1);
}

double EmpiricalMeasure::m_functional(double rho, int s1, int s2) const {
  return resispike::m_functional(spec_, rho, s1, s2);
}

double EmpiricalMeasure::moment(int s) const { return resispike::moment(spec_, s); }

double solve_t_transform(const SpectralMeasure& measure, double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw Error(ErrorCode::InvalidArgument, "solve_t_transform: target must be positive");
  }
  const double top = measure.support_max();
  if (!(top > 0.0)) throw Error(ErrorCode::NoRoot, "solve_t_transform: spectrum is identically zero");
  const double m1 = measure.moment(1);
  // T(z) <= m1 / (z - top), so this upper end already sits at or past the root.
  double lo = top;
  double hi = top + m1 / target;
  const auto excess = [&](double z) {
    if (z - top < kPoleGap) return 1.0;
    return measure.m_functional(z, 1, 1) - target;
  };
  if (excess(hi) > 0.0) throw Error(ErrorCode::RootBracketFailure, "solve_t_transform: bad upper bracket");
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-16 * hi) break;
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_t_transform(const Spectrum& spec, double target) {
  return solve_t_transform(EmpiricalMeasure(spec), target);
}

}  // namespace resispike

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace resispike {

// Sorted (descending) nonnegative eigenvalues. Values below 1e-12 * max are
// stored as exact zeros; clearly negative input is rejected.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> values, bool normalized = false);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  bool normalized() const noexcept { return normalized_; }
  bool empty() const noexcept { return values_.empty(); }
  double max() const noexcept { return values_.empty() ? 0.0 : values_.front(); }
  double min() const noexcept { return values_.empty() ? 0.0 : values_.back(); }
  double sum() const noexcept;
  double mean() const noexcept { return values_.empty() ? 0.0 : sum() / double(dim()); }

  bool operator==(const Spectrum&) const = default;

 private:
  std::vector<double> values_;
  bool normalized_ = false;
};

// Raw symmetric eigendecomposition. Eigenvalues keep their sign so that
// indefinite input round-trips; spectrum() enforces the PSD contract.
struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, same order as values

  std::size_t dim() const noexcept { return std::size_t(values.size()); }
  Spectrum spectrum() const;
};

constexpr double kSymmetryTol = 1e-10;
constexpr double kZeroClampRel = 1e-12;
constexpr double kNegativeTolRel = 1e-8;
constexpr double kPoleGap = 1e-9;
constexpr double kUnitTol = 1e-10;
constexpr int kMaxMoment = 8;

EigenDecomposition eig_sym(const Eigen::MatrixXd& matrix);

Spectrum normalize_trace(const Spectrum& spec);

double moment(const Spectrum& spec, int s);

// (1/m) sum lambda^s1 / (rho - lambda)^s2
double m_functional(const Spectrum& spec, double rho, int s1, int s2);

// (1/m) sum lambda / (z - lambda)
double t_transform(const Spectrum& spec, double z);

// <v_i, u>^2 for every eigenvector column.
Eigen::VectorXd projection_weights(const EigenDecomposition& decomp, const Eigen::VectorXd& u);

// sum lambda / (z - lambda) <v_i, u>^2
double weighted_t_transform(const EigenDecomposition& decomp, const Eigen::VectorXd& u, double z);

// sum lambda^r / (rho - lambda)^s <v_i, u>^2 (unnormalized sum, no 1/m)
double weighted_m_functional(const EigenDecomposition& decomp, const Eigen::VectorXd& u, double rho,
                             int r, int s);

// Abstract spectral distribution. Used so that limiting laws (for example
// Marcenko-Pastur) and empirical spectra can feed the same formulas.
class SpectralMeasure {
 public:
  virtual ~SpectralMeasure() = default;
  // integral of x^s1 / (rho - x)^s2 against the measure
  virtual double m_functional(double rho, int s1, int s2) const = 0;
  virtual double moment(int s) const { return m_functional(0.0, s, 0); }
  virtual double support_max() const = 0;
};

class EmpiricalMeasure final : public SpectralMeasure {
 public:
  explicit EmpiricalMeasure(Spectrum spec) : spec_(std::move(spec)) {}
  double m_functional(double rho, int s1, int s2) const override;
  double moment(int s) const override;
  double support_max() const override { return spec_.max(); }
  const Spectrum& spectrum() const noexcept { return spec_; }

 private:
  Spectrum spec_;
};

// Unique z > support_max solving  integral x/(z-x) dmu = target  (target > 0),
// by bisection.
double solve_t_transform(const SpectralMeasure& measure, double target);
double solve_t_transform(const Spectrum& spec, double target);

}  // namespace resispike

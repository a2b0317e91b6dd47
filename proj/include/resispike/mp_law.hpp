#pragma once

#include "resispike/spectra.hpp"

#include <cstddef>
#include <vector>

namespace resispike {

// Marcenko-Pastur law with ratio c = m/n and unit mean. For c > 1 it carries
// an atom of mass 1 - 1/c at zero.
class MarcenkoPasturMeasure final : public SpectralMeasure {
 public:
  explicit MarcenkoPasturMeasure(double c);

  double c() const noexcept { return c_; }
  double lower_edge() const noexcept { return a_; }
  double upper_edge() const noexcept { return b_; }
  double atom_at_zero() const noexcept { return c_ > 1.0 ? 1.0 - 1.0 / c_ : 0.0; }

  // Density of the continuous part.
  double density(double x) const;
  double cdf(double x) const;

  // Requires s1 >= 1 (the zero atom then contributes nothing).
  double m_functional(double rho, int s1, int s2) const override;
  double moment(int s) const override;
  double support_max() const override { return b_; }

  // Deterministic m-point sample: the (i - 1/2)/m quantiles, descending.
  Spectrum quantile_spectrum(std::size_t m) const;

 private:
  double c_;
  double a_;
  double b_;
};

// Closed forms of the first MP moments, M2 = 1+c, M3 = 1+3c+c^2, M4 = 1+6c+6c^2+c^3.
double mp_moment(double c, int s);

}  // namespace resispike

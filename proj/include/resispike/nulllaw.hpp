#pragma once

#include "resispike/spectra.hpp"

#include <cstddef>
#include <string>

namespace resispike {

// Second to fourth spectral moments of one group. Only constructible from
// an actual spectrum or the MP law, so the triple is always realizable.
class MomentSet {
 public:
  static MomentSet from_spectrum(const Spectrum& spec, std::string source = "X");
  static MomentSet from_measure(const SpectralMeasure& measure, std::string source = "X");
  static MomentSet marcenko_pastur(double c, std::string source = "X");

  double m1() const noexcept { return m1_; }
  double m2() const noexcept { return m2_; }
  double m3() const noexcept { return m3_; }
  double m4() const noexcept { return m4_; }
  const std::string& source() const noexcept { return source_; }

 private:
  MomentSet(double m1, double m2, double m3, double m4, std::string source)
      : m1_(m1), m2_(m2), m3_(m3), m4_(m4), source_(std::move(source)) {}
  double m1_, m2_, m3_, m4_;
  std::string source_;
};

struct NullLaw {
  double lambda_plus = 0.0;
  double sigma_plus = 0.0;  // sd of the largest residual spike is sigma_plus / sqrt(m)
  double lambda_minus = 0.0;
  double sigma_minus = 0.0;
  std::size_t m = 0;

  bool operator==(const NullLaw&) const = default;
};

enum class ZoneVariant { BothFiltered, FilteredRaw };

struct ResidualZone {
  double lower = 0.0;
  double upper = 0.0;
  ZoneVariant variant = ZoneVariant::BothFiltered;
};

// sigma+^2 as a function of the two moment triples (the "large" polynomial).
double sigma_plus_sq(const MomentSet& x, const MomentSet& y);
// Limit of sigma_plus_sq when the X bulk degenerates to a point mass at 1.
double sigma_plus_sq_cx0(const MomentSet& y);

NullLaw null_law_general(const MomentSet& x, const MomentSet& y, std::size_t m);
NullLaw null_law_mp(double cx, double cy, std::size_t m);

ResidualZone residual_zone(double c, ZoneVariant variant);

struct PValues {
  double p_max = 0.0;
  double p_min = 0.0;
};

PValues pvalues(const NullLaw& law, double observed_max, double observed_min);

// Gaussian densities of the two extreme residual spikes at x.
double density_max(const NullLaw& law, double x);
double density_min(const NullLaw& law, double x);

}  // namespace resispike

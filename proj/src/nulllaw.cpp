#include "resispike/nulllaw.hpp"

#include "resispike/error.hpp"
#include "resispike/mp_law.hpp"
#include "resispike/stats.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace resispike {

MomentSet MomentSet::from_spectrum(const Spectrum& spec, std::string source) {
  return MomentSet(moment(spec, 1), moment(spec, 2), moment(spec, 3), moment(spec, 4), std::move(source));
}

MomentSet MomentSet::from_measure(const SpectralMeasure& measure, std::string source) {
  return MomentSet(measure.moment(1), measure.moment(2), measure.moment(3), measure.moment(4),
                   std::move(source));
}

MomentSet MomentSet::marcenko_pastur(double c, std::string source) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "MomentSet::marcenko_pastur: c must be positive");
  return MomentSet(1.0, mp_moment(c, 2), mp_moment(c, 3), mp_moment(c, 4), std::move(source));
}

namespace {

// Numerator of the rational part of sigma+^2, one monomial per line.
double block_rational(double x2, double x3, double x4, double y2, double y3, double y4) {
  const auto p = [](double v, int k) { return std::pow(v, k); };
  double a = 0.0;
  a += 9 * p(x2, 4) * y2;
  a += 4 * p(x2, 3) * p(y2, 2);
  a += 4 * p(x2, 3) * y2;
  a += 2 * p(x2, 3) * y3;
  a += -2 * p(x2, 2) * p(y2, 3);
  a += 4 * p(x2, 2) * p(y2, 2);
  a += -11 * p(x2, 2) * y2;
  a += -8 * x3 * p(x2, 2) * y2;
  a += 2 * p(x2, 2) * y2 * y3;
  a += -2 * p(x2, 2) * y3;
  a += p(x2, 2) * y4;
  a += 4 * x2 * p(y2, 3);
  a += x2 * p(y2, 2);
  a += 4 * x2 * y2;
  a += -4 * x3 * x2 * p(y2, 2);
  a += -4 * x3 * x2 * y2;
  a += -2 * x2 * p(y2, 2) * y3;
  a += -4 * x2 * y2 * y3;
  a += -6 * x2 * y3;
  a += 2 * x4 * x2 * y2;
  a += 2 * x2 * y2 * y4;
  a += -2 * x3 * p(y2, 2);
  a += 2 * x3 * y2;
  a += x4 * p(y2, 2);
  a += 4 * p(x2, 5);
  a += 2 * p(x2, 4);
  a += -4 * x3 * p(x2, 3);
  a += -13 * p(x2, 3);
  a += -2 * x3 * p(x2, 2);
  a += x4 * p(x2, 2);
  a += -2 * p(x2, 2);
  a += 10 * x3 * x2;
  a += 4 * x2;
  a += 4 * x3;
  a += -2 * x4;
  a += p(y2, 5);
  a += 2 * p(y2, 4);
  a += -p(y2, 3);
  a += -2 * p(y2, 2);
  a += 4 * y2;
  a += -2 * p(y2, 3) * y3;
  a += -2 * p(y2, 2) * y3;
  a += 2 * y2 * y3;
  a += 4 * y3;
  a += p(y2, 2) * y4;
  a += -2 * y4;
  a += -4;
  return a;
}

// Numerator of the square-root part of sigma+^2.
double block_sqrt(double x2, double x3, double x4, double y2, double y3, double y4) {
  const auto p = [](double v, int k) { return std::pow(v, k); };
  double b = 0.0;
  b += 5 * p(x2, 3) * y2;
  b += -p(x2, 2) * p(y2, 2);
  b += 2 * p(x2, 2) * y2;
  b += 2 * p(x2, 2) * y3;
  b += -x2 * p(y2, 3);
  b += 2 * x2 * p(y2, 2);
  b += -4 * x2 * y2;
  b += -4 * x3 * x2 * y2;
  b += -2 * x2 * y3;
  b += x2 * y4;
  b += -2 * x3 * y2;
  b += x4 * y2;
  b += 4 * p(x2, 4);
  b += 2 * p(x2, 3);
  b += -4 * x3 * p(x2, 2);
  b += -5 * p(x2, 2);
  b += -2 * x3 * x2;
  b += x4 * x2;
  b += 2 * x2;
  b += 2 * x3;
  b += p(y2, 4);
  b += 2 * p(y2, 3);
  b += p(y2, 2);
  b += 2 * y2;
  b += -2 * p(y2, 2) * y3;
  b += -2 * y2 * y3;
  b += -2 * y3;
  b += y2 * y4;
  return b;
}

void require_spread(double s2_sum) {
  if (!(s2_sum > 2.0 + 1e-9)) {
    throw Error(ErrorCode::DegenerateBulk,
                "null law: M2,X + M2,Y = " + std::to_string(s2_sum) + " leaves no residual fluctuation");
  }
}

}  // namespace

double sigma_plus_sq(const MomentSet& x, const MomentSet& y) {
  const double s = x.m2() + y.m2();
  require_spread(s);
  const double d = (s - 2.0) * (s + 2.0);
  const double a = block_rational(x.m2(), x.m3(), x.m4(), y.m2(), y.m3(), y.m4());
  const double b = block_sqrt(x.m2(), x.m3(), x.m4(), y.m2(), y.m3(), y.m4());
  return a / d + b / std::sqrt(d);
}

double sigma_plus_sq_cx0(const MomentSet& y) {
  const double m2 = y.m2(), m3 = y.m3(), m4 = y.m4();
  require_spread(1.0 + m2);
  const auto p = [](double v, int k) { return std::pow(v, k); };
  double a = 0.0;
  a += p(m2, 5);
  a += 2 * p(m2, 4);
  a += -2 * m3 * p(m2, 3);
  a += p(m2, 3);
  a += -4 * m3 * p(m2, 2);
  a += m4 * p(m2, 2);
  a += 2 * p(m2, 2);
  a += 2 * m4 * m2;
  a += 2 * m2;
  a += -2 * m3;
  a += -m4;
  a += -2;
  double b = 0.0;
  b += p(m2, 4);
  b += p(m2, 3);
  b += -2 * m3 * p(m2, 2);
  b += 2 * p(m2, 2);
  b += -2 * m3 * m2;
  b += m4 * m2;
  b += -2 * m3;
  b += m4;
  const double d = (m2 - 1.0) * (m2 + 3.0);
  return a / d + b / std::sqrt(d);
}

namespace {

NullLaw assemble(double m2_pooled, double sp2, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "null law: dimension must be positive");
  if (!(sp2 > 0.0) || !std::isfinite(sp2)) {
    throw Error(ErrorCode::DegenerateBulk, "null law: sigma+^2 = " + std::to_string(sp2));
  }
  const double r = std::sqrt(m2_pooled * m2_pooled - 1.0);
  NullLaw law;
  law.m = m;
  law.lambda_plus = m2_pooled + r;
  // 1 / lambda+ instead of m2 - r: same value, no cancellation.
  law.lambda_minus = 1.0 / law.lambda_plus;
  law.sigma_plus = std::sqrt(sp2);
  law.sigma_minus = law.lambda_minus * law.lambda_minus * law.sigma_plus;
  return law;
}

}  // namespace

NullLaw null_law_general(const MomentSet& x, const MomentSet& y, std::size_t m) {
  const double s = x.m2() + y.m2();
  require_spread(s);
  return assemble(0.5 * s, sigma_plus_sq(x, y), m);
}

NullLaw null_law_mp(double cx, double cy, std::size_t m) {
  if (!(cx > 0.0) || !(cy > 0.0)) throw Error(ErrorCode::InvalidArgument, "null_law_mp: ratios must be positive");
  const double c = 0.5 * (cx + cy);
  const double r = std::sqrt(c * (c + 2.0));
  double poly = 0.0;
  poly += cx * cx * cx;
  poly += cx * cx * cy;
  poly += 3 * cx * cx;
  poly += 4 * cx * cy;
  poly += -cx;
  poly += cy * cy;
  poly += cy;
  double inner = 0.0;
  inner += cx * cx * cx;
  inner += 5 * cx * cx;
  inner += cx * cx * cy;
  inner += 4 * cx * cy;
  inner += 5 * cx;
  inner += 3 * cy;
  inner += cy * cy;
  // The rational term is 4 cx + cx^2; this is what the general polynomial
  // gives at MP moments (8 cx + 2 cx^2 would double it).
  const double sp2 = poly + (4 * cx + cx * cx + inner * r) / (c + 2.0);
  return assemble(1.0 + c, sp2, m);
}

ResidualZone residual_zone(double c, ZoneVariant variant) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual_zone: c must be positive");
  ResidualZone z;
  z.variant = variant;
  if (variant == ZoneVariant::BothFiltered) {
    z.upper = 1.0 + c + std::sqrt(c * c + 2.0 * c);
    z.lower = 1.0 / z.upper;
  } else {
    const double r = 1.0 - std::sqrt(c);
    z.lower = r * r;
    z.upper = 0.5 * (2.0 + c + std::sqrt(c * c + 4.0 * c));
  }
  return z;
}

PValues pvalues(const NullLaw& law, double observed_max, double observed_min) {
  if (law.m == 0 || !(law.sigma_plus > 0.0) || !(law.sigma_minus > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "pvalues: invalid law");
  }
  const double rm = std::sqrt(double(law.m));
  PValues p;
  p.p_max = normal_sf(rm * (observed_max - law.lambda_plus) / law.sigma_plus);
  p.p_min = normal_cdf(rm * (observed_min - law.lambda_minus) / law.sigma_minus);
  return p;
}

namespace {
double gauss_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}
}  // namespace

double density_max(const NullLaw& law, double x) {
  return gauss_pdf(x, law.lambda_plus, law.sigma_plus / std::sqrt(double(law.m)));
}

double density_min(const NullLaw& law, double x) {
  return gauss_pdf(x, law.lambda_minus, law.sigma_minus / std::sqrt(double(law.m)));
}

}  // namespace resispike

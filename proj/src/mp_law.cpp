#include "resispike/mp_law.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace resispike {

namespace {

constexpr double kPi = std::numbers::pi;

// Narayana numbers give the MP moments for any order.
double narayana_moment(double c, int s) {
  double acc = 0.0;
  for (int k = 0; k < s; ++k) {
    // N(s, k+1) = C(s,k) C(s,k+1) / s
    double binom_k = 1.0, binom_k1 = 1.0;
    for (int j = 0; j < k; ++j) binom_k = binom_k * double(s - j) / double(j + 1);
    for (int j = 0; j < k + 1; ++j) binom_k1 = binom_k1 * double(s - j) / double(j + 1);
    acc += binom_k * binom_k1 / double(s) * std::pow(c, k);
  }
  return acc;
}

}  // namespace

MarcenkoPasturMeasure::MarcenkoPasturMeasure(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "MarcenkoPasturMeasure: ratio must be positive");
  }
  const double r = std::sqrt(c);
  a_ = (1.0 - r) * (1.0 - r);
  b_ = (1.0 + r) * (1.0 + r);
}

double MarcenkoPasturMeasure::density(double x) const {
  if (x <= a_ || x >= b_ || x <= 0.0) return 0.0;
  return std::sqrt((b_ - x) * (x - a_)) / (2.0 * kPi * c_ * x);
}

double MarcenkoPasturMeasure::m_functional(double rho, int s1, int s2) const {
  if (s1 < 1 || s1 > kMaxMoment || s2 < 0 || s2 > kMaxMoment) {
    throw Error(ErrorCode::InvalidArgument, "MarcenkoPasturMeasure::m_functional: exponents out of range");
  }
  if (s2 > 0 && rho - b_ < kPoleGap) {
    throw Error(ErrorCode::PoleTooClose, "MarcenkoPasturMeasure::m_functional: rho at the upper edge");
  }
  if (s2 == 0) return narayana_moment(c_, s1);
  // x = mid + half cos(phi) turns the square-root edge into a smooth periodic
  // integrand, so the trapezoid rule converges geometrically.
  const double mid = 0.5 * (a_ + b_);
  const double half = 0.5 * (b_ - a_);
  const double pref = half * half / (2.0 * kPi * c_);
  const auto integrand = [&](double phi) {
    const double x = mid + half * std::cos(phi);
    const double s = std::sin(phi);
    return std::pow(x, s1 - 1) / std::pow(rho - x, s2) * s * s;
  };
  double prev = 0.0;
  for (int n = 64; n <= (1 << 22); n *= 2) {
    const double h = kPi / n;
    double acc = 0.0;
    for (int k = 1; k < n; ++k) acc += integrand(k * h);
    const double value = pref * acc * h;
    if (n > 64 && std::abs(value - prev) <= 1e-15 * std::abs(value)) return value;
    prev = value;
  }
  throw Error(ErrorCode::ConvergenceFailure, "MarcenkoPasturMeasure::m_functional: quadrature stalled");
}

double MarcenkoPasturMeasure::moment(int s) const {
  if (s < 1 || s > kMaxMoment) throw Error(ErrorCode::InvalidArgument, "MarcenkoPasturMeasure::moment");
  return narayana_moment(c_, s);
}

double MarcenkoPasturMeasure::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x >= b_) return 1.0;
  const double atom = atom_at_zero();
  if (x <= a_) return atom;
  // Integrate the density over [a, x] in the angle variable.
  const double mid = 0.5 * (a_ + b_);
  const double half = 0.5 * (b_ - a_);
  const double phi_x = std::acos(std::clamp((x - mid) / half, -1.0, 1.0));
  const int n = 4096;
  const double h = (kPi - phi_x) / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double phi = phi_x + k * h;
    const double xx = mid + half * std::cos(phi);
    const double s = std::sin(phi);
    const double f = xx > 0.0 ? half * half * s * s / (2.0 * kPi * c_ * xx) : 0.0;
    const double wgt = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += wgt * f;
  }
  return atom + acc * h / 3.0;
}

Spectrum MarcenkoPasturMeasure::quantile_spectrum(std::size_t m) const {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "quantile_spectrum: m must be positive");
  // Tabulate the continuous CDF on a fine angle grid, then invert by
  // interpolation.
  const int n = 1 << 15;
  const double mid = 0.5 * (a_ + b_);
  const double half = 0.5 * (b_ - a_);
  const double atom = atom_at_zero();
  std::vector<double> xs(n + 1), cum(n + 1);
  const auto f = [&](double phi) {
    const double x = mid + half * std::cos(phi);
    const double s = std::sin(phi);
    return x > 0.0 ? half * half * s * s / (2.0 * kPi * c_ * x) : 0.0;
  };
  const double h = kPi / n;
  cum[0] = atom;
  xs[0] = a_;
  double prev = f(kPi - 1e-7);  // finite limit when the lower edge is 0
  for (int k = 1; k <= n; ++k) {
    const double phi = kPi - k * h;
    const double cur = f(phi);
    cum[k] = cum[k - 1] + 0.5 * (prev + cur) * h;
    xs[k] = mid + half * std::cos(phi);
    prev = cur;
  }
  const double total = cum[n];
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = 1.0 - (double(i) + 0.5) / double(m);  // descending order
    if (p <= atom) continue;
    const double target = atom + (p - atom) * (total - atom) / (1.0 - atom);
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const std::size_t k = std::clamp<std::size_t>(std::size_t(it - cum.begin()), 1, n);
    const double t = (target - cum[k - 1]) / std::max(cum[k] - cum[k - 1], 1e-300);
    out[i] = xs[k - 1] + std::clamp(t, 0.0, 1.0) * (xs[k] - xs[k - 1]);
  }
  return Spectrum(std::move(out));
}

double mp_moment(double c, int s) {
  switch (s) {
    case 1: return 1.0;
    case 2: return 1.0 + c;
    case 3: return 1.0 + 3.0 * c + c * c;
    case 4: return 1.0 + 6.0 * c + 6.0 * c * c + c * c * c;
    default: return narayana_moment(c, s);
  }
}

}  // namespace resispike

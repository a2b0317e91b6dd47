#pragma once

#include "resispike/spectra.hpp"
#include "resispike/spike.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace resispike {

// theta_hat > max(bulk) with (1/(m-1)) sum lambda/(theta_hat - lambda) = 1/(theta - 1).
double theta_hat_solve(const Spectrum& bulk, double theta);

// Mean of the largest residual spike for a squared angle alpha2 (plus branch).
double mu_from_alpha2(double theta, double alpha2);

double criterion_mu(const Spectrum& bulk_x, const Spectrum& bulk_y, double theta);
// Same with the 1/theta series for both angles.
double criterion_mu_largetheta(const Spectrum& bulk_x, const Spectrum& bulk_y, double theta,
                               SeriesSign sign = SeriesSign::Corrected);

// Smallest theta whose sample spike clears the detection edge of the bulk.
double criterion_detection_threshold(const Spectrum& bulk);
// 5 sqrt(m) times the mean of the two bulk second moments, m = bulk dim + 1.
double default_regime_switch(const Spectrum& bulk_x, const Spectrum& bulk_y);
// 60 log-spaced points from 1.5 times the larger threshold to 1e4 sqrt(m).
std::vector<double> default_theta_grid(const Spectrum& bulk_x, const Spectrum& bulk_y, std::size_t points = 60);

struct CriterionCurve {
  std::vector<double> thetas;
  std::vector<double> mu;
  std::vector<double> alpha2;
  bool verdict = true;
  double regime_switch = 0.0;
  double min_step = 0.0;  // smallest first difference of mu

  bool operator==(const CriterionCurve&) const = default;
};

constexpr double kMonotoneTol = 1e-9;

struct CriterionOptions {
  // Where the series takes over; defaults to default_regime_switch. Use
  // +infinity to stay on the fixed-point path everywhere.
  std::optional<double> regime_switch;
  SeriesSign sign = SeriesSign::Corrected;
};

CriterionCurve criterion_check(const Spectrum& bulk_x, const Spectrum& bulk_y, const std::vector<double>& theta_grid,
                               const CriterionOptions& options = {});
CriterionCurve criterion_check(const Spectrum& bulk_x, const Spectrum& bulk_y);

}  // namespace resispike

#include "resispike/testkit.hpp"

#include "resispike/criterion.hpp"
#include "resispike/error.hpp"
#include "resispike/parallel.hpp"
#include "resispike/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace resispike {

const char* to_string(MatrixVariant v) noexcept {
  return v == MatrixVariant::BothFiltered ? "both_filtered" : "filtered_raw";
}

MatrixVariant matrix_variant_from_string(const std::string& s) {
  if (s == "both_filtered") return MatrixVariant::BothFiltered;
  if (s == "filtered_raw") return MatrixVariant::FilteredRaw;
  throw Error(ErrorCode::InvalidArgument, "unknown matrix variant '" + s + "'");
}

namespace {

double snap_unit(double v) { return std::abs(v - 1.0) < kUnitWindow ? 1.0 : v; }

}  // namespace

ResidualPair residual_pair(const FilteredCovariance& fx, const FilteredCovariance& fy) {
  if (fx.dim() != fy.dim()) throw Error(ErrorCode::DimensionMismatch, "residual_pair: dimensions differ");
  const double tx = fx.theta_unbiased(), ty = fy.theta_unbiased();
  const double g = std::clamp(fx.u_hat().dot(fy.u_hat()), -1.0, 1.0);
  const double s2 = std::max(0.0, 1.0 - g * g);
  // Basis {u_X, normalized component of u_Y orthogonal to u_X}.
  const double b11 = (1.0 + (ty - 1.0) * g * g) / tx;
  const double b12 = (ty - 1.0) * g * std::sqrt(s2) / std::sqrt(tx);
  const double b22 = 1.0 + (ty - 1.0) * s2;
  const double half = 0.5 * (b11 + b22);
  const double d = std::sqrt(0.25 * (b11 - b22) * (b11 - b22) + b12 * b12);
  ResidualPair out;
  out.hi = half + d;
  // det B = theta_Y / theta_X
  out.lo = (ty / tx) / out.hi;
  out.degenerate = s2 <= 1e-12;
  out.hi = snap_unit(out.hi);
  out.lo = snap_unit(out.lo);
  return out;
}

TestReport residual_spike_test(const Eigen::MatrixXd& x_in, const Eigen::MatrixXd& y_in, const TestOptions& options) {
  if (x_in.rows() != y_in.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "residual_spike_test: X has " + std::to_string(x_in.rows()) +
                                                  " variables, Y has " + std::to_string(y_in.rows()));
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "residual_spike_test: alpha must lie in (0, 1)");
  }
  const bool swap = x_in.cols() < y_in.cols();
  const Eigen::MatrixXd& x = swap ? y_in : x_in;
  const Eigen::MatrixXd& y = swap ? x_in : y_in;

  TestReport rep;
  rep.alpha_level = options.alpha;
  TestDiagnostics& dg = rep.diagnostics;
  dg.swapped = swap;
  dg.variant = options.variant;
  dg.m = std::size_t(x.rows());
  dg.n_x = std::size_t(x.cols());
  dg.n_y = std::size_t(y.cols());
  if (swap) dg.warnings.push_back("X and Y exchanged so that the inverted sample is the larger one");

  const SampleDecomposition sx = decompose_sample(x, options.center);
  const SampleDecomposition sy = decompose_sample(y, options.center);
  const SpikeEstimate ex = estimate_spike(sx);
  const SpikeEstimate ey = estimate_spike(sy);
  dg.detectable_x = ex.detectable;
  dg.detectable_y = ey.detectable;
  dg.extra_isolated_x = ex.extra_isolated;
  dg.extra_isolated_y = ey.extra_isolated;
  dg.theta_unbiased_x = ex.theta_unbiased;
  dg.theta_unbiased_y = ey.theta_unbiased;
  const char* lx = swap ? "Y" : "X";
  const char* ly = swap ? "X" : "Y";
  if (!ex.detectable) {
    throw Error(ErrorCode::NotDetectable, std::string("residual_spike_test: no detectable spike in ") + lx +
                                              " (theta_hat " + std::to_string(ex.theta_hat) + ", edge " +
                                              std::to_string(ex.detection_edge) + ")");
  }
  if (!ey.detectable) {
    throw Error(ErrorCode::NotDetectable, std::string("residual_spike_test: no detectable spike in ") + ly +
                                              " (theta_hat " + std::to_string(ey.theta_hat) + ", edge " +
                                              std::to_string(ey.detection_edge) + ")");
  }
  if (ex.extra_isolated > 0 || ey.extra_isolated > 0) {
    dg.warnings.push_back("more than one eigenvalue above the detection edge; only the largest is filtered");
  }

  const FilteredCovariance fx = filtered_matrix(ex);
  const FilteredCovariance fy = filtered_matrix(ey);
  const double g = fx.u_hat().dot(fy.u_hat());
  dg.angle_sq = g * g;

  if (options.variant == MatrixVariant::BothFiltered) {
    const ResidualPair pair = residual_pair(fx, fy);
    rep.lambda_max_obs = pair.hi;
    rep.lambda_min_obs = pair.lo;
    dg.degenerate = pair.degenerate;
  } else {
    dg.law_calibrated = false;
    Eigen::MatrixXd yc = y;
    if (options.center) yc.colwise() -= y.rowwise().mean();
    const Eigen::MatrixXd sigma_y = (yc * yc.transpose()) / (sy.n_eff * ey.scale);
    const EigenDecomposition e = eig_sym(inv_sqrt_apply(fx, sigma_y));
    double hi = -1.0, lo = -1.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      const double v = e.values[i];
      if (std::abs(v - 1.0) < kUnitWindow) continue;
      if (hi < 0.0 || v > hi) hi = v;
      if (lo < 0.0 || v < lo) lo = v;
    }
    rep.lambda_max_obs = hi < 0.0 ? 1.0 : hi;
    rep.lambda_min_obs = lo < 0.0 ? 1.0 : std::max(lo, 0.0);
    dg.warnings.push_back("filtered_raw: p-values use the both_filtered law and are not calibrated");
  }

  rep.law = null_law_general(MomentSet::from_spectrum(ex.bulk, "X"), MomentSet::from_spectrum(ey.bulk, "Y"), dg.m);
  const PValues p = pvalues(rep.law, rep.lambda_max_obs, rep.lambda_min_obs);
  rep.p_max = p.p_max;
  rep.p_min = p.p_min;
  rep.reject = rep.p_max < 0.5 * options.alpha || rep.p_min < 0.5 * options.alpha;

  if (options.check_criterion) {
    try {
      dg.criterion_ok = criterion_check(ex.bulk, ey.bulk).verdict;
      dg.criterion_evaluated = true;
    } catch (const Error& err) {
      dg.warnings.push_back(std::string("criterion not evaluated: ") + err.what());
    }
    if (dg.criterion_evaluated && !dg.criterion_ok) {
      dg.warnings.push_back("criterion failed: the large-theta law may not be the worst case");
    }
  }
  return rep;
}

double gen_logdet(const Eigen::MatrixXd& a, double rank_tol) {
  const EigenDecomposition e = eig_sym(a);
  const double top = e.values.size() ? e.values[0] : 0.0;
  if (!(top > 0.0)) throw Error(ErrorCode::AllZero, "gen_logdet: no positive eigenvalue");
  if (e.values.minCoeff() < -kNegativeTolRel * top) throw Error(ErrorCode::NotPsd, "gen_logdet: matrix is not PSD");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values[i] > rank_tol * top) acc += std::log(e.values[i]);
  }
  return acc;
}

namespace {

constexpr double kRankTol = 1e-10;

ClassicalStats stats_from_decomposition(const SampleDecomposition& sx, const Eigen::MatrixXd& yc, double ny_eff,
                                        std::size_t n_x, std::size_t n_y) {
  const double top = sx.values.size() ? sx.values[0] : 0.0;
  if (!(top > 0.0)) throw Error(ErrorCode::AllZero, "classical_statistics: X covariance is zero");
  Eigen::Index r = 0;
  while (r < sx.values.size() && r < sx.vectors.cols() && sx.values[r] > kRankTol * top) ++r;
  const Eigen::VectorXd inv_sqrt = sx.values.head(r).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd c = sx.vectors.leftCols(r).transpose() * yc;
  c = inv_sqrt.asDiagonal() * c;
  c /= std::sqrt(ny_eff);
  const Eigen::MatrixXd k = c * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::ConvergenceFailure, "classical_statistics: eigensolver");
  const Eigen::VectorXd kappa = es.eigenvalues().cwiseMax(0.0);

  const double nx = double(n_x), ny = double(n_y);
  const double a = nx / (nx + ny), b = ny / (nx + ny);
  const double kmax = kappa.size() ? kappa.maxCoeff() : 0.0;
  double log_mix = double(sx.m - std::size_t(r)) * std::log(a);
  double log_k = 0.0, trace = 0.0;
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    log_mix += std::log(a + b * kappa[i]);
    trace += kappa[i];
    if (kappa[i] > kRankTol * kmax) log_k += std::log(kappa[i]);
  }
  ClassicalStats s;
  s.rank = std::size_t(r);
  s.t1 = nx * log_mix;
  s.t2 = log_k;
  s.t3 = trace;
  s.lrt = (nx + ny) * log_mix - ny * log_k;
  return s;
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& d, bool center) {
  if (!center) return d;
  Eigen::MatrixXd out = d;
  out.colwise() -= d.rowwise().mean();
  return out;
}

}  // namespace

ClassicalStats classical_statistics(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool center) {
  if (x.rows() != y.rows()) throw Error(ErrorCode::DimensionMismatch, "classical_statistics: row counts differ");
  if (y.cols() < (center ? 2 : 1)) throw Error(ErrorCode::InvalidArgument, "classical_statistics: Y too small");
  const SampleDecomposition sx = decompose_sample(x, center);
  const double ny_eff = center ? double(y.cols() - 1) : double(y.cols());
  return stats_from_decomposition(sx, centered(y, center), ny_eff, std::size_t(x.cols()), std::size_t(y.cols()));
}

bool outside(const StatQuantiles& q, double value) { return value < q.low || value > q.high; }

NullQuantiles simulate_null_quantiles(std::size_t m, std::size_t n_x, std::size_t n_y, const PerturbationSpec& common,
                                      std::size_t reps, std::uint64_t seed, double alpha, bool center,
                                      unsigned workers) {
  if (reps < 2) throw Error(ErrorCode::InvalidArgument, "simulate_null_quantiles: need at least two replicates");
  if (std::size_t(common.u.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "simulate_null_quantiles: perturbation dimension");
  }
  std::vector<ClassicalStats> out(reps);
  const double shift = std::sqrt(common.theta) - 1.0;
  parallel_for(reps, workers, [&](std::size_t i) {
    auto rx = make_rng(seed, i, 2);
    auto ry = make_rng(seed, i, 3);
    Eigen::MatrixXd x = standard_normal(Eigen::Index(m), Eigen::Index(n_x), rx);
    Eigen::MatrixXd y = standard_normal(Eigen::Index(m), Eigen::Index(n_y), ry);
    x.noalias() += shift * common.u * (common.u.transpose() * x);
    y.noalias() += shift * common.u * (common.u.transpose() * y);
    out[i] = classical_statistics(x, y, center);
  });
  const auto q = [&](auto field) {
    std::vector<double> v(reps);
    for (std::size_t i = 0; i < reps; ++i) v[i] = out[i].*field;
    return StatQuantiles{empirical_quantile(v, 0.5 * alpha), empirical_quantile(v, 1.0 - 0.5 * alpha)};
  };
  NullQuantiles nq;
  nq.t1 = q(&ClassicalStats::t1);
  nq.t2 = q(&ClassicalStats::t2);
  nq.t3 = q(&ClassicalStats::t3);
  nq.lrt = q(&ClassicalStats::lrt);
  nq.replicates = reps;
  return nq;
}

BaselineReport baselines(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t null_reps,
                         std::uint64_t seed, double alpha, bool center, unsigned workers) {
  BaselineReport rep;
  rep.alpha_level = alpha;
  rep.stats = classical_statistics(x, y, center);

  // Common plug-in perturbation from the pooled, separately centered data.
  Eigen::MatrixXd pooled(x.rows(), x.cols() + y.cols());
  pooled << centered(x, center), centered(y, center);
  PerturbationSpec common;
  const SampleDecomposition sp = decompose_sample(pooled, false);
  try {
    const SpikeEstimate est = estimate_spike(sp);
    common.theta = std::max(est.theta_unbiased, 1.0);
    common.u = est.u_hat;
  } catch (const Error&) {
    common.theta = 1.0;
    common.u = Eigen::VectorXd::Unit(x.rows(), 0);
  }
  rep.quantiles = simulate_null_quantiles(std::size_t(x.rows()), std::size_t(x.cols()), std::size_t(y.cols()), common,
                                          null_reps, seed, alpha, center, workers);
  rep.reject_t1 = outside(rep.quantiles.t1, rep.stats.t1);
  rep.reject_t2 = outside(rep.quantiles.t2, rep.stats.t2);
  rep.reject_t3 = outside(rep.quantiles.t3, rep.stats.t3);
  rep.reject_lrt = outside(rep.quantiles.lrt, rep.stats.lrt);
  return rep;
}

}  // namespace resispike

#include "resispike/simlab.hpp"

#include "resispike/error.hpp"
#include "resispike/parallel.hpp"
#include "resispike/stats.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>

namespace resispike {

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::ArNormal: return "ar_normal";
    case Family::StudentT8: return "student_t8";
    case Family::Arma: return "arma";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "ar_normal") return Family::ArNormal;
  if (s == "student_t8") return Family::StudentT8;
  if (s == "arma") return Family::Arma;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + s + "' (expected ar_normal, student_t8 or arma)");
}

void validate(const ScenarioConfig& c) {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "scenario: " + what); };
  if (c.m == 0 || c.n_x == 0 || c.n_y == 0) bad("m, n_x and n_y must be positive");
  if (!(std::abs(c.rho) < 1.0)) bad("|rho| must be below 1");
  if (!(c.theta_x >= 1.0) || !(c.theta_y >= 1.0)) bad("theta must be at least 1");
  if (c.u_x >= c.m || c.u_y >= c.m) bad("spike index out of range");
  if (c.replicates < 2) bad("replicates must be at least 2");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad("alpha must lie in (0, 1)");
}

Eigen::MatrixXd generate_block(const ScenarioConfig& c, std::size_t n, std::uint64_t replicate, std::uint64_t group) {
  auto rng = make_rng(c.seed, replicate, group);
  const auto m = Eigen::Index(c.m);
  const auto cols = Eigen::Index(n);
  switch (c.family) {
    case Family::ArNormal: {
      Eigen::MatrixXd z = standard_normal(m, cols, rng);
      const double keep = std::sqrt(1.0 - c.rho * c.rho);
      for (Eigen::Index j = 1; j < cols; ++j) z.col(j) = c.rho * z.col(j - 1) + keep * z.col(j);
      return z;
    }
    case Family::StudentT8: {
      Eigen::MatrixXd z = standard_normal(m, cols, rng);
      std::chi_squared_distribution<double> chi(8.0);
      for (Eigen::Index j = 0; j < cols; ++j) z.col(j) /= std::sqrt(chi(rng) / 8.0);
      return z;
    }
    case Family::Arma: {
      const auto total = Eigen::Index(n + kArmaBurnIn);
      std::normal_distribution<double> dist(0.0, 1.0);
      Eigen::MatrixXd out(m, cols);
      std::vector<double> e(static_cast<std::size_t>(total)), v(static_cast<std::size_t>(total));
      for (Eigen::Index i = 0; i < m; ++i) {
        for (auto& x : e) x = dist(rng);
        for (Eigen::Index t = 0; t < total; ++t) {
          const auto at = [&](const std::vector<double>& s, Eigen::Index k) { return k >= 0 ? s[std::size_t(k)] : 0.0; };
          v[std::size_t(t)] = c.arma_ar[0] * at(v, t - 1) + c.arma_ar[1] * at(v, t - 2) + e[std::size_t(t)] +
                              c.arma_ma[0] * at(e, t - 1) + c.arma_ma[1] * at(e, t - 2);
        }
        for (Eigen::Index t = 0; t < cols; ++t) out(i, t) = v[std::size_t(t + Eigen::Index(kArmaBurnIn))];
      }
      // Global standardization: the sample covariance gets trace m.
      out *= std::sqrt(double(m) * double(cols) / out.squaredNorm());
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "generate: unknown family");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> generate(const ScenarioConfig& config, std::size_t replicate_index) {
  validate(config);
  return {generate_block(config, config.n_x, replicate_index, 0), generate_block(config, config.n_y, replicate_index, 1)};
}

Eigen::MatrixXd apply_perturbation(const Eigen::MatrixXd& data, double theta, std::size_t u_index) {
  if (!(theta >= 1.0)) throw Error(ErrorCode::InvalidArgument, "apply_perturbation: theta must be at least 1");
  if (u_index >= std::size_t(data.rows())) throw Error(ErrorCode::InvalidArgument, "apply_perturbation: index");
  Eigen::MatrixXd out = data;
  out.row(Eigen::Index(u_index)) *= std::sqrt(theta);
  return out;
}

Eigen::MatrixXd apply_perturbation(const Eigen::MatrixXd& data, const PerturbationSpec& pert) {
  if (!(pert.theta >= 1.0)) throw Error(ErrorCode::InvalidArgument, "apply_perturbation: theta must be at least 1");
  if (pert.u.size() != data.rows()) throw Error(ErrorCode::DimensionMismatch, "apply_perturbation: dimension");
  Eigen::MatrixXd out = data;
  out.noalias() += (std::sqrt(pert.theta) - 1.0) * pert.u * (pert.u.transpose() * data);
  return out;
}

double NullStudyResult::rejection_rate() const {
  if (rejected.empty()) return 0.0;
  std::size_t k = 0;
  for (bool r : rejected) k += r ? 1 : 0;
  return double(k) / double(rejected.size());
}

NullStudyResult run_null_study(const ScenarioConfig& config) {
  validate(config);
  if (config.theta_x != config.theta_y || config.u_x != config.u_y) {
    throw Error(ErrorCode::InvalidArgument, "run_null_study: groups must share theta and spike direction");
  }
  struct Rep {
    std::optional<TestReport> report;
  };
  std::vector<Rep> reps(config.replicates);
  TestOptions opts;
  opts.alpha = config.alpha;
  opts.center = config.center;
  opts.check_criterion = false;
  parallel_for(config.replicates, resolve_workers(config.workers), [&](std::size_t i) {
    auto [x, y] = generate(config, i);
    x = apply_perturbation(x, config.theta_x, config.u_x);
    y = apply_perturbation(y, config.theta_y, config.u_y);
    try {
      reps[i].report = residual_spike_test(x, y, opts);
    } catch (const Error&) {
      reps[i].report.reset();
    }
  });

  NullStudyResult out;
  std::vector<double> lp, sp, lm, sm;
  const double rm = std::sqrt(double(config.m));
  for (const Rep& r : reps) {
    if (!r.report) {
      ++out.failures;
      continue;
    }
    const TestReport& t = *r.report;
    out.max_samples.push_back(t.lambda_max_obs);
    out.min_samples.push_back(t.lambda_min_obs);
    out.p_max.push_back(t.p_max);
    out.p_min.push_back(t.p_min);
    out.rejected.push_back(t.reject);
    out.standardized_max.push_back(rm * (t.lambda_max_obs - t.law.lambda_plus) / t.law.sigma_plus);
    lp.push_back(t.law.lambda_plus);
    sp.push_back(t.law.sigma_plus / rm);
    lm.push_back(t.law.lambda_minus);
    sm.push_back(t.law.sigma_minus / rm);
  }
  const auto summary = [](const char* name, const std::vector<double>& xs, const std::vector<double>& mu,
                          const std::vector<double>& sd) {
    MonteCarloSummary s;
    s.stat_name = name;
    s.replicates = xs.size();
    if (xs.size() >= 2) {
      s.empirical_mean = sample_mean(xs);
      s.empirical_sd = sample_sd(xs);
      s.theory_mean = sample_mean(mu);
      s.theory_sd = sample_mean(sd);
    }
    return s;
  };
  out.lambda_max = summary("lambda_max", out.max_samples, lp, sp);
  out.lambda_min = summary("lambda_min", out.min_samples, lm, sm);
  return out;
}

std::vector<PowerRow> run_power_study(const ScenarioConfig& config, const std::vector<PowerCell>& cells) {
  validate(config);
  const unsigned workers = resolve_workers(config.workers);
  std::vector<PowerRow> rows;
  rows.reserve(cells.size());
  TestOptions opts;
  opts.alpha = config.alpha;
  opts.center = config.center;
  opts.check_criterion = false;

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const PowerCell& cell = cells[ci];
    if (cell.u_x >= config.m || cell.u_y >= config.m || !(cell.theta_x >= 1.0) || !(cell.theta_y >= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "run_power_study: invalid cell " + std::to_string(ci));
    }
    // Null draws: both groups carry P_X. Replicate indices are offset per
    // cell so each cell has its own null sample.
    const std::uint64_t base = std::uint64_t(ci + 1) << 32;
    std::vector<ClassicalStats> null_stats(config.null_replicates);
    parallel_for(config.null_replicates, workers, [&](std::size_t i) {
      Eigen::MatrixXd x = apply_perturbation(generate_block(config, config.n_x, base + i, 2), cell.theta_x, cell.u_x);
      Eigen::MatrixXd y = apply_perturbation(generate_block(config, config.n_y, base + i, 3), cell.theta_x, cell.u_x);
      null_stats[i] = classical_statistics(x, y, config.center);
    });
    PowerRow row;
    row.cell = cell;
    row.replicates = config.replicates;
    if (config.null_replicates >= 2) {
      const auto q = [&](auto field) {
        std::vector<double> v;
        v.reserve(null_stats.size());
        for (const auto& s : null_stats) v.push_back(s.*field);
        return StatQuantiles{empirical_quantile(v, 0.5 * config.alpha), empirical_quantile(v, 1.0 - 0.5 * config.alpha)};
      };
      row.quantiles.t1 = q(&ClassicalStats::t1);
      row.quantiles.t2 = q(&ClassicalStats::t2);
      row.quantiles.t3 = q(&ClassicalStats::t3);
      row.quantiles.lrt = q(&ClassicalStats::lrt);
      row.quantiles.replicates = config.null_replicates;
    }

    struct Outcome {
      bool t = false, t1 = false, t2 = false, t3 = false, lrt = false, failed = false;
    };
    std::vector<Outcome> res(config.replicates);
    parallel_for(config.replicates, workers, [&](std::size_t i) {
      auto [x, y] = generate(config, i);
      x = apply_perturbation(x, cell.theta_x, cell.u_x);
      y = apply_perturbation(y, cell.theta_y, cell.u_y);
      Outcome& o = res[i];
      try {
        o.t = residual_spike_test(x, y, opts).reject;
      } catch (const Error&) {
        o.failed = true;
      }
      if (row.quantiles.replicates > 0) {
        const ClassicalStats s = classical_statistics(x, y, config.center);
        o.t1 = outside(row.quantiles.t1, s.t1);
        o.t2 = outside(row.quantiles.t2, s.t2);
        o.t3 = outside(row.quantiles.t3, s.t3);
        o.lrt = outside(row.quantiles.lrt, s.lrt);
      }
    });
    const double n = double(config.replicates);
    for (const Outcome& o : res) {
      row.rate_t += o.t ? 1.0 / n : 0.0;
      row.rate_t1 += o.t1 ? 1.0 / n : 0.0;
      row.rate_t2 += o.t2 ? 1.0 / n : 0.0;
      row.rate_t3 += o.t3 ? 1.0 / n : 0.0;
      row.rate_lrt += o.lrt ? 1.0 / n : 0.0;
      row.failures += o.failed ? 1 : 0;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace resispike

#include "resispike/json_io.hpp"

#include "resispike/error.hpp"

#include <cmath>
#include <limits>

namespace resispike {

using nlohmann::json;

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::ParseError, "expected a number, got " + j.dump());
}

namespace {

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_to_json(x));
  return a;
}

std::vector<double> numbers_from(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

double num(const json& j, const char* key) { return number_from_json(j.at(key)); }

}  // namespace

void to_json(json& j, const NullLaw& v) {
  j = json{{"lambda_plus", number_to_json(v.lambda_plus)},
           {"sigma_plus", number_to_json(v.sigma_plus)},
           {"lambda_minus", number_to_json(v.lambda_minus)},
           {"sigma_minus", number_to_json(v.sigma_minus)},
           {"m", v.m}};
}

void from_json(const json& j, NullLaw& v) {
  v.lambda_plus = num(j, "lambda_plus");
  v.sigma_plus = num(j, "sigma_plus");
  v.lambda_minus = num(j, "lambda_minus");
  v.sigma_minus = num(j, "sigma_minus");
  v.m = j.at("m").get<std::size_t>();
}

void to_json(json& j, const TestDiagnostics& v) {
  j = json{{"detectable_x", v.detectable_x},
           {"detectable_y", v.detectable_y},
           {"criterion_evaluated", v.criterion_evaluated},
           {"criterion_ok", v.criterion_ok},
           {"swapped", v.swapped},
           {"matrix_variant", to_string(v.variant)},
           {"degenerate", v.degenerate},
           {"law_calibrated", v.law_calibrated},
           {"unit_window", number_to_json(v.unit_window)},
           {"theta_unbiased_x", number_to_json(v.theta_unbiased_x)},
           {"theta_unbiased_y", number_to_json(v.theta_unbiased_y)},
           {"angle_sq", number_to_json(v.angle_sq)},
           {"m", v.m},
           {"n_x", v.n_x},
           {"n_y", v.n_y},
           {"extra_isolated_x", v.extra_isolated_x},
           {"extra_isolated_y", v.extra_isolated_y},
           {"warnings", v.warnings}};
}

void from_json(const json& j, TestDiagnostics& v) {
  v.detectable_x = j.at("detectable_x").get<bool>();
  v.detectable_y = j.at("detectable_y").get<bool>();
  v.criterion_evaluated = j.at("criterion_evaluated").get<bool>();
  v.criterion_ok = j.at("criterion_ok").get<bool>();
  v.swapped = j.at("swapped").get<bool>();
  v.variant = matrix_variant_from_string(j.at("matrix_variant").get<std::string>());
  v.degenerate = j.at("degenerate").get<bool>();
  v.law_calibrated = j.at("law_calibrated").get<bool>();
  v.unit_window = num(j, "unit_window");
  v.theta_unbiased_x = num(j, "theta_unbiased_x");
  v.theta_unbiased_y = num(j, "theta_unbiased_y");
  v.angle_sq = num(j, "angle_sq");
  v.m = j.at("m").get<std::size_t>();
  v.n_x = j.at("n_x").get<std::size_t>();
  v.n_y = j.at("n_y").get<std::size_t>();
  v.extra_isolated_x = j.at("extra_isolated_x").get<std::size_t>();
  v.extra_isolated_y = j.at("extra_isolated_y").get<std::size_t>();
  v.warnings = j.at("warnings").get<std::vector<std::string>>();
}

void to_json(json& j, const TestReport& v) {
  j = json{{"lambda_max_obs", number_to_json(v.lambda_max_obs)},
           {"lambda_min_obs", number_to_json(v.lambda_min_obs)},
           {"p_max", number_to_json(v.p_max)},
           {"p_min", number_to_json(v.p_min)},
           {"reject", v.reject},
           {"alpha_level", number_to_json(v.alpha_level)},
           {"law", v.law},
           {"diagnostics", v.diagnostics}};
}

void from_json(const json& j, TestReport& v) {
  v.lambda_max_obs = num(j, "lambda_max_obs");
  v.lambda_min_obs = num(j, "lambda_min_obs");
  v.p_max = num(j, "p_max");
  v.p_min = num(j, "p_min");
  v.reject = j.at("reject").get<bool>();
  v.alpha_level = num(j, "alpha_level");
  v.law = j.at("law").get<NullLaw>();
  v.diagnostics = j.at("diagnostics").get<TestDiagnostics>();
}

void to_json(json& j, const ClassicalStats& v) {
  j = json{{"t1", number_to_json(v.t1)},
           {"t2", number_to_json(v.t2)},
           {"t3", number_to_json(v.t3)},
           {"lrt", number_to_json(v.lrt)},
           {"rank", v.rank}};
}

void from_json(const json& j, ClassicalStats& v) {
  v.t1 = num(j, "t1");
  v.t2 = num(j, "t2");
  v.t3 = num(j, "t3");
  v.lrt = num(j, "lrt");
  v.rank = j.at("rank").get<std::size_t>();
}

void to_json(json& j, const StatQuantiles& v) {
  j = json{{"low", number_to_json(v.low)}, {"high", number_to_json(v.high)}};
}

void from_json(const json& j, StatQuantiles& v) {
  v.low = num(j, "low");
  v.high = num(j, "high");
}

void to_json(json& j, const NullQuantiles& v) {
  j = json{{"t1", v.t1}, {"t2", v.t2}, {"t3", v.t3}, {"lrt", v.lrt}, {"replicates", v.replicates}};
}

void from_json(const json& j, NullQuantiles& v) {
  v.t1 = j.at("t1").get<StatQuantiles>();
  v.t2 = j.at("t2").get<StatQuantiles>();
  v.t3 = j.at("t3").get<StatQuantiles>();
  v.lrt = j.at("lrt").get<StatQuantiles>();
  v.replicates = j.at("replicates").get<std::size_t>();
}

void to_json(json& j, const BaselineReport& v) {
  j = json{{"stats", v.stats},
           {"quantiles", v.quantiles},
           {"reject_t1", v.reject_t1},
           {"reject_t2", v.reject_t2},
           {"reject_t3", v.reject_t3},
           {"reject_lrt", v.reject_lrt},
           {"alpha_level", number_to_json(v.alpha_level)}};
}

void from_json(const json& j, BaselineReport& v) {
  v.stats = j.at("stats").get<ClassicalStats>();
  v.quantiles = j.at("quantiles").get<NullQuantiles>();
  v.reject_t1 = j.at("reject_t1").get<bool>();
  v.reject_t2 = j.at("reject_t2").get<bool>();
  v.reject_t3 = j.at("reject_t3").get<bool>();
  v.reject_lrt = j.at("reject_lrt").get<bool>();
  v.alpha_level = num(j, "alpha_level");
}

void to_json(json& j, const CriterionCurve& v) {
  j = json{{"thetas", numbers(v.thetas)},
           {"mu", numbers(v.mu)},
           {"alpha2", numbers(v.alpha2)},
           {"verdict", v.verdict},
           {"regime_switch", number_to_json(v.regime_switch)},
           {"min_step", number_to_json(v.min_step)}};
}

void from_json(const json& j, CriterionCurve& v) {
  v.thetas = numbers_from(j.at("thetas"));
  v.mu = numbers_from(j.at("mu"));
  v.alpha2 = numbers_from(j.at("alpha2"));
  v.verdict = j.at("verdict").get<bool>();
  v.regime_switch = num(j, "regime_switch");
  v.min_step = num(j, "min_step");
}

void to_json(json& j, const MonteCarloSummary& v) {
  j = json{{"stat_name", v.stat_name},
           {"empirical_mean", number_to_json(v.empirical_mean)},
           {"empirical_sd", number_to_json(v.empirical_sd)},
           {"theory_mean", number_to_json(v.theory_mean)},
           {"theory_sd", number_to_json(v.theory_sd)},
           {"replicates", v.replicates}};
}

void from_json(const json& j, MonteCarloSummary& v) {
  v.stat_name = j.at("stat_name").get<std::string>();
  v.empirical_mean = num(j, "empirical_mean");
  v.empirical_sd = num(j, "empirical_sd");
  v.theory_mean = num(j, "theory_mean");
  v.theory_sd = num(j, "theory_sd");
  v.replicates = j.at("replicates").get<std::size_t>();
}

void to_json(json& j, const NullStudyResult& v) {
  j = json{{"lambda_max", v.lambda_max},
           {"lambda_min", v.lambda_min},
           {"max_samples", numbers(v.max_samples)},
           {"min_samples", numbers(v.min_samples)},
           {"p_max", numbers(v.p_max)},
           {"p_min", numbers(v.p_min)},
           {"rejected", v.rejected},
           {"standardized_max", numbers(v.standardized_max)},
           {"failures", v.failures},
           {"rejection_rate", number_to_json(v.rejection_rate())}};
}

void from_json(const json& j, NullStudyResult& v) {
  v.lambda_max = j.at("lambda_max").get<MonteCarloSummary>();
  v.lambda_min = j.at("lambda_min").get<MonteCarloSummary>();
  v.max_samples = numbers_from(j.at("max_samples"));
  v.min_samples = numbers_from(j.at("min_samples"));
  v.p_max = numbers_from(j.at("p_max"));
  v.p_min = numbers_from(j.at("p_min"));
  v.rejected = j.at("rejected").get<std::vector<bool>>();
  v.standardized_max = numbers_from(j.at("standardized_max"));
  v.failures = j.at("failures").get<std::size_t>();
}

void to_json(json& j, const PowerCell& v) {
  j = json{{"theta_x", number_to_json(v.theta_x)},
           {"u_x", v.u_x + 1},
           {"theta_y", number_to_json(v.theta_y)},
           {"u_y", v.u_y + 1}};
}

void from_json(const json& j, PowerCell& v) {
  v.theta_x = num(j, "theta_x");
  v.theta_y = num(j, "theta_y");
  const auto ux = j.at("u_x").get<std::size_t>();
  const auto uy = j.at("u_y").get<std::size_t>();
  if (ux == 0 || uy == 0) throw Error(ErrorCode::ParseError, "spike indices are 1-based");
  v.u_x = ux - 1;
  v.u_y = uy - 1;
}

void to_json(json& j, const PowerRow& v) {
  j = json{{"cell", v.cell},
           {"rate_t", number_to_json(v.rate_t)},
           {"rate_t1", number_to_json(v.rate_t1)},
           {"rate_t2", number_to_json(v.rate_t2)},
           {"rate_t3", number_to_json(v.rate_t3)},
           {"rate_lrt", number_to_json(v.rate_lrt)},
           {"replicates", v.replicates},
           {"failures", v.failures},
           {"quantiles", v.quantiles}};
}

void from_json(const json& j, PowerRow& v) {
  v.cell = j.at("cell").get<PowerCell>();
  v.rate_t = num(j, "rate_t");
  v.rate_t1 = num(j, "rate_t1");
  v.rate_t2 = num(j, "rate_t2");
  v.rate_t3 = num(j, "rate_t3");
  v.rate_lrt = num(j, "rate_lrt");
  v.replicates = j.at("replicates").get<std::size_t>();
  v.failures = j.at("failures").get<std::size_t>();
  v.quantiles = j.at("quantiles").get<NullQuantiles>();
}

void to_json(json& j, const ScenarioConfig& v) {
  j = json{{"name", v.name},
           {"family", to_string(v.family)},
           {"m", v.m},
           {"n_x", v.n_x},
           {"n_y", v.n_y},
           {"rho", number_to_json(v.rho)},
           {"arma_ar", {number_to_json(v.arma_ar[0]), number_to_json(v.arma_ar[1])}},
           {"arma_ma", {number_to_json(v.arma_ma[0]), number_to_json(v.arma_ma[1])}},
           {"theta_x", number_to_json(v.theta_x)},
           {"theta_y", number_to_json(v.theta_y)},
           {"u_x", v.u_x + 1},
           {"u_y", v.u_y + 1},
           {"replicates", v.replicates},
           {"null_replicates", v.null_replicates},
           {"seed", v.seed},
           {"alpha", number_to_json(v.alpha)},
           {"center", v.center},
           {"workers", v.workers}};
}

void from_json(const json& j, ScenarioConfig& v) {
  v.name = j.at("name").get<std::string>();
  v.family = family_from_string(j.at("family").get<std::string>());
  v.m = j.at("m").get<std::size_t>();
  v.n_x = j.at("n_x").get<std::size_t>();
  v.n_y = j.at("n_y").get<std::size_t>();
  v.rho = num(j, "rho");
  const auto ar = numbers_from(j.at("arma_ar"));
  const auto ma = numbers_from(j.at("arma_ma"));
  if (ar.size() != 2 || ma.size() != 2) throw Error(ErrorCode::ParseError, "ARMA coefficients need two values");
  v.arma_ar = {ar[0], ar[1]};
  v.arma_ma = {ma[0], ma[1]};
  v.theta_x = num(j, "theta_x");
  v.theta_y = num(j, "theta_y");
  const auto ux = j.at("u_x").get<std::size_t>();
  const auto uy = j.at("u_y").get<std::size_t>();
  if (ux == 0 || uy == 0) throw Error(ErrorCode::ParseError, "spike indices are 1-based");
  v.u_x = ux - 1;
  v.u_y = uy - 1;
  v.replicates = j.at("replicates").get<std::size_t>();
  v.null_replicates = j.at("null_replicates").get<std::size_t>();
  v.seed = j.at("seed").get<std::uint64_t>();
  v.alpha = num(j, "alpha");
  v.center = j.at("center").get<bool>();
  v.workers = j.at("workers").get<unsigned>();
}

void to_json(json& j, const GaussianApprox& v) {
  json cov = json::array();
  for (Eigen::Index i = 0; i < v.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < v.cov.cols(); ++k) row.push_back(number_to_json(v.cov(i, k)));
    cov.push_back(row);
  }
  j = json{{"labels", v.labels},
           {"mean", numbers(std::vector<double>(v.mean.data(), v.mean.data() + v.mean.size()))},
           {"cov", cov}};
}

void from_json(const json& j, GaussianApprox& v) {
  v.labels = j.at("labels").get<std::vector<std::string>>();
  const auto mean = numbers_from(j.at("mean"));
  v.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), Eigen::Index(mean.size()));
  const auto& cov = j.at("cov");
  v.cov.resize(Eigen::Index(cov.size()), Eigen::Index(cov.size()));
  for (std::size_t i = 0; i < cov.size(); ++i) {
    if (cov[i].size() != cov.size()) throw Error(ErrorCode::ParseError, "covariance must be square");
    for (std::size_t k = 0; k < cov.size(); ++k) v.cov(Eigen::Index(i), Eigen::Index(k)) = number_from_json(cov[i][k]);
  }
}

json envelope(const std::string& kind, json payload) {
  return json{{"schema", kSchemaVersion}, {"kind", kind}, {"result", std::move(payload)}};
}

}  // namespace resispike

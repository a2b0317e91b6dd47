#include "cli.hpp"

#include "resispike/config.hpp"
#include "resispike/criterion.hpp"
#include "resispike/csv.hpp"
#include "resispike/json_io.hpp"
#include "resispike/nulllaw.hpp"
#include "resispike/parallel.hpp"
#include "resispike/simlab.hpp"
#include "resispike/spike.hpp"
#include "resispike/testkit.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace resispike::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return kExitUsage;
    case ErrorCode::ConfigError: return kExitConfig;
    case ErrorCode::NonSymmetric:
    case ErrorCode::ZeroTrace:
    case ErrorCode::NotPsd:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::NotDetectable:
    case ErrorCode::DegenerateBulk:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::AllZero:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NoRoot:
    case ErrorCode::ComplexBranch:
    case ErrorCode::PoleTooClose:
    case ErrorCode::NotUnit:
      return kExitData;
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::RootBracketFailure:
      return kExitSoftware;
  }
  return kExitSoftware;
}

namespace {

// Raised for absent input files so that they map to their own exit code.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFlags {
  bool header = false;
  bool transpose = false;
  std::string delimiter = ",";

  CsvOptions csv() const {
    if (delimiter.size() != 1) throw Error(ErrorCode::InvalidArgument, "--delimiter must be a single character");
    CsvOptions o;
    o.header = header;
    o.transpose = transpose;
    o.delimiter = delimiter[0];
    return o;
  }
};

struct OutputFlags {
  std::string path;
  std::string format = "json";
};

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> replicates;
};

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingInput("input file not found: '" + path + "'");
}

Eigen::MatrixXd load_matrix(const std::string& path, const InputFlags& in) {
  require_file(path);
  return read_csv_file(path, in.csv());
}

Spectrum load_bulk(const std::string& path, const InputFlags& in) {
  const Eigen::MatrixXd m = load_matrix(path, in);
  std::vector<double> v(m.data(), m.data() + m.size());
  return normalize_trace(Spectrum(std::move(v)));
}

void emit_text(const OutputFlags& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + o.path + "'");
  f << text;
}

void emit_json(const OutputFlags& o, const std::string& kind, json payload, std::ostream& out) {
  emit_text(o, envelope(kind, std::move(payload)).dump(2) + "\n", out);
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("RESISPIKE_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return std::uint64_t(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("RESISPIKE_SEED is not an integer: '") + s + "'");
  }
}

// Flag first, then RESISPIKE_SEED, then whatever the caller already has.
std::uint64_t effective_seed(const RunFlags& f, std::uint64_t fallback) {
  if (f.seed) return *f.seed;
  if (auto e = env_seed()) return *e;
  return fallback;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path, const RunFlags& flags) {
  require_file(path);
  std::vector<ScenarioConfig> out = scenarios_from_config(parse_config_file(path));
  for (auto& c : out) {
    c.seed = effective_seed(flags, c.seed);
    if (flags.workers) c.workers = *flags.workers;
    if (flags.replicates) {
      c.replicates = *flags.replicates;
      c.null_replicates = *flags.replicates;
    }
    validate(c);
  }
  return out;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string x_path, y_path;
  double alpha = 0.05;
  std::string variant = "both_filtered";
  bool no_center = false;
  bool no_criterion = false;
  std::size_t baseline_reps = 0;
};

int cmd_test(const TestArgs& a, const InputFlags& in, const OutputFlags& o, const RunFlags& rf, std::ostream& out) {
  const Eigen::MatrixXd x = load_matrix(a.x_path, in);
  const Eigen::MatrixXd y = load_matrix(a.y_path, in);
  TestOptions opts;
  opts.alpha = a.alpha;
  opts.variant = matrix_variant_from_string(a.variant);
  opts.center = !a.no_center;
  opts.check_criterion = !a.no_criterion;
  const TestReport rep = residual_spike_test(x, y, opts);
  json payload = rep;
  if (a.baseline_reps > 0) {
    payload["baselines"] = baselines(x, y, a.baseline_reps, effective_seed(rf, 1), a.alpha, opts.center,
                                     resolve_workers(rf.workers.value_or(1)));
  }
  emit_json(o, "test", std::move(payload), out);
  return rep.reject ? kExitReject : kExitOk;
}

// ---------------------------------------------------------------- null-params

struct NullArgs {
  bool mp = false;
  double cx = 0.0, cy = 0.0;
  std::size_t m = 0;
  std::string x_path, y_path;
  std::string spec_x, spec_y;
  bool no_center = false;
  std::size_t points = 101;
};

json density_samples(const NullLaw& law, std::size_t points, bool upper) {
  const double mu = upper ? law.lambda_plus : law.lambda_minus;
  const double sd = (upper ? law.sigma_plus : law.sigma_minus) / std::sqrt(double(law.m));
  json arr = json::array();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : -4.0 + 8.0 * double(i) / double(points - 1);
    const double xv = mu + t * sd;
    arr.push_back(json::array({xv, upper ? density_max(law, xv) : density_min(law, xv)}));
  }
  return arr;
}

int cmd_null_params(const NullArgs& a, const InputFlags& in, const OutputFlags& o, std::ostream& out) {
  NullLaw law;
  json source;
  const int modes = int(a.mp) + int(!a.x_path.empty() || !a.y_path.empty()) + int(!a.spec_x.empty() || !a.spec_y.empty());
  if (modes != 1) {
    throw Error(ErrorCode::ParseError, "null-params: choose exactly one of --mp, --x/--y, --spectrum-x/--spectrum-y");
  }
  if (a.mp) {
    if (a.m == 0) throw Error(ErrorCode::ParseError, "null-params --mp needs --m");
    law = null_law_mp(a.cx, a.cy, a.m);
    source = {{"mode", "mp"}, {"cx", a.cx}, {"cy", a.cy}};
  } else if (!a.x_path.empty()) {
    if (a.y_path.empty()) throw Error(ErrorCode::ParseError, "null-params: --x needs --y");
    const Eigen::MatrixXd x = load_matrix(a.x_path, in);
    const Eigen::MatrixXd y = load_matrix(a.y_path, in);
    if (x.rows() != y.rows()) throw Error(ErrorCode::DimensionMismatch, "null-params: X and Y row counts differ");
    const bool swap = x.cols() < y.cols();
    const SpikeEstimate ex = estimate_spike(decompose_sample(swap ? y : x, !a.no_center));
    const SpikeEstimate ey = estimate_spike(decompose_sample(swap ? x : y, !a.no_center));
    law = null_law_general(MomentSet::from_spectrum(ex.bulk, "X"), MomentSet::from_spectrum(ey.bulk, "Y"),
                           std::size_t(x.rows()));
    source = {{"mode", "data"}, {"swapped", swap}};
  } else {
    if (a.spec_x.empty() || a.spec_y.empty()) {
      throw Error(ErrorCode::ParseError, "null-params: give both --spectrum-x and --spectrum-y");
    }
    const Spectrum bx = load_bulk(a.spec_x, in);
    const Spectrum by = load_bulk(a.spec_y, in);
    const std::size_t m = a.m ? a.m : std::max(bx.dim(), by.dim()) + 1;
    law = null_law_general(MomentSet::from_spectrum(bx, "X"), MomentSet::from_spectrum(by, "Y"), m);
    source = {{"mode", "spectra"}};
  }
  json payload;
  payload["law"] = law;
  payload["source"] = source;
  payload["density_max"] = density_samples(law, a.points, true);
  payload["density_min"] = density_samples(law, a.points, false);
  emit_json(o, "null-params", std::move(payload), out);
  return kExitOk;
}

// ---------------------------------------------------------------- criterion

struct CriterionArgs {
  std::string config;
  std::string x_path, y_path;
  bool no_center = false;
  std::size_t points = 60;
};

CriterionCurve curve_from_data(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool center, std::size_t points) {
  const SpikeEstimate ex = estimate_spike(decompose_sample(x, center));
  const SpikeEstimate ey = estimate_spike(decompose_sample(y, center));
  return criterion_check(ex.bulk, ey.bulk, default_theta_grid(ex.bulk, ey.bulk, points));
}

int cmd_criterion(const CriterionArgs& a, const InputFlags& in, const OutputFlags& o, const RunFlags& rf,
                  std::ostream& out) {
  std::vector<std::pair<std::string, CriterionCurve>> curves;
  if (!a.config.empty()) {
    for (const ScenarioConfig& c : load_scenarios(a.config, rf)) {
      auto [x, y] = generate(c, 0);
      x = apply_perturbation(x, c.theta_x, c.u_x);
      y = apply_perturbation(y, c.theta_y, c.u_y);
      curves.emplace_back(c.name, curve_from_data(x, y, c.center, a.points));
    }
  } else {
    if (a.x_path.empty() || a.y_path.empty()) {
      throw Error(ErrorCode::ParseError, "criterion: give a config file or both --x and --y");
    }
    curves.emplace_back("data", curve_from_data(load_matrix(a.x_path, in), load_matrix(a.y_path, in), !a.no_center,
                                                a.points));
  }
  if (o.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, curve] : curves) {
      for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
        rows.push_back({name, format_double(curve.thetas[i]), format_double(curve.mu[i]),
                        format_double(curve.alpha2[i]), curve.verdict ? "true" : "false"});
      }
    }
    std::ostringstream s;
    write_csv_table(s, {"scenario", "theta", "mu", "alpha2", "verdict"}, rows);
    emit_text(o, s.str(), out);
  } else {
    json arr = json::array();
    for (const auto& [name, curve] : curves) arr.push_back({{"name", name}, {"curve", curve}});
    emit_json(o, "criterion", {{"scenarios", arr}}, out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate / power

int cmd_simulate(const std::string& config, bool samples, const OutputFlags& o, const RunFlags& rf, std::ostream& out) {
  const auto scenarios = load_scenarios(config, rf);
  std::vector<std::pair<ScenarioConfig, NullStudyResult>> results;
  for (const auto& c : scenarios) results.emplace_back(c, run_null_study(c));
  if (o.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [c, r] : results) {
      for (const MonteCarloSummary* s : {&r.lambda_max, &r.lambda_min}) {
        rows.push_back({c.name, s->stat_name, format_double(s->empirical_mean), format_double(s->empirical_sd),
                        format_double(s->theory_mean), format_double(s->theory_sd), std::to_string(s->replicates),
                        std::to_string(r.failures), format_double(r.rejection_rate())});
      }
    }
    std::ostringstream s;
    write_csv_table(s, {"scenario", "stat", "empirical_mean", "empirical_sd", "theory_mean", "theory_sd",
                        "replicates", "failures", "rejection_rate"},
                    rows);
    emit_text(o, s.str(), out);
  } else {
    json arr = json::array();
    for (const auto& [c, r] : results) {
      json item = {{"name", c.name}, {"config", c}};
      if (samples) {
        item["result"] = r;
      } else {
        item["result"] = {{"lambda_max", r.lambda_max},
                          {"lambda_min", r.lambda_min},
                          {"failures", r.failures},
                          {"rejection_rate", r.rejection_rate()}};
      }
      arr.push_back(item);
    }
    emit_json(o, "simulate", {{"scenarios", arr}}, out);
  }
  return kExitOk;
}

int cmd_power(const std::string& config, const OutputFlags& o, const RunFlags& rf, std::ostream& out) {
  const auto scenarios = load_scenarios(config, rf);
  std::vector<std::pair<ScenarioConfig, PowerRow>> results;
  for (const auto& c : scenarios) {
    const PowerCell cell{c.theta_x, c.u_x, c.theta_y, c.u_y};
    results.emplace_back(c, run_power_study(c, {cell}).front());
  }
  if (o.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [c, r] : results) {
      rows.push_back({c.name, std::to_string(c.m), std::to_string(c.n_x), std::to_string(c.n_y),
                      format_double(r.cell.theta_x), std::to_string(r.cell.u_x + 1), format_double(r.cell.theta_y),
                      std::to_string(r.cell.u_y + 1), format_double(r.rate_t), format_double(r.rate_t1),
                      format_double(r.rate_t2), format_double(r.rate_t3), format_double(r.rate_lrt),
                      std::to_string(r.replicates), std::to_string(r.failures)});
    }
    std::ostringstream s;
    write_csv_table(s, {"scenario", "m", "n_x", "n_y", "theta_x", "u_x", "theta_y", "u_y", "T", "T1", "T2", "T3",
                        "LRT", "replicates", "failures"},
                    rows);
    emit_text(o, s.str(), out);
  } else {
    json arr = json::array();
    for (const auto& [c, r] : results) arr.push_back({{"name", c.name}, {"config", c}, {"row", r}});
    emit_json(o, "power", {{"scenarios", arr}}, out);
  }
  return kExitOk;
}

void add_input_flags(CLI::App* app, InputFlags& in) {
  app->add_flag("--header", in.header, "Skip the first line of each CSV file");
  app->add_flag("--transpose", in.transpose, "CSV rows are observations instead of variables");
  app->add_option("--delimiter", in.delimiter, "CSV field delimiter")->capture_default_str();
}

void add_output_flags(CLI::App* app, OutputFlags& o, bool csv) {
  app->add_option("-o,--output", o.path, "Write the result to this file instead of stdout");
  if (csv) {
    app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  }
}

void add_run_flags(CLI::App* app, RunFlags& r) {
  app->add_option("--seed", r.seed, "Random seed (falls back to RESISPIKE_SEED, then the config)");
  app->add_option("--workers", r.workers, "Worker threads; 0 uses all cores");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Residual-spike two-sample covariance test", "resispike"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "resispike 0.1.0");

  InputFlags in;
  OutputFlags o;
  RunFlags rf;

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Test equality of two spiked covariance matrices");
  test->add_option("x", ta.x_path, "CSV data for group X (rows are variables)")->required();
  test->add_option("y", ta.y_path, "CSV data for group Y")->required();
  test->add_option("--alpha", ta.alpha, "Test level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  test->add_option("--variant", ta.variant, "Product matrix")
      ->check(CLI::IsMember({"both_filtered", "filtered_raw"}))
      ->capture_default_str();
  test->add_flag("--no-center", ta.no_center, "Do not subtract row means");
  test->add_flag("--no-criterion", ta.no_criterion, "Skip the monotonicity criterion");
  test->add_option("--baselines", ta.baseline_reps, "Also run T1/T2/T3 with this many null replicates");
  add_input_flags(test, in);
  add_output_flags(test, o, false);
  add_run_flags(test, rf);

  NullArgs na;
  auto* null = app.add_subcommand("null-params", "Null law of the extreme residual spikes");
  null->add_flag("--mp", na.mp, "Marcenko-Pastur bulks");
  null->add_option("--cx", na.cx, "m / n_X for --mp");
  null->add_option("--cy", na.cy, "m / n_Y for --mp");
  null->add_option("--m", na.m, "Dimension");
  null->add_option("--x", na.x_path, "CSV data for group X");
  null->add_option("--y", na.y_path, "CSV data for group Y");
  null->add_option("--spectrum-x", na.spec_x, "Bulk eigenvalues of X (any CSV shape)");
  null->add_option("--spectrum-y", na.spec_y, "Bulk eigenvalues of Y");
  null->add_flag("--no-center", na.no_center, "Do not subtract row means");
  null->add_option("--points", na.points, "Density samples per curve")->capture_default_str();
  add_input_flags(null, in);
  add_output_flags(null, o, false);

  CriterionArgs ca;
  auto* crit = app.add_subcommand("criterion", "Monotonicity criterion curves");
  crit->add_option("config", ca.config, "Scenario config file");
  crit->add_option("--x", ca.x_path, "CSV data for group X");
  crit->add_option("--y", ca.y_path, "CSV data for group Y");
  crit->add_flag("--no-center", ca.no_center, "Do not subtract row means");
  crit->add_option("--points", ca.points, "Grid size")->capture_default_str();
  add_input_flags(crit, in);
  add_output_flags(crit, o, true);
  add_run_flags(crit, rf);

  std::string sim_config;
  bool samples = false;
  auto* sim = app.add_subcommand("simulate", "Null Monte Carlo study of the extreme residual spikes");
  sim->add_option("config", sim_config, "Scenario config file")->required();
  sim->add_flag("--samples", samples, "Include per-replicate values in JSON");
  sim->add_option("--replicates", rf.replicates, "Override the replicate count");
  add_output_flags(sim, o, true);
  add_run_flags(sim, rf);

  std::string power_config;
  auto* power = app.add_subcommand("power", "Detection rates of T and the classical statistics");
  power->add_option("config", power_config, "Scenario config file, one cell per section")->required();
  power->add_option("--replicates", rf.replicates, "Override the replicate counts");
  add_output_flags(power, o, true);
  add_run_flags(power, rf);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*test) return cmd_test(ta, in, o, rf, out);
    if (*null) return cmd_null_params(na, in, o, out);
    if (*crit) return cmd_criterion(ca, in, o, rf, out);
    if (*sim) return cmd_simulate(sim_config, samples, o, rf, out);
    if (*power) return cmd_power(power_config, o, rf, out);
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSoftware;
  }
  return kExitUsage;
}

}  // namespace resispike::cli

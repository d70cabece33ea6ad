// Command-line front end: fit the extreme-treatment-effect estimator on CSV
// data, extrapolate the dose-response with bootstrap intervals, generate
// simulation datasets, and run the benchmark tables.
//
// Exit codes: 0 ok, 2 usage/parse error, 3 estimation error, 4 benchmark
// abort.

#include "tailfx/tailfx.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitBenchAbort = 4;
constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double checked(double v, const char* name) {
  if (!std::isfinite(v))
    throw tailfx::Error(std::string("non-finite result for ") + name);
  return v;
}

json vector_to_json(const Eigen::VectorXd& v, const char* name) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(checked(v[i], name));
  return arr;
}

tailfx::CsvDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path);
  return tailfx::read_csv(in);
}

void write_output(const json& report, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + output_path);
  out << report.dump(2) << '\n';
}

std::vector<double> parse_comma_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &consumed);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + item + "' as a number");
    }
    if (consumed != item.size() || !std::isfinite(v))
      throw UsageError("cannot parse '" + item + "' as a number");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("empty vector argument");
  return values;
}

// Validates that a numeric flag lies in (lo, hi) or (lo, hi].
CLI::Validator interval_validator(double lo, double hi, bool include_hi) {
  return CLI::Validator(
      [lo, hi, include_hi](std::string& input) -> std::string {
        double v = 0.0;
        try {
          std::size_t consumed = 0;
          v = std::stod(input, &consumed);
          if (consumed != input.size()) throw std::invalid_argument(input);
        } catch (const std::exception&) {
          return "cannot parse '" + input + "' as a number";
        }
        const bool ok = v > lo && (include_hi ? v <= hi : v < hi);
        if (ok) return {};
        return "value " + input + " must be in (" + std::to_string(lo) + "," +
               std::to_string(hi) + (include_hi ? "]" : ")");
      },
      "INTERVAL");
}

struct EstimatorFlags {
  double q = 0.95;
  std::string theta_features = "tau";
  bool outcome_intercept = true;
  bool covariate_scale = false;

  tailfx::FitConfig to_config() const {
    tailfx::FitConfig config;
    config.level = q;
    config.theta_features = theta_features == "tau-sigma"
                                ? tailfx::ThetaFeatures::kTauAndSigma
                                : tailfx::ThetaFeatures::kTauOnly;
    config.outcome_intercept = outcome_intercept;
    config.covariate_scale = covariate_scale;
    return config;
  }
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags* flags) {
  cmd->add_option("--q", flags->q, "Threshold quantile level")
      ->check(interval_validator(0.0, 1.0, false))
      ->capture_default_str();
  cmd->add_option("--theta-features", flags->theta_features,
                  "Fitted tail parameters fed to the outcome model")
      ->check(CLI::IsMember({"tau", "tau-sigma"}))
      ->capture_default_str();
  cmd->add_flag("--outcome-intercept,!--no-outcome-intercept",
                flags->outcome_intercept,
                "Free intercept in the outcome model (default on)");
  cmd->add_flag("--covariate-scale", flags->covariate_scale,
                "Let the tail scale depend on the confounders (log link)");
}

json model_summary(const tailfx::CsvDataset& dataset,
                   const tailfx::ExtremeEffectModel& model) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["n"] = dataset.data.size();
  out["confounders"] = dataset.confounder_names;
  out["q"] = model.config.level;
  out["theta_features"] =
      model.config.theta_features == tailfx::ThetaFeatures::kTauAndSigma
          ? "tau-sigma"
          : "tau";
  out["outcome_intercept_enabled"] = model.config.outcome_intercept;
  out["covariate_scale"] = model.config.covariate_scale;
  out["threshold_coefficients"] =
      vector_to_json(model.threshold.coefficients, "threshold coefficients");
  out["scale_link_coefficients"] =
      vector_to_json(model.tail_dist.scale_link, "scale-link coefficients");
  out["shape"] = checked(model.tail_dist.shape, "shape");
  out["log_likelihood"] =
      checked(model.tail_dist.log_likelihood, "log-likelihood");
  out["n_exceedances"] = model.exceedance_indices.size();
  out["outcome"] = {
      {"level_coefficients",
       vector_to_json(model.outcome.level_coefficients, "level coefficients")},
      {"slope_coefficients",
       vector_to_json(model.outcome.slope_coefficients, "slope coefficients")}};
  out["omega_hat"] = checked(tailfx::tail_slope(model), "omega_hat");
  return out;
}

int run_fit(const std::string& input, const EstimatorFlags& flags,
            const std::string& output) {
  const tailfx::CsvDataset dataset = load_dataset(input);
  const tailfx::ExtremeEffectModel model =
      tailfx::fit_extreme_effect(dataset.data, flags.to_config());
  write_output(model_summary(dataset, model), output);
  return 0;
}

int run_effect(const std::string& input, const EstimatorFlags& flags,
               std::vector<double> t_values, const std::string& x_star_text,
               std::size_t B, double level, std::uint64_t seed,
               const std::string& output) {
  const tailfx::CsvDataset dataset = load_dataset(input);
  const tailfx::FitConfig config = flags.to_config();

  std::optional<Eigen::VectorXd> x_star;
  if (!x_star_text.empty()) {
    const std::vector<double> values = parse_comma_vector(x_star_text);
    if (static_cast<Eigen::Index>(values.size()) !=
        dataset.data.confounders.cols())
      throw UsageError("--x-star needs " +
                       std::to_string(dataset.data.confounders.cols()) +
                       " components to match the confounder columns");
    x_star = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
  }

  const tailfx::ExtremeEffectModel model =
      tailfx::fit_extreme_effect(dataset.data, config);

  // Statistic layout: omega, [omega at x*], then mu(t) per t, then
  // [mu_x*(t) per t].
  auto evaluate = [&](const tailfx::ExtremeEffectModel& m) {
    std::vector<double> stats;
    stats.push_back(tailfx::tail_slope(m));
    if (x_star) stats.push_back(tailfx::tail_slope_at(m, *x_star));
    for (double t : t_values) stats.push_back(tailfx::dose_response(m, t));
    if (x_star)
      for (double t : t_values)
        stats.push_back(tailfx::dose_response_at(m, *x_star, t));
    return stats;
  };
  const std::vector<double> point = evaluate(model);

  std::vector<tailfx::BootstrapResult> intervals;
  if (B > 0) {
    intervals = tailfx::bootstrap_ci_many(
        dataset.data,
        [&](const tailfx::ObservationSet& resample) {
          return evaluate(tailfx::fit_extreme_effect(resample, config));
        },
        point.size(), B, level, seed);
  }

  auto entry = [&](std::size_t index, const char* name) {
    json e{{"estimate", checked(point[index], name)}};
    if (!intervals.empty()) {
      e["lower"] = checked(intervals[index].lower, name);
      e["upper"] = checked(intervals[index].upper, name);
      e["n_failed_resamples"] = intervals[index].n_failed;
    }
    return e;
  };

  json out;
  out["schema_version"] = kSchemaVersion;
  out["q"] = config.level;
  out["bootstrap_B"] = B;
  out["level"] = level;
  out["seed"] = seed;
  std::size_t index = 0;
  out["omega_hat"] = entry(index++, "omega_hat");
  if (x_star) out["omega_hat_x_star"] = entry(index++, "omega_hat_x_star");
  json mu = json::array();
  for (double t : t_values) {
    json e = entry(index++, "mu_hat");
    e["t"] = t;
    mu.push_back(std::move(e));
  }
  out["mu_hat"] = std::move(mu);
  if (x_star) {
    json mu_star = json::array();
    for (double t : t_values) {
      json e = entry(index++, "mu_hat_x_star");
      e["t"] = t;
      mu_star.push_back(std::move(e));
    }
    out["mu_hat_x_star"] = std::move(mu_star);
  }

  json diffs = json::array();
  const std::size_t mu_base = 1 + (x_star ? 1 : 0);
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    for (std::size_t j = i + 1; j < t_values.size(); ++j) {
      json d{{"t1", t_values[i]},
             {"t2", t_values[j]},
             {"estimate",
              checked(point[mu_base + j] - point[mu_base + i], "difference")}};
      diffs.push_back(std::move(d));
    }
  }
  out["mu_hat_differences"] = std::move(diffs);

  write_output(out, output);
  return 0;
}

int run_simulate(const std::string& scenario_name, Eigen::Index n,
                 std::uint64_t seed, const std::string& output,
                 Eigen::Index d, const std::string& noise_name, double alpha,
                 double omega, double delta, double c,
                 const std::string& nu_text) {
  tailfx::ScenarioSpec spec;
  spec.n = n;
  json params;
  if (scenario_name == "simple_51") {
    spec.variant = tailfx::Scenario::kSimple51;
  } else if (scenario_name == "highdim_b1") {
    spec.variant = tailfx::Scenario::kHighdimB1;
    spec.d = d;
    if (noise_name == "gaussian")
      spec.noise = tailfx::NoiseLaw::kGaussianSd10;
    else if (noise_name == "exponential")
      spec.noise = tailfx::NoiseLaw::kExpMean10;
    else
      spec.noise = tailfx::NoiseLaw::kPareto11;
    params["d"] = d;
    params["noise"] = noise_name;
  } else if (scenario_name == "copula_b3") {
    spec.variant = tailfx::Scenario::kCopulaB3;
    spec.alpha = alpha;
    spec.omega = omega;
    params["alpha"] = alpha;
    params["omega"] = omega;
  } else if (scenario_name == "hidden_b4") {
    spec.variant = tailfx::Scenario::kHiddenB4;
    spec.delta = delta;
    spec.omega = omega;
    params["delta"] = delta;
    params["omega"] = omega;
  } else {
    spec.variant = tailfx::Scenario::kExtremalB5;
    spec.c = c;
    if (nu_text == "inf") {
      spec.nu = std::numeric_limits<double>::infinity();
    } else {
      const std::vector<double> v = parse_comma_vector(nu_text);
      if (v.size() != 1 || !(v[0] > 0.0))
        throw UsageError("--nu must be a positive number or 'inf'");
      spec.nu = v[0];
    }
    params["nu"] = nu_text;
    params["c"] = c;
  }

  const tailfx::GeneratedSample sample = spec.generate(seed);

  tailfx::CsvDataset dataset;
  dataset.data = sample.data;
  for (Eigen::Index j = 0; j < sample.data.confounders.cols(); ++j)
    dataset.confounder_names.push_back("x" + std::to_string(j + 1));
  std::ofstream out(output, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + output);
  tailfx::write_csv(dataset, out);

  json sidecar{{"schema_version", kSchemaVersion},
               {"scenario", scenario_name},
               {"params", params},
               {"n", n},
               {"seed", seed},
               {"true_omega", checked(sample.true_omega, "true_omega")}};
  std::ofstream meta(output + ".json", std::ios::binary);
  if (!meta) throw UsageError("cannot open sidecar file: " + output + ".json");
  meta << sidecar.dump(2) << '\n';
  return 0;
}

int run_bench(const std::string& table_name, double scale, std::uint64_t seed,
              const std::string& output_dir, bool skip_slow) {
  tailfx::bench::TableId id;
  if (table_name == "t1")
    id = tailfx::bench::TableId::kT1;
  else if (table_name == "t4")
    id = tailfx::bench::TableId::kT4;
  else if (table_name == "t5")
    id = tailfx::bench::TableId::kT5;
  else if (table_name == "t6")
    id = tailfx::bench::TableId::kT6;
  else
    id = tailfx::bench::TableId::kS51;

  std::filesystem::create_directories(output_dir);
  const tailfx::bench::BenchTable table =
      tailfx::bench::run_table(id, scale, seed, !skip_slow);

  const std::filesystem::path dir(output_dir);
  std::ofstream csv(dir / (table.name + ".csv"), std::ios::binary);
  if (!csv) throw UsageError("cannot write to output dir: " + output_dir);
  tailfx::bench::write_table_csv(table, csv);
  std::ofstream js(dir / (table.name + ".json"), std::ios::binary);
  tailfx::bench::write_table_json(table, js);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme-treatment-effect estimation toolkit"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the estimator on a CSV dataset");
  std::string fit_input, fit_output;
  EstimatorFlags fit_flags;
  fit->add_option("--input", fit_input, "Input CSV (columns y, t, confounders)")
      ->required()
      ->check(CLI::ExistingFile);
  add_estimator_flags(fit, &fit_flags);
  fit->add_option("--output", fit_output, "Write the model summary JSON here");

  // effect
  auto* effect = app.add_subcommand(
      "effect", "Extrapolate the dose-response with bootstrap intervals");
  std::string effect_input, effect_output, effect_x_star;
  EstimatorFlags effect_flags;
  std::vector<double> effect_t;
  std::size_t effect_B = 500;
  double effect_level = 0.95;
  std::uint64_t effect_seed = 1;
  effect->add_option("--input", effect_input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  add_estimator_flags(effect, &effect_flags);
  effect->add_option("--t", effect_t, "Treatment levels to evaluate")
      ->required()
      ->expected(1, -1);
  effect->add_option("--x-star", effect_x_star,
                     "Comma-separated covariate profile for subject-level "
                     "extrapolation");
  effect->add_option("--B", effect_B,
                     "Bootstrap resamples (0 disables intervals)")
      ->capture_default_str();
  effect->add_option("--level", effect_level, "Confidence level")
      ->check(interval_validator(0.0, 1.0, false))
      ->capture_default_str();
  effect->add_option("--seed", effect_seed, "Bootstrap seed")
      ->capture_default_str();
  effect->add_option("--output", effect_output, "Write the report JSON here");

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "Generate a simulation dataset as CSV");
  std::string sim_scenario, sim_output, sim_noise = "exponential",
                            sim_nu = "inf";
  Eigen::Index sim_n = 0, sim_d = 5;
  std::uint64_t sim_seed = 1;
  double sim_alpha = 1.0, sim_omega = 1.0, sim_delta = 0.0, sim_c = 1.0;
  simulate->add_option("--scenario", sim_scenario, "Scenario name")
      ->required()
      ->check(CLI::IsMember({"simple_51", "highdim_b1", "copula_b3",
                             "hidden_b4", "extremal_b5"}));
  simulate->add_option("--n", sim_n, "Sample size")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Generator seed")
      ->capture_default_str();
  simulate->add_option("--output", sim_output, "Output CSV path (a .json sidecar is written next to it)")
      ->required();
  simulate->add_option("--d", sim_d, "highdim_b1: confounder dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--noise", sim_noise, "highdim_b1: treatment noise law")
      ->check(CLI::IsMember({"gaussian", "exponential", "pareto"}))
      ->capture_default_str();
  simulate->add_option("--alpha", sim_alpha, "copula_b3: Gumbel dependence")
      ->check(CLI::Range(1.0, 1e9))
      ->capture_default_str();
  simulate->add_option("--omega", sim_omega,
                       "copula_b3/hidden_b4: tail slope parameter")
      ->capture_default_str();
  simulate->add_option("--delta", sim_delta,
                       "hidden_b4: hidden-confounder strength")
      ->capture_default_str();
  simulate->add_option("--c", sim_c, "extremal_b5: kink location")
      ->capture_default_str();
  simulate->add_option("--nu", sim_nu,
                       "extremal_b5: Student-t degrees of freedom or 'inf'")
      ->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark table");
  std::string bench_table, bench_dir;
  double bench_scale = 1.0;
  std::uint64_t bench_seed = 1;
  bool bench_skip_slow = false;
  bench->add_option("--table", bench_table, "Table id")
      ->required()
      ->check(CLI::IsMember({"t1", "t4", "t5", "t6", "s51"}));
  bench->add_option("--scale", bench_scale,
                    "Replication scale in (0,1]; reps = ceil(scale*100)")
      ->check(interval_validator(0.0, 1.0, true))
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  bench->add_option("--output-dir", bench_dir, "Directory for CSV/JSON output")
      ->required();
  bench->add_flag("--skip-slow", bench_skip_slow,
                  "Skip the d=200 rows of table t1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit->parsed()) return run_fit(fit_input, fit_flags, fit_output);
    if (effect->parsed()) {
      if (effect_B != 0 && effect_B < 100)
        throw UsageError("--B must be 0 or at least 100");
      return run_effect(effect_input, effect_flags, effect_t, effect_x_star,
                        effect_B, effect_level, effect_seed, effect_output);
    }
    if (simulate->parsed())
      return run_simulate(sim_scenario, sim_n, sim_seed, sim_output, sim_d,
                          sim_noise, sim_alpha, sim_omega, sim_delta, sim_c,
                          sim_nu);
    if (bench->parsed())
      return run_bench(bench_table, bench_scale, bench_seed, bench_dir,
                       bench_skip_slow);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tailfx::CsvError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tailfx::ExcessiveFailuresError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBenchAbort;
  } catch (const tailfx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  }
  return 0;
}

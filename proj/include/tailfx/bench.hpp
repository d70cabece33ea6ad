#pragma once

#include "tailfx/bootstrap.hpp"
#include "tailfx/common.hpp"
#include "tailfx/estimator.hpp"
#include "tailfx/simgen.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tailfx::bench {

// Aggregate of one (scenario, q) benchmark cell over `reps` replications.
// spread95 is the 95%-quantile of |estimate - mean|, so roughly 95% of the
// replication estimates fall inside mean +/- spread95.
struct BenchCell {
  ScenarioSpec scenario;
  int reps = 0;
  double q = 0.95;
  std::vector<double> estimates;
  double mean = 0.0;
  double spread95 = 0.0;
  std::optional<double> ci_center_mean;     // mean of per-rep interval midpoints
  std::optional<double> ci_halfwidth_mean;  // mean of per-rep half-widths
  std::optional<double> naive_mean;         // full-data OLS reference
  std::optional<double> naive_spread95;
  int failures = 0;
};

namespace detail {

inline constexpr std::uint64_t kBootstrapStream = 0x626F6F74;  // distinct from rep ids
inline constexpr std::uint64_t kPrintedReps = 100;

inline double spread95(const std::vector<double>& estimates, double mean) {
  std::vector<double> dev;
  dev.reserve(estimates.size());
  for (double e : estimates) dev.push_back(std::abs(e - mean));
  return empirical_quantile(std::move(dev), 0.95);
}

}  // namespace detail

struct RunCellOptions {
  std::optional<int> bootstrap_B;  // per-rep percentile bootstrap when set
  double bootstrap_level = 0.95;
  bool with_naive_baseline = false;
};

// Runs one benchmark cell: replication r generates data from
// derive_seed(master_seed, r), fits the extreme-effect model at threshold
// level q and records the tail slope. Replications that throw a
// tailfx::Error are counted as failures; the run aborts once failures exceed
// 20% of reps.
inline BenchCell run_cell(const ScenarioSpec& scenario, int reps, double q,
                          std::uint64_t master_seed,
                          const RunCellOptions& options = {}) {
  if (reps < 2) throw DomainError("run_cell: need reps >= 2");
  BenchCell cell;
  cell.scenario = scenario;
  cell.reps = reps;
  cell.q = q;

  FitConfig config;
  config.level = q;

  std::vector<double> ci_centers, ci_halfwidths, naive;
  std::string failure_log;
  const int max_failures = reps / 5;
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = derive_seed(master_seed, static_cast<std::uint64_t>(r));
    try {
      const GeneratedSample sample = scenario.generate(rep_seed);
      const ExtremeEffectModel model = fit_extreme_effect(sample.data, config);
      cell.estimates.push_back(tail_slope(model));
      if (options.bootstrap_B) {
        const BootstrapResult ci = bootstrap_ci(
            sample.data,
            [&config](const ObservationSet& resample) {
              return tail_slope(fit_extreme_effect(resample, config));
            },
            static_cast<std::size_t>(*options.bootstrap_B),
            options.bootstrap_level,
            derive_seed(rep_seed, detail::kBootstrapStream));
        ci_centers.push_back(0.5 * (ci.lower + ci.upper));
        ci_halfwidths.push_back(0.5 * (ci.upper - ci.lower));
      }
      if (options.with_naive_baseline)
        naive.push_back(naive_ols_slope(sample.data));
    } catch (const Error& e) {
      ++cell.failures;
      failure_log += "rep " + std::to_string(r) + ": " + e.what() + "\n";
      if (cell.failures > max_failures)
        throw ExcessiveFailuresError(
            "run_cell: " + std::to_string(cell.failures) + " of " +
            std::to_string(r + 1) + " replications failed (tolerance " +
            std::to_string(max_failures) + " of " + std::to_string(reps) +
            ")\n" + failure_log);
    }
  }

  double sum = 0.0;
  for (double e : cell.estimates) sum += e;
  cell.mean = sum / static_cast<double>(cell.estimates.size());
  cell.spread95 = detail::spread95(cell.estimates, cell.mean);
  if (!ci_centers.empty()) {
    double c = 0.0, h = 0.0;
    for (double v : ci_centers) c += v;
    for (double v : ci_halfwidths) h += v;
    cell.ci_center_mean = c / static_cast<double>(ci_centers.size());
    cell.ci_halfwidth_mean = h / static_cast<double>(ci_halfwidths.size());
  }
  if (!naive.empty()) {
    double m = 0.0;
    for (double v : naive) m += v;
    cell.naive_mean = m / static_cast<double>(naive.size());
    cell.naive_spread95 = detail::spread95(naive, *cell.naive_mean);
  }
  return cell;
}

enum class TableId { kT1, kT4, kT5, kT6, kS51 };

inline const char* table_name(TableId id) {
  switch (id) {
    case TableId::kT1: return "t1";
    case TableId::kT4: return "t4";
    case TableId::kT5: return "t5";
    case TableId::kT6: return "t6";
    case TableId::kS51: return "s51";
  }
  return "?";
}

struct BenchTable {
  std::string name;
  std::vector<BenchCell> cells;
};

// Reproduces a full benchmark grid. `scale` in (0,1] rescales the printed
// 100-replication count to ceil(scale * 100). Cell c draws its seeds from
// derive_seed(master_seed, c). The d=200 rows of the t1 grid are much slower
// than the rest; `include_slow` drops them when false.
inline BenchTable run_table(TableId id, double scale, std::uint64_t master_seed,
                            bool include_slow = true) {
  if (!(scale > 0.0 && scale <= 1.0))
    throw DomainError("run_table: scale must be in (0,1]");
  // guard against ties like 0.07*100 = 7.000000000000001
  const int reps = static_cast<int>(
      std::ceil(scale * static_cast<double>(detail::kPrintedReps) - 1e-9));

  BenchTable table;
  table.name = table_name(id);

  struct CellPlan {
    ScenarioSpec scenario;
    double q;
    RunCellOptions options;
  };
  std::vector<CellPlan> plan;

  switch (id) {
    case TableId::kT1: {
      for (Eigen::Index d : {5, 25, 50, 200}) {
        if (d == 200 && !include_slow) continue;
        for (NoiseLaw noise : {NoiseLaw::kGaussianSd10, NoiseLaw::kExpMean10,
                               NoiseLaw::kPareto11}) {
          ScenarioSpec s;
          s.variant = Scenario::kHighdimB1;
          s.n = 5000;
          s.d = d;
          s.noise = noise;
          plan.push_back({s, 0.95, {}});
        }
      }
      break;
    }
    case TableId::kT4: {
      for (double alpha : {1.0, 1.5, 2.0}) {
        for (Eigen::Index n : {1000, 5000, 10000}) {
          for (double omega : {0.0, 1.0, 10.0}) {
            ScenarioSpec s;
            s.variant = Scenario::kCopulaB3;
            s.n = n;
            s.alpha = alpha;
            s.omega = omega;
            RunCellOptions o;
            o.bootstrap_B = 500;
            plan.push_back({s, n == 1000 ? 0.9 : 0.95, o});
          }
        }
      }
      break;
    }
    case TableId::kT5: {
      for (double delta : {0.0, 1.0, 5.0, 10.0, 50.0}) {
        for (Eigen::Index n : {1000, 5000, 10000}) {
          for (double omega : {0.0, 5.0, 10.0}) {
            ScenarioSpec s;
            s.variant = Scenario::kHiddenB4;
            s.n = n;
            s.delta = delta;
            s.omega = omega;
            plan.push_back({s, 0.9, {}});
          }
        }
      }
      break;
    }
    case TableId::kT6: {
      const double inf = std::numeric_limits<double>::infinity();
      for (double nu : {inf, 5.0, 2.0}) {
        for (double c : {1.0, 2.0, 5.0, 10.0}) {
          ScenarioSpec s;
          s.variant = Scenario::kExtremalB5;
          s.n = 5000;
          s.nu = nu;
          s.c = c;
          RunCellOptions o;
          o.with_naive_baseline = true;
          plan.push_back({s, 0.95, o});
        }
      }
      break;
    }
    case TableId::kS51: {
      ScenarioSpec s;
      s.variant = Scenario::kSimple51;
      s.n = 500;
      RunCellOptions o;
      o.bootstrap_B = 500;
      plan.push_back({s, 0.9, o});
      break;
    }
  }

  for (std::size_t c = 0; c < plan.size(); ++c) {
    table.cells.push_back(run_cell(plan[c].scenario, reps, plan[c].q,
                                   derive_seed(master_seed, c),
                                   plan[c].options));
  }
  return table;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace detail

inline nlohmann::json table_to_json(const BenchTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (const BenchCell& cell : table.cells) {
    nlohmann::json j{{"scenario", cell.scenario.name()},
                     {"params", cell.scenario.params_label()},
                     {"n", cell.scenario.n},
                     {"q", cell.q},
                     {"reps", cell.reps},
                     {"failures", cell.failures},
                     {"mean", cell.mean},
                     {"spread95", cell.spread95}};
    if (cell.ci_center_mean) j["ci_center"] = *cell.ci_center_mean;
    if (cell.ci_halfwidth_mean) j["ci_halfwidth"] = *cell.ci_halfwidth_mean;
    if (cell.naive_mean) j["naive_mean"] = *cell.naive_mean;
    if (cell.naive_spread95) j["naive_spread95"] = *cell.naive_spread95;
    cells.push_back(std::move(j));
  }
  return nlohmann::json{
      {"schema_version", 1}, {"table", table.name}, {"cells", std::move(cells)}};
}

inline void write_table_json(const BenchTable& table, std::ostream& os) {
  os << table_to_json(table).dump(2) << '\n';
}

inline void write_table_csv(const BenchTable& table, std::ostream& os) {
  os << "table,scenario,params,n,q,reps,failures,mean,spread95,"
        "ci_center,ci_halfwidth,naive_mean,naive_spread95\n";
  for (const BenchCell& cell : table.cells) {
    os << table.name << ',' << cell.scenario.name() << ','
       << cell.scenario.params_label() << ',' << cell.scenario.n << ','
       << detail::format_double(cell.q) << ',' << cell.reps << ','
       << cell.failures << ',' << detail::format_double(cell.mean) << ','
       << detail::format_double(cell.spread95) << ','
       << detail::format_optional(cell.ci_center_mean) << ','
       << detail::format_optional(cell.ci_halfwidth_mean) << ','
       << detail::format_optional(cell.naive_mean) << ','
       << detail::format_optional(cell.naive_spread95) << '\n';
  }
}

}  // namespace tailfx::bench

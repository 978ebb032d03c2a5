#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pemi/bench/data.hpp"
#include "pemi/extended_real.hpp"
#include "pemi/kernels.hpp"

namespace pemi::bench {

enum class Method { pemi_det, pemi_rand, vanilla, oracle };

std::string to_string(Method m);
Method method_from_string(const std::string& s);  // ConfigError on unknown names

/// Selection rule and its parameters. Which fields matter depends on kind:
///   always, decision_driven (tau0, tau1), weighted_quantile (q_sel, rho),
///   weighted_average (rho), uncertainty_budget (budget, ensemble),
///   conformal_pvalue (engine, level, rho), elond (level, randomize),
///   earlier_outcome (beta, rho).
/// rho = 1 means equal weights. offset shifts the prediction the rule sees.
struct RuleSpec {
  std::string kind = "decision_driven";
  double tau0 = 200.0;
  double tau1 = 5.5;
  double offset = 0.0;
  double q_sel = 0.1;
  double rho = 0.5;
  double budget = 0.3;
  std::size_t ensemble = 5;
  std::string engine = "fixed";  // fixed, lond, saffron, addis
  double level = 0.3;
  bool randomize = false;
  double beta = 0.1;
  /// Cutoff c_i for synthetic data (datasets may carry their own column c).
  double cutoff = 0.0;
  /// Leading stream points used as the offline block (required by elond).
  std::size_t n_offline = 0;
  std::string taxonomy = "all";  // all, singleton
};

struct DataSpec {
  std::string source = "nonlinear";  // nonlinear, setting3, csv
  double sigma = 1.0;
  std::string model = "ols";  // ols, true (for synthetic sources)
  std::size_t n_train = 200;
  std::string path;
  bool shuffle = true;
};

struct ExperimentConfig {
  std::size_t T = 60;
  std::size_t N = 100;
  double alpha = 0.4;
  std::size_t M = 200;
  RuleSpec rule;
  std::string score = "residual";  // residual, cqr (needs q_lo, q_hi columns)
  DataSpec data;
  std::vector<Method> methods{Method::pemi_det, Method::pemi_rand, Method::vanilla};
  std::uint64_t seed = 0;
  std::string out = "results";
  std::size_t oracle_limit = 8;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Reads a config object; unknown keys and wrong types raise ConfigError with
/// their dotted path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// One method's prediction set at a selected time point of one replication.
struct Event {
  std::size_t replication = 0;
  std::size_t t = 0;
  Method method = Method::pemi_det;
  bool covered = false;
  ExtendedReal size;
};

struct MetricsRow {
  Method method = Method::pemi_det;
  std::size_t t = 0;
  std::size_t selection_count = 0;
  std::size_t covered_count = 0;
  double coverage_estimate = 0.0;  // NaN without selections
  ExtendedReal median_size;        // NaN without selections
  double infinite_fraction = 0.0;
};

struct FcrReport {
  Method method = Method::pemi_det;
  std::size_t T = 0;
  std::size_t N = 0;
  double fcr_estimate = 0.0;
};

struct ExperimentResult {
  std::vector<Event> events;  // replication order, then t, then method
  std::vector<MetricsRow> metrics;
  std::vector<FcrReport> fcr;
};

/// Median that sorts +inf last: +inf exactly when more than half the values
/// are infinite; an even count averages the two middle values when both are
/// finite and takes the lower one otherwise.
ExtendedReal median_size(std::vector<ExtendedReal> sizes);

/// Rebuilds the metric tables from the event log alone.
void aggregate(const std::vector<Event>& events, const std::vector<Method>& methods, std::size_t T, std::size_t N,
               std::vector<MetricsRow>& metrics, std::vector<FcrReport>& fcr);

/// Replications run in parallel with seeds derived from config.seed; the
/// result does not depend on the execution mode.
ExperimentResult run_experiment(const ExperimentConfig& config, Execution exec = Execution::parallel);

/// events.csv, metrics.csv, fcr.csv, config.json and summary.json in dir.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& config, const std::string& dir);

std::string events_csv(const std::vector<Event>& events);
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string fcr_csv(const std::vector<FcrReport>& rows);
nlohmann::json summary_json(const ExperimentResult& result, const ExperimentConfig& config);

/// Parses events.csv; DataError with the line number on malformed rows.
std::vector<Event> parse_events(const std::string& text, const std::string& origin = "<string>");

}  // namespace pemi::bench

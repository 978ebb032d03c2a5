// Command-line front end: run experiments, check the closed forms against the
// oracles, and re-derive reports from event logs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pemi/bench/experiment.hpp"
#include "pemi/bench/oracle_check.hpp"
#include "pemi/errors.hpp"

namespace {

using namespace pemi;
using namespace pemi::bench;

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::size_t> M, T, N;
  std::optional<std::string> rule, score, out;
  std::vector<std::string> methods;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print_metrics(const std::vector<MetricsRow>& rows, const std::vector<FcrReport>& fcr) {
  std::printf("%-10s %4s %9s %9s %12s %9s\n", "method", "t", "selected", "coverage", "median_size", "inf_frac");
  for (const auto& r : rows) {
    if (r.selection_count == 0) continue;
    std::printf("%-10s %4zu %9zu %9.4f %12s %9.4f\n", to_string(r.method).c_str(), r.t, r.selection_count,
                r.coverage_estimate, format_double(r.median_size.value()).c_str(), r.infinite_fraction);
  }
  for (const auto& f : fcr) std::printf("FCR %-10s %.4f (T=%zu, N=%zu)\n", to_string(f.method).c_str(), f.fcr_estimate, f.T, f.N);
}

int run(const RunFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.M) c.M = *f.M;
  if (f.T) c.T = *f.T;
  if (f.N) c.N = *f.N;
  if (f.rule) c.rule.kind = *f.rule;
  if (f.score) c.score = *f.score;
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : f.methods) c.methods.push_back(method_from_string(m));
  }
  // Precedence: --out, then PEMI_OUTPUT_DIR, then the config file.
  if (const char* env = std::getenv("PEMI_OUTPUT_DIR"); env && *env) c.out = env;
  if (f.out) c.out = *f.out;
  c.validate();

  const auto result = run_experiment(c);
  write_outputs(result, c, c.out);
  print_metrics(result.metrics, result.fcr);
  std::printf("wrote %s\n", c.out.c_str());
  return 0;
}

int report(const std::string& dir) {
  const std::filesystem::path root(dir);
  const auto config = parse_config(nlohmann::json::parse(read_file((root / "config.json").string())));
  const auto events = parse_events(read_file((root / "events.csv").string()), (root / "events.csv").string());
  std::vector<MetricsRow> metrics;
  std::vector<FcrReport> fcr;
  aggregate(events, config.methods, config.T, config.N, metrics, fcr);
  print_metrics(metrics, fcr);
  // The stored tables must be reproducible from the event log alone.
  const bool ok = metrics_csv(metrics) == read_file((root / "metrics.csv").string()) &&
                  fcr_csv(fcr) == read_file((root / "fcr.csv").string());
  std::printf("audit: %s\n", ok ? "metrics match the event log" : "MISMATCH between metrics and event log");
  return ok ? 0 : kDataExit;
}

int oracle(const OracleCheckOptions& o) {
  std::size_t bad = 0;
  std::printf("%-34s %9s %8s %10s %8s %10s\n", "instantiation", "instances", "labels", "mismatch", "full", "mismatch");
  for (const auto& name : o.only.empty() ? oracle_check_instantiations() : o.only) {
    OracleCheckOptions one = o;
    one.only = {name};
    const auto l = oracle_check(one).front();
    std::printf("%-34s %9zu %8zu %10zu %8zu %10zu\n", l.instantiation.c_str(), l.instances, l.points, l.mismatches,
                l.full_points, l.full_mismatches);
    std::fflush(stdout);
    bad += l.mismatches + l.full_mismatches;
  }
  std::printf("%s\n", bad == 0 ? "all closed forms agree" : "closed forms DISAGREE with the oracles");
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selection-conditional conformal prediction sets by permutation"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation or dataset experiment");
  run_cmd->add_option("--config", rf.config, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", rf.seed, "Root seed");
  run_cmd->add_option("--alpha", rf.alpha, "Miscoverage level");
  run_cmd->add_option("--M", rf.M, "Number of sampled permutations");
  run_cmd->add_option("--T", rf.T, "Horizon");
  run_cmd->add_option("--N", rf.N, "Replications");
  run_cmd->add_option("--rule", rf.rule, "Selection rule kind");
  run_cmd->add_option("--score", rf.score, "Conformity score (residual, cqr)");
  run_cmd->add_option("--method", rf.methods, "Methods: pemi_det, pemi_rand, vanilla, oracle")->delimiter(',');
  run_cmd->add_option("--out", rf.out, "Output directory (overrides PEMI_OUTPUT_DIR)");

  OracleCheckOptions oo;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare closed-form sets with brute-force oracles");
  oracle_cmd->add_option("--instances", oo.instances, "Random instances per instantiation");
  oracle_cmd->add_option("--seed", oo.seed, "Seed");
  oracle_cmd->add_option("--grid", oo.grid, "Grid points per instance");
  oracle_cmd->add_option("--only", oo.only, "Restrict to these instantiations")->delimiter(',');

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Recompute metrics from an output directory's event log");
  report_cmd->add_option("dir", report_dir, "Output directory of a run")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(rf);
    if (*oracle_cmd) return oracle(oo);
    return report(report_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

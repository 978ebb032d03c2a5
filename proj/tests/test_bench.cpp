#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pemi/bench/experiment.hpp"
#include "pemi/errors.hpp"

using namespace pemi;
using namespace pemi::bench;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.T = 8;
  c.N = 6;
  c.M = 30;
  c.rule.kind = "decision_driven";
  c.rule.tau1 = -0.5;
  c.rule.tau0 = 2.0;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("generators") {
  CHECK(mu_nonlinear(0.0) == doctest::Approx(0.0));
  CHECK(mu_nonlinear(0.5) == doctest::Approx(0.16));
  CHECK(mu_nonlinear(-0.9) == doctest::Approx(3.0 * std::sin(-3.6 * M_PI) - 4.0 * 0.25));
  const std::vector<double> zeros(20, 0.0);
  CHECK(mu_setting3(zeros) == doctest::Approx(5.0 * std::exp(-1.0)));

  const auto a = gen_nonlinear({Setting::nonlinear_1d, 1.0, 3}, 50);
  const auto b = generate({Setting::nonlinear_1d, 1.0, 3}, 50);
  const auto c = generate({Setting::nonlinear_1d, 1.0, 4}, 50);
  REQUIRE(a.size() == 50);
  CHECK(a[0].x.size() == 1);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].x == b[i].x && a[i].y == b[i].y;
    differ = differ || a[i].y != c[i].y;
  }
  CHECK(same);
  CHECK(differ);

  for (const auto& p : generate({Setting::setting3_20d, 0.0, 9}, 30)) {
    CHECK(p.x.size() == 20);
    CHECK(p.y == doctest::Approx(mu_setting3(p.x)));
  }
  for (const auto& p : generate({Setting::nonlinear_1d, 0.0, 9}, 30)) CHECK(p.y == mu_nonlinear(p.x[0]));
}

TEST_CASE("least squares recovers a noiseless linear model") {
  std::vector<LabeledPoint> train;
  for (int i = 0; i < 30; ++i) {
    const double x0 = std::sin(i), x1 = std::cos(3.0 * i);
    train.push_back({{x0, x1}, 1.0 + 2.0 * x0 - 0.5 * x1, {}});
  }
  const auto fit = fit_ols(train);
  CHECK(fit.intercept() == doctest::Approx(1.0));
  CHECK(fit.coefficients()[0] == doctest::Approx(2.0));
  CHECK(fit.coefficients()[1] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(fit_ols({}), DataError);
}

TEST_CASE("vanilla conformal set") {
  // Residuals 1, 2, 3, 4 and alpha = 0.4: the third smallest of four, radius 3.
  std::vector<LabeledPoint> pts;
  for (int r = 1; r <= 4; ++r) pts.push_back({{0.0}, static_cast<double>(r), {}});
  const DataSequence seq(pts, {10.0});
  const ResidualScore score(column(0));
  const auto set = vanilla_cp_set(seq, score, 0.4);
  CHECK(set_size(set, score, seq.test_x()).value() == doctest::Approx(6.0));
  CHECK(contains(set, score, seq.test_x(), 13.0));
  CHECK_FALSE(contains(set, score, seq.test_x(), 13.5));
  // Too few points for the level: the whole line.
  const DataSequence tiny({pts[0]}, {0.0});
  CHECK(set_size(vanilla_cp_set(tiny, score, 0.4), score, tiny.test_x()).is_pos_infinity());
}

TEST_CASE("datasets: round trip and errors") {
  Dataset d;
  d.feature_columns = {"x_0", "x_1"};
  d.has_cutoff = true;
  d.rows = {{{0.1, -2.5}, 3.0, 0.5}, {{1e-300, 7.0}, -0.125, 0.0}};
  const auto text = format_dataset(d);
  const auto back = parse_dataset(text);
  CHECK(back.feature_columns == d.feature_columns);
  CHECK(back.has_cutoff);
  REQUIRE(back.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.rows[i].x == d.rows[i].x);
    CHECK(back.rows[i].y == d.rows[i].y);
    CHECK(back.rows[i].cutoff == d.rows[i].cutoff);
  }
  CHECK(back.column("x_1") == 1);
  CHECK(back.column("nope") == Dataset::npos);

  const auto preds = parse_dataset("mu_hat,q_lo,q_hi,y\n1,0,2,1.5\n");
  CHECK(preds.has_predictions());
  CHECK_FALSE(preds.has_cutoff);

  CHECK_THROWS_AS(parse_dataset("x_0,c\n1,2\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("x_0,y,z\n1,2,3\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("x_0,mu_hat,y\n1,2,3\n"), DataError);
  CHECK_THROWS_AS(parse_dataset(""), DataError);
  try {
    parse_dataset("x_0,y\n1,2\n3,oops\n", "data.csv");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("data.csv:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset("x_0,y\n1,2,3\n"), DataError);
  CHECK_THROWS_AS(parse_dataset("x_0,y\n1,inf\n"), DataError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.125}) CHECK(parse_double(format_double(v)) == v);
  CHECK(std::isinf(parse_double("inf")));
}

TEST_CASE("configuration parsing") {
  const auto c = parse_config(nlohmann::json::parse(R"({"T": 10, "N": 3, "alpha": 0.2,
      "rule": {"kind": "weighted_quantile", "q_sel": 0.2}, "methods": ["pemi_det", "vanilla"]})"));
  CHECK(c.T == 10);
  CHECK(c.alpha == 0.2);
  CHECK(c.rule.kind == "weighted_quantile");
  CHECK(c.methods == std::vector<Method>{Method::pemi_det, Method::vanilla});
  const auto again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));

  const auto fails = [](const char* text, const char* needle) {
    try {
      parse_config(nlohmann::json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails(R"({"rule": {"kind": "no_such_rule"}})", "rule.kind"));
  CHECK(fails(R"({"rule": {"colour": 1}})", "rule.colour"));
  CHECK(fails(R"({"T": "ten"})", "T"));
  CHECK(fails(R"({"alpha": 1.5})", "alpha"));
  CHECK(fails(R"({"methods": ["magic"]})", "methods"));
  CHECK(fails(R"({"rule": {"kind": "elond"}})", "n_offline"));
  CHECK(fails(R"({"score": "cqr"})", "score"));
  CHECK(fails(R"({"rule": {"kind": "conformal_pvalue", "taxonomy": "singleton"}})", "taxonomy"));
  CHECK(fails(R"({"T": 10, "methods": ["oracle"]})", "oracle"));
  CHECK(method_from_string("pemi_rand") == Method::pemi_rand);
  CHECK_THROWS_AS(method_from_string("x"), ConfigError);
}

TEST_CASE("median of set sizes") {
  using E = ExtendedReal;
  CHECK(median_size({E(3.0), E(1.0), E(2.0)}).value() == 2.0);
  CHECK(median_size({E(1.0), E(2.0), E(3.0), E(4.0)}).value() == 2.5);
  CHECK(median_size({E(1.0), E(2.0), E::infinity(), E::infinity()}).value() == 2.0);
  CHECK(median_size({E(1.0), E::infinity(), E::infinity()}).is_pos_infinity());
  CHECK(std::isnan(median_size({}).value()));
}

TEST_CASE("aggregation by hand") {
  const std::vector<Event> events{{0, 1, Method::pemi_det, true, ExtendedReal(2.0)},
                                  {0, 2, Method::pemi_det, false, ExtendedReal(1.0)},
                                  {1, 1, Method::pemi_det, true, ExtendedReal::infinity()}};
  std::vector<MetricsRow> rows;
  std::vector<FcrReport> fcr;
  aggregate(events, {Method::pemi_det}, 3, 4, rows, fcr);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].selection_count == 2);
  CHECK(rows[0].coverage_estimate == 1.0);
  CHECK(rows[0].infinite_fraction == 0.5);
  CHECK(rows[1].coverage_estimate == 0.0);
  CHECK(std::isnan(rows[2].coverage_estimate));
  REQUIRE(fcr.size() == 1);
  CHECK(fcr[0].fcr_estimate == doctest::Approx(0.5 / 4.0));

  const auto parsed = parse_events(events_csv(events));
  REQUIRE(parsed.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(parsed[i].replication == events[i].replication);
    CHECK(parsed[i].t == events[i].t);
    CHECK(parsed[i].covered == events[i].covered);
    CHECK(parsed[i].size.value() == events[i].size.value());
  }
  CHECK_THROWS(parse_events("rep,t\n0,1\n"));
}

TEST_CASE("experiments: degenerate rules") {
  auto c = small_config();
  c.rule.tau1 = 1e9;  // never selects
  const auto never = run_experiment(c);
  CHECK(never.events.empty());
  for (const auto& f : never.fcr) CHECK(f.fcr_estimate == 0.0);

  c = small_config();
  c.rule.kind = "always";
  c.T = 1;
  c.N = 1;
  const auto one = run_experiment(c);
  for (const auto& row : one.metrics) {
    CHECK(row.selection_count == 1);
    // The randomized p-value at t = 1 is the tie-breaking uniform itself.
    if (row.method != Method::pemi_rand) CHECK(row.coverage_estimate == 1.0);
  }
}

TEST_CASE("experiments: deterministic and independent of execution mode") {
  const auto c = small_config();
  const auto a = run_experiment(c, Execution::serial);
  const auto b = run_experiment(c, Execution::parallel);
  CHECK_FALSE(a.events.empty());
  CHECK(events_csv(a.events) == events_csv(b.events));
  CHECK(metrics_csv(a.metrics) == metrics_csv(b.metrics));
  CHECK(fcr_csv(a.fcr) == fcr_csv(b.fcr));

  std::vector<MetricsRow> rows;
  std::vector<FcrReport> fcr;
  aggregate(parse_events(events_csv(a.events)), c.methods, c.T, c.N, rows, fcr);
  CHECK(metrics_csv(rows) == metrics_csv(a.metrics));
  CHECK(fcr_csv(fcr) == fcr_csv(a.fcr));

  const auto dir = std::filesystem::temp_directory_path() / "pemi_bench_test";
  std::filesystem::remove_all(dir);
  write_outputs(a, c, dir.string());
  for (const char* f : {"events.csv", "metrics.csv", "fcr.csv", "config.json", "summary.json"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(slurp(dir / "events.csv") == events_csv(a.events));
  CHECK(to_json(load_config((dir / "config.json").string())) == to_json(c));
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiments from a dataset") {
  const auto dir = std::filesystem::temp_directory_path() / "pemi_bench_csv";
  std::filesystem::create_directories(dir);
  Dataset d;
  d.feature_columns = {"x_0"};
  d.rows = generate({Setting::nonlinear_1d, 1.0, 2}, 400);
  write_dataset((dir / "d.csv").string(), d);
  auto c = small_config();
  c.data.source = "csv";
  c.data.path = (dir / "d.csv").string();
  c.data.n_train = 100;
  const auto r = run_experiment(c);
  CHECK(r.metrics.size() == c.T * c.methods.size());
  c.data.path = (dir / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(c), DataError);
  std::filesystem::remove_all(dir);
}

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "pemi/bench/data.hpp"
#include "pemi/bench/experiment.hpp"
#include "pemi/bench/oracle_check.hpp"
#include "pemi/engine.hpp"
#include "pemi/fast.hpp"
#include "pemi/oracle.hpp"
#include "pemi/quantile.hpp"
#include "pemi/random.hpp"
#include "pemi/rules.hpp"

using namespace pemi;
using namespace pemi::bench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double se(double p, std::size_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

// Decision-driven setting shared by criteria 2, 3 and 5.
ExperimentConfig decision_driven(std::size_t T, std::size_t N, std::uint64_t seed) {
  ExperimentConfig c;
  c.T = T;
  c.N = N;
  c.alpha = 0.4;
  c.M = 200;
  c.seed = seed;
  c.rule.kind = "decision_driven";
  c.rule.tau0 = 200;
  c.rule.tau1 = 5.5;
  c.rule.offset = 5.5;  // lifts the synthetic predictions onto the affinity scale
  c.data.source = "nonlinear";
  c.data.sigma = 1.0;
  c.methods = {Method::pemi_det, Method::pemi_rand};
  return c;
}

const ExperimentResult& decision_driven_run() {
  static const ExperimentResult r = run_experiment(decision_driven(60, 5000, 2));
  return r;
}

Outcome oracle_equivalence() {
  OracleCheckOptions o;
  o.instances = 50;
  o.seed = 2024;
  const auto start = std::chrono::steady_clock::now();
  const auto lines = oracle_check(o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t points = 0, bad = 0, full = 0, full_bad = 0;
  for (const auto& l : lines) {
    points += l.points;
    bad += l.mismatches;
    full += l.full_points;
    full_bad += l.full_mismatches;
  }
  return {bad == 0 && full_bad == 0 && secs < 120,
          fmt("%zu instantiations, %zu/%zu generic and %zu/%zu full-enumeration mismatches, %.1f s", lines.size(), bad,
              points, full_bad, full, secs)};
}

Outcome scc_deterministic() {
  const auto& r = decision_driven_run();
  std::size_t checked = 0, failed = 0;
  double worst = INFINITY;
  for (const auto& row : r.metrics) {
    if (row.method != Method::pemi_det || row.selection_count < 300) continue;
    ++checked;
    const double bound = 0.6 - 2 * std::sqrt(0.24 / static_cast<double>(row.selection_count));
    worst = std::min(worst, row.coverage_estimate - bound);
    failed += row.coverage_estimate < bound;
  }
  return {checked > 0 && failed == 0,
          fmt("%zu of 60 steps with >= 300 selections, %zu below the bound, smallest margin %.4f", checked, failed,
              worst)};
}

Outcome scc_randomized() {
  const auto& r = decision_driven_run();
  std::size_t sel = 0, cov = 0;
  for (const auto& row : r.metrics) {
    if (row.method != Method::pemi_rand) continue;
    sel += row.selection_count;
    cov += row.covered_count;
  }
  const double c = static_cast<double>(cov) / static_cast<double>(sel);
  return {sel >= 10000 && std::abs(c - 0.6) <= 0.02, fmt("pooled coverage %.4f over %zu selections", c, sel)};
}

class TrueMean final : public Predictor {
 public:
  double operator()(std::span<const double> x) const override { return mu_nonlinear(x[0]); }
};

Outcome no_selection_validity() {
  // 5000 replications put the +-0.015 band at about two standard errors;
  // 20000 keep the check at the stated tolerance without a coin-flip margin.
  constexpr std::size_t kReps = 20000, kT = 20, kM = 50;
  const ResidualScore score(std::make_shared<TrueMean>());
  const ConstantRule always(true);
  std::vector<double> det(kReps), rnd(kReps);
  for_each_index(kReps, Execution::parallel, [&](std::size_t r) {
    const auto pts = gen_nonlinear({Setting::nonlinear_1d, 1.0, derive_seed(4, {static_cast<std::uint64_t>(r), 1})}, kT);
    const DataSequence seq(std::vector<LabeledPoint>(pts.begin(), pts.end() - 1), pts.back().x);
    const auto perms = sample_permutations(seq, kM, derive_seed(4, {static_cast<std::uint64_t>(r), 2}));
    SplitMix64 tie(derive_seed(4, {static_cast<std::uint64_t>(r), 3}));
    det[r] = pemi_pvalue(pts.back().y, seq, always, score, perms, Execution::serial).value;
    rnd[r] = pemi_pvalue_randomized(pts.back().y, seq, always, score, perms, uniform01(tie), Execution::serial).value;
  });
  bool ok = true;
  double worst_det = -INFINITY, worst_rand = 0;
  for (int k = 1; k <= 9; ++k) {
    const double a = k / 10.0;
    const auto frac = [&](const std::vector<double>& p) {
      return static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= a; })) /
             static_cast<double>(kReps);
    };
    const double fd = frac(det), fr = frac(rnd);
    worst_det = std::max(worst_det, fd - (a + 2 * se(a, kReps)));
    worst_rand = std::max(worst_rand, std::abs(fr - a));
    ok = ok && fd <= a + 2 * se(a, kReps) && std::abs(fr - a) <= 0.015;
  }
  return {ok, fmt("%zu replications; deterministic P(p<=a) - (a + 2SE) at most %.4f; randomized CDF off the "
                  "diagonal by at most %.4f",
                  kReps, worst_det, worst_rand)};
}

Outcome fcr_control() {
  auto c = decision_driven(40, 2000, 5);
  c.rule.taxonomy = "singleton";
  c.methods = {Method::pemi_det};
  const auto r = run_experiment(c);
  const double fcr = r.fcr.front().fcr_estimate;
  return {fcr <= 0.42, fmt("FCR %.4f with the trajectory-singleton taxonomy", fcr)};
}

ExperimentConfig weighted_quantile_config(double sigma, std::size_t N) {
  ExperimentConfig c;
  c.T = 60;
  c.N = N;
  c.alpha = 0.4;
  c.M = 200;
  c.seed = 6;
  c.rule.kind = "weighted_quantile";
  c.rule.q_sel = 0.1;
  c.rule.rho = 0.5;
  c.data.source = "nonlinear";
  c.data.sigma = sigma;
  c.data.model = "ols";
  c.methods = {Method::pemi_det, Method::vanilla};
  return c;
}

struct VanillaPattern {
  std::size_t steps = 0, vanilla_low = 0, pemi_low = 0;
  double vanilla_mean = 0, pemi_min = INFINITY;
};

VanillaPattern vanilla_pattern(const ExperimentResult& r) {
  VanillaPattern v;
  for (const auto& row : r.metrics) {
    if (row.t < 20 || row.t > 60 || row.selection_count == 0) continue;
    if (row.method == Method::vanilla) {
      ++v.steps;
      v.vanilla_low += row.coverage_estimate < 0.55;
      v.vanilla_mean += row.coverage_estimate;
    } else if (row.method == Method::pemi_det) {
      v.pemi_low += row.coverage_estimate < 0.58;
      v.pemi_min = std::min(v.pemi_min, row.coverage_estimate);
    }
  }
  v.vanilla_mean /= static_cast<double>(std::max<std::size_t>(v.steps, 1));
  return v;
}

Outcome vanilla_miscoverage() {
  const auto v = vanilla_pattern(run_experiment(weighted_quantile_config(1.0, 10000)));
  // Same protocol at a high noise level, where vanilla does fall short.
  const auto hi = vanilla_pattern(run_experiment(weighted_quantile_config(10.0, 10000)));
  const bool pass = v.steps == 41 && 2 * v.vanilla_low > v.steps && v.pemi_low == 0;
  return {pass, fmt("sigma=1: vanilla below 0.55 at %zu of %zu steps (mean %.4f), PEMI min %.4f; "
                    "sigma=10: vanilla below 0.55 at %zu of %zu steps (mean %.4f), PEMI min %.4f",
                    v.vanilla_low, v.steps, v.vanilla_mean, v.pemi_min, hi.vanilla_low, hi.steps, hi.vanilla_mean,
                    hi.pemi_min)};
}

Outcome multi_test() {
  constexpr std::size_t kReps = 3000, kN = 8, kTests = 3, kM = 100;
  constexpr double kAlpha = 0.4;
  const auto train = gen_nonlinear({Setting::nonlinear_1d, 1.0, 700}, 200);
  const auto mu = std::make_shared<LinearPredictor>(fit_ols(train));
  const ResidualScore score(mu);
  const TopKRule top1(mu, 1);

  const auto draw = [&](std::uint64_t seed, std::vector<double>& labels) {
    const auto pts = gen_nonlinear({Setting::nonlinear_1d, 1.0, seed}, kN + kTests);
    MultiTestData data;
    data.calib.assign(pts.begin(), pts.begin() + kN);
    labels.clear();
    for (std::size_t k = kN; k < pts.size(); ++k) {
      data.tests.push_back(pts[k].x);
      labels.push_back(pts[k].y);
    }
    return data;
  };

  std::vector<std::array<std::int8_t, kTests>> covered(kReps);
  for_each_index(kReps, Execution::parallel, [&](std::size_t r) {
    std::vector<double> labels;
    const auto data = draw(derive_seed(7, {static_cast<std::uint64_t>(r), 1}), labels);
    covered[r].fill(-1);
    for (std::size_t j : top1.selected(data)) {
      const auto perms = sample_permutations(kN + 1, kM, derive_seed(7, {r, 2, j}));
      const auto set = pemi_set_multi_test(data, j, top1, score, perms, kAlpha, Execution::serial);
      covered[r][j] = contains(set, score, data.tests[j], labels[j]);
    }
  });
  bool ok = true;
  std::string per_j;
  for (std::size_t j = 0; j < kTests; ++j) {
    std::size_t n = 0, c = 0;
    for (const auto& row : covered) {
      n += row[j] >= 0;
      c += row[j] == 1;
    }
    const double cov = static_cast<double>(c) / static_cast<double>(n);
    ok = ok && n > 0 && cov >= 1 - kAlpha - 2 * se(1 - kAlpha, n);
    per_j += fmt("%sj=%zu %.4f (n=%zu)", j ? ", " : "", j, cov, n);
  }

  // Swap construction against PEMI over all 9! orderings.
  const auto all = FullEnumeration(kN + 1, 1, kN + 1).sample();
  std::size_t agree = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> labels;
    const auto data = draw(derive_seed(8, {i}), labels);
    const std::size_t j = top1.selected(data).front();
    const auto jomi = jomi_set_multi_test(data, j, top1, score, kAlpha, i);
    const auto full = pemi_set_multi_test(data, j, top1, score, all, kAlpha);
    bool same = std::get<Threshold>(jomi).bound == std::get<Threshold>(full).bound;
    const double m = (*mu)(data.tests[j]);
    for (const auto& p : data.calib) {
      const double s = std::abs(p.y - (*mu)(p.x));
      for (double y : {m - s, m + s, std::nextafter(m + s, INFINITY), std::nextafter(m - s, -INFINITY)})
        same = same && contains(jomi, score, data.tests[j], y) == contains(full, score, data.tests[j], y);
    }
    agree += same;
  }
  ok = ok && agree == 20;
  return {ok, fmt("coverage per selected index: %s; swap construction matches full PEMI on %zu/20", per_j.c_str(),
                  agree)};
}

// Exhaustive checks over every small instance on a coarse lattice.
Outcome unit_exactness() {
  std::size_t cases = 0, bad = 0;
  const auto odometer = [](std::vector<int>& digits, int base) {
    for (auto& d : digits) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };

  // augmented_quantile: the ceil(beta n)-th smallest, +inf past the end.
  for (std::size_t n = 0; n <= 10; ++n) {
    std::vector<int> d(n, 0);
    do {
      std::vector<double> v(d.begin(), d.end());
      std::vector<int> sorted(d);
      std::sort(sorted.begin(), sorted.end());
      for (int m = 1; m <= 24; ++m) {
        const double beta = m / 16.0;
        std::size_t k = 1;
        while (k * 16 < static_cast<std::size_t>(m) * n) ++k;
        const double expect = k > n ? INFINITY : sorted[k - 1];
        ++cases;
        bad += augmented_quantile(beta, v).value() != expect;
      }
    } while (odometer(d, 3));
  }

  // weighted_quantile: smallest value whose weighted CDF reaches beta.
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<int> d(2 * n, 0);
    do {
      std::vector<double> v(n), w(n);
      long total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = d[i];
        w[i] = 1 << d[n + i];
        total += 1 << d[n + i];
      }
      for (int m = 1; m <= 16; ++m) {
        double expect = INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
          long below = 0;
          for (std::size_t k = 0; k < n; ++k) below += v[k] <= v[i] ? static_cast<long>(w[k]) : 0;
          if (16 * below >= m * total) expect = std::min(expect, v[i]);
        }
        ++cases;
        bad += weighted_quantile(m / 16.0, v, w) != expect;
      }
    } while (odometer(d, 3));
  }

  // weighted_conformal_pvalue: an exact ratio of integers.
  for (std::size_t t = 1; t <= 5; ++t) {
    std::vector<int> d(3 * t, 0);
    do {
      std::vector<double> f(t), w(t);
      std::vector<std::uint8_t> null(t);
      for (std::size_t i = 0; i < t; ++i) {
        f[i] = d[i];
        null[i] = d[t + i] > 0;
        w[i] = 1 + d[2 * t + i];
      }
      long num = static_cast<long>(w[t - 1]), den = static_cast<long>(w[t - 1]);
      for (std::size_t i = 0; i + 1 < t; ++i) {
        den += static_cast<long>(w[i]);
        if (null[i] && f[i] >= f[t - 1]) num += static_cast<long>(w[i]);
      }
      ++cases;
      bad += weighted_conformal_pvalue(f, null, w) != static_cast<double>(num) / static_cast<double>(den);
    } while (odometer(d, 3));
  }

  // lond_threshold and the LOND recursion over every p-value path.
  for (std::size_t r = 0; r <= 10; ++r) {
    ++cases;
    bad += lond_threshold(0.5, 0.25, r) != 0.125 * static_cast<double>(r + 1);
  }
  const std::vector<double> g{0.25, 0.125, 0.125, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.03125, 0.03125};
  const LondEngine lond(0.5, GammaSequence::explicit_terms(g));
  for (std::size_t t = 1; t <= 10; ++t) {
    std::vector<int> d(t, 0);
    do {
      std::vector<double> p(t), a(t);
      for (std::size_t i = 0; i < t; ++i) p[i] = d[i] ? 0.5 : 0.0078125;
      lond.replay(p, a);
      std::size_t rej = 0;
      for (std::size_t i = 0; i < t; ++i) {
        const double expect = 0.5 * g[i] * static_cast<double>(rej + 1);
        ++cases;
        bad += a[i] != expect;
        rej += p[i] <= expect;
      }
    } while (odometer(d, 2));
  }
  return {bad == 0, fmt("%zu exhaustive cases, %zu mismatches", cases, bad)};
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  // The output directory is part of the recorded config, so both runs share it.
  const auto dir = std::filesystem::temp_directory_path() / "pemi_acceptance_determinism";
  std::filesystem::remove_all(dir);
  const std::string cmd =
      std::string(PEMI_CLI) + " run --rule weighted_quantile --T 12 --N 40 --M 60 --seed 11 --out " + dir.string() + " > /dev/null";
  std::map<std::string, std::string> first;
  for (int run = 0; run < 2; ++run) {
    if (std::system(cmd.c_str()) != 0) return {false, "the run command failed"};
    if (run == 0)
      for (const auto& e : std::filesystem::directory_iterator(dir)) first[e.path().filename()] = read_all(e.path());
  }
  std::size_t differ = 0;
  for (const auto& [name, bytes] : first) differ += read_all(dir / name) != bytes;
  const auto events = std::count(first["events.csv"].begin(), first["events.csv"].end(), '\n') - 1;
  std::filesystem::remove_all(dir);
  return {first.size() >= 5 && differ == 0 && events > 0,
          fmt("%zu output files compared, %zu differ, %ld events", first.size(), differ, static_cast<long>(events))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"selection-conditional coverage, deterministic", scc_deterministic},
      {"selection-conditional coverage, randomized", scc_randomized},
      {"validity without selection", no_selection_validity},
      {"FCR control", fcr_control},
      {"vanilla miscoverage under weighted-quantile selection", vanilla_miscoverage},
      {"multiple test points", multi_test},
      {"exhaustive unit exactness", unit_exactness},
      {"byte-identical reruns", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s [%s] (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}

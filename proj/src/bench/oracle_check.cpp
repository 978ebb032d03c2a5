#include "pemi/bench/oracle_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "pemi/errors.hpp"
#include "pemi/fast.hpp"
#include "pemi/oracle.hpp"
#include "pemi/random.hpp"

namespace pemi::bench {
namespace {

constexpr std::size_t kModels = 3;
constexpr double kAlpha = 0.3;
constexpr std::size_t kMaxTries = 400;

// Features are [mu_hat, f1, f2, f3]; labels follow mu_hat with noise. Half
// the instances round everything to a coarse lattice so that scores tie.
std::vector<LabeledPoint> draw_points(SplitMix64& gen, std::size_t n, bool coarse) {
  const auto r = [&](double v) { return coarse ? std::round(v * 2.0) / 2.0 : v; };
  std::vector<LabeledPoint> out(n);
  for (auto& p : out) {
    const double mu = r(4.0 * uniform01(gen) - 2.0);
    p.x = {mu};
    for (std::size_t k = 0; k < kModels; ++k) p.x.push_back(r(mu + 2.0 * uniform01(gen) - 1.0));
    p.y = r(mu + 3.0 * uniform01(gen) - 1.5);
    p.cutoff = coarse ? 0.0 : r(uniform01(gen) - 0.5);
  }
  return out;
}

struct Instance {
  DataSequence seq;
  PermutationSample perms;
  double u;
};

// Generic and closed-form answers for one instantiation.
struct Family {
  std::string name;
  std::size_t n_offline = 0;
  bool randomized = false;
  std::shared_ptr<const SelectionRule> rule;
  std::function<PredictionSetDescriptor(const Instance&, const LastPointScore&)> fast;
  std::function<bool(double y, const Instance&, const LastPointScore&, const PermutationSample&)> generic;
  std::function<std::vector<double>(const Instance&)> extra_labels = [](const Instance&) {
    return std::vector<double>{};
  };
};

std::vector<Family> families() {
  const auto mu = column(0);
  std::vector<PredictorPtr> models;
  for (std::size_t k = 1; k <= kModels; ++k) models.push_back(column(k));
  const auto plain_generic = [](const SelectionRule& rule, bool rand) {
    return [&rule, rand](double y, const Instance& in, const LastPointScore& v, const PermutationSample& perms) {
      const auto p = rand ? pemi_pvalue_randomized(y, in.seq, rule, v, perms, in.u, Execution::serial)
                          : pemi_pvalue(y, in.seq, rule, v, perms, Execution::serial);
      return p.value > kAlpha;
    };
  };

  std::vector<Family> out;
  const std::vector<std::pair<std::string, RulePtr>> covariate{
      {"decision_driven", std::make_shared<DecisionDrivenRule>(mu, 2.0, -0.5)},
      {"weighted_quantile",
       std::make_shared<WeightedPredictionRule>(mu, WeightedPredictionRule::Mode::quantile, 0.4,
                                                PositionWeights::geometric(0.5))},
      {"weighted_average",
       std::make_shared<WeightedPredictionRule>(mu, WeightedPredictionRule::Mode::average, 0.1,
                                                PositionWeights::geometric(0.5))},
      {"uncertainty_budget", std::make_shared<UncertaintyBudgetRule>(models, 0.5)},
  };
  for (const auto& [name, rule] : covariate) {
    for (bool rand : {false, true}) {
      Family f;
      f.name = "covariate/" + name + (rand ? "/rand" : "");
      f.randomized = rand;
      f.rule = rule;
      const SelectionRule& r = *rule;
      f.fast = [&r, rand](const Instance& in, const LastPointScore& v) {
        return rand ? fast_covariate_set_randomized(in.seq, r, v, in.perms, kAlpha, in.u, Execution::serial)
                    : fast_covariate_set(in.seq, r, v, in.perms, kAlpha, Execution::serial);
      };
      f.generic = plain_generic(r, rand);
      out.push_back(std::move(f));
    }
  }
  {
    // Trajectory-singleton taxonomy with the decision-driven rule.
    Family f;
    f.name = "taxonomy/decision_driven";
    f.rule = covariate.front().second;
    const SelectionRule& r = *f.rule;
    f.fast = [&r](const Instance& in, const LastPointScore& v) {
      const auto tax = SelectionTaxonomy::singleton(r.trajectory(SequenceView(in.seq)));
      return PredictionSetDescriptor{
          Threshold{covariate_threshold(covariate_sets(in.seq, r, v, in.perms, &tax, Execution::serial), kAlpha)}};
    };
    f.generic = [&r](double y, const Instance& in, const LastPointScore& v, const PermutationSample& perms) {
      const auto tax = SelectionTaxonomy::singleton(r.trajectory(SequenceView(in.seq)));
      return pemi_pvalue_taxonomy(y, in.seq, r, tax, v, perms, std::nullopt, Execution::serial).value > kAlpha;
    };
    out.push_back(std::move(f));
  }
  const auto cutoff_labels = [](const Instance& in) {
    const double c = *in.seq.test_cutoff();
    return std::vector<double>{c, std::nextafter(c, -INFINITY), std::nextafter(c, INFINITY)};
  };
  const std::vector<std::pair<std::string, EnginePtr>> engines{
      {"fixed", std::make_shared<FixedThreshold>(0.5)},
      // Front-loaded gamma so that LOND can select at small t.
      {"lond", std::make_shared<LondEngine>(
                   0.99, GammaSequence::explicit_terms({0.05, 0.1, 0.15, 0.2, 0.2, 0.15, 0.15}))},
  };
  for (const auto& [ename, engine] : engines) {
    for (bool rand : {false, true}) {
      // Weights growing into the past keep p-values small enough for LOND.
      const double rho = ename == "fixed" ? 0.9 : 2.0;
      auto rule = std::make_shared<ConformalPValueRule>(mu, engine, PositionWeights::geometric(rho));
      Family f;
      f.name = "conformal_pvalue/" + ename + (rand ? "/rand" : "");
      f.randomized = rand;
      f.rule = rule;
      const ConformalPValueRule& r = *rule;
      f.fast = [&r, rand](const Instance& in, const LastPointScore& v) {
        return fast_conformal_pvalue_set(in.seq, r, v, in.perms, kAlpha, rand ? std::optional(in.u) : std::nullopt,
                                         Execution::serial);
      };
      f.generic = plain_generic(r, rand);
      f.extra_labels = cutoff_labels;
      out.push_back(std::move(f));
    }
  }
  for (bool rand : {false, true}) {
    // With two offline points p+ >= 1/3; this gamma keeps the level at 1/3 or
    // more while every earlier point is selected.
    auto rule = std::make_shared<ELondRule>(
        mu, 0.95, GammaSequence::explicit_terms({0.36, 0.18, 0.12, 0.09, 0.075, 0.06, 0.055}));
    Family f;
    f.name = std::string("elond") + (rand ? "/rand" : "");
    f.n_offline = 2;
    f.randomized = rand;
    f.rule = rule;
    const ELondRule& r = *rule;
    f.fast = [&r, rand](const Instance& in, const LastPointScore& v) {
      return fast_elond_set(in.seq, r, v, in.perms, kAlpha, rand ? std::optional(in.u) : std::nullopt,
                            Execution::serial);
    };
    f.generic = [&r, rand](double y, const Instance& in, const LastPointScore& v, const PermutationSample& perms) {
      if (rand) return pemi_pvalue_randomized(y, in.seq, r, v, perms, in.u, Execution::serial).value > kAlpha;
      return pemi_pvalue_offline(y, in.seq, r, v, perms, Execution::serial).value > kAlpha;
    };
    f.extra_labels = cutoff_labels;
    out.push_back(std::move(f));
  }
  for (bool rand : {false, true}) {
    auto rule = std::make_shared<EarlierOutcomeRule>(mu, 0.5, PositionWeights::geometric(0.7));
    Family f;
    f.name = std::string("earlier_outcome") + (rand ? "/rand" : "");
    f.randomized = rand;
    f.rule = rule;
    const EarlierOutcomeRule& r = *rule;
    f.fast = [&r, rand](const Instance& in, const LastPointScore& v) {
      EarlierOutcomeOptions o;
      if (rand) o = {in.u, true};
      return fast_earlier_outcome_set(in.seq, r, v, in.perms, kAlpha, o, Execution::serial);
    };
    f.generic = plain_generic(r, rand);
    f.extra_labels = [&r](const Instance& in) {
      std::vector<double> out;
      for (std::size_t s = 0; s < in.seq.test_slot(); ++s) {
        const double m = r.predict(in.seq.x(s));
        out.insert(out.end(), {m, std::nextafter(m, -INFINITY), std::nextafter(m, INFINITY)});
      }
      return out;
    };
    out.push_back(std::move(f));
  }
  return out;
}

// Labels whose score spans the observed score range, plus every observed
// score position exactly (where ties and closed ends matter).
std::vector<double> label_grid(const Instance& in, const LastPointScore& v, std::size_t n,
                               const std::vector<double>& extra) {
  const auto x = in.seq.test_x();
  const double center = x[0];
  double smax = 1.0;
  std::vector<double> out(extra);
  for (std::size_t s = 0; s < in.seq.test_slot(); ++s) {
    const double sc = v.score(in.seq.x(s), in.seq.y(s));
    smax = std::max(smax, sc);
    out.push_back(center - sc);
    out.push_back(center + sc);
  }
  for (std::size_t g = 0; g < n; ++g)
    out.push_back(center - 1.2 * smax + 2.4 * smax * static_cast<double>(g) / static_cast<double>(n - 1));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::string> oracle_check_instantiations() {
  std::vector<std::string> out;
  for (const auto& f : families()) out.push_back(f.name);
  return out;
}

std::vector<OracleCheckLine> oracle_check(const OracleCheckOptions& options) {
  const auto all = families();
  for (const auto& name : options.only)
    if (std::none_of(all.begin(), all.end(), [&](const Family& f) { return f.name == name; }))
      throw ConfigError("unknown instantiation '" + name + "'");
  const ResidualScore score(column(0));
  constexpr std::size_t kM[] = {0, 5, 20};

  std::vector<OracleCheckLine> lines;
  for (std::size_t fi = 0; fi < all.size(); ++fi) {
    const Family& f = all[fi];
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), f.name) == options.only.end())
      continue;
    OracleCheckLine line;
    line.instantiation = f.name;
    for (std::size_t i = 0; i < options.instances; ++i) {
      SplitMix64 gen(derive_seed(options.seed, {fi, i}));
      const std::size_t t = 3 + uniform_below(gen, 5);
      const std::size_t M = kM[uniform_below(gen, 3)];
      const bool coarse = i % 2 == 0;
      // Redraw until the observed test point is selected.
      std::optional<DataSequence> seq;
      for (std::size_t tries = 0; tries < kMaxTries && !seq; ++tries) {
        auto pts = draw_points(gen, f.n_offline + t, coarse);
        std::vector<LabeledPoint> off(pts.begin(), pts.begin() + static_cast<long>(f.n_offline));
        std::vector<LabeledPoint> lab(pts.begin() + static_cast<long>(f.n_offline), pts.end() - 1);
        DataSequence cand = DataSequence::with_offline(off, lab, pts.back().x, pts.back().cutoff);
        if (f.rule->select(SequenceView(cand))) seq = std::move(cand);
      }
      if (!seq) throw PreconditionError(f.name + ": could not draw a selected instance");
      const Instance in{*seq, sample_permutations(*seq, M, gen()), uniform01(gen)};
      ++line.instances;

      const auto fast = f.fast(in, score);
      const auto labels = label_grid(in, score, options.grid, f.extra_labels(in));
      for (double y : labels) {
        ++line.points;
        line.mismatches += contains(fast, score, in.seq.test_x(), y) != f.generic(y, in, score, in.perms);
      }

      if (t > options.full_max_t) continue;
      const auto every = FullEnumeration(in.seq.size(), in.seq.first_index()).sample(false);
      const Instance full{in.seq, every, in.u};
      const auto fast_full = f.fast(full, score);
      for (double y : labels) {
        ++line.full_points;
        const bool oracle = f.generic(y, full, score, every);
        line.full_mismatches += contains(fast_full, score, in.seq.test_x(), y) != oracle;
      }
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace pemi::bench

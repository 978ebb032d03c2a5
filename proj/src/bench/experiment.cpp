#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

#include "pemi/bench/experiment.hpp"
#include "pemi/errors.hpp"
#include "pemi/fast.hpp"
#include "pemi/oracle.hpp"
#include "pemi/random.hpp"

namespace pemi::bench {
namespace {

// Stream keys for derive_seed(config.seed, {replication, key, ...}).
enum SeedKey : std::uint64_t { kTrain = 1, kStream = 2, kBootstrap = 3, kShuffle = 4, kPerms = 5, kTieBreak = 6 };

// Rule inputs are precomputed per point: column 0 holds mu_hat, then the
// ensemble outputs f1..fk, then q_lo and q_hi for the quantile score.
struct Layout {
  std::size_t ensemble = 0;
  bool quantiles = false;
  std::size_t lo() const { return 1 + ensemble; }
  std::size_t hi() const { return 2 + ensemble; }
};

PositionWeights weights_for(double rho) { return rho == 1.0 ? PositionWeights::equal() : PositionWeights::geometric(rho); }

// The configured rule and score, shared by every replication.
struct Pipeline {
  Layout layout;
  RulePtr rule;
  std::shared_ptr<const LastPointScore> score;
  enum class Family { covariate, conformal, elond, earlier } family = Family::covariate;
  bool singleton = false;

  explicit Pipeline(const ExperimentConfig& c) {
    const auto& r = c.rule;
    if (r.kind == "uncertainty_budget") layout.ensemble = r.ensemble;
    layout.quantiles = c.score == "cqr";
    singleton = r.taxonomy == "singleton";
    PredictorPtr mu = column(0);
    if (r.offset != 0.0) mu = std::make_shared<AffinePredictor>(mu, r.offset);
    if (r.kind == "always") {
      rule = std::make_shared<ConstantRule>(true);
    } else if (r.kind == "decision_driven") {
      rule = std::make_shared<DecisionDrivenRule>(mu, r.tau0, r.tau1);
    } else if (r.kind == "weighted_quantile" || r.kind == "weighted_average") {
      const auto mode = r.kind == "weighted_quantile" ? WeightedPredictionRule::Mode::quantile
                                                      : WeightedPredictionRule::Mode::average;
      rule = std::make_shared<WeightedPredictionRule>(mu, mode, r.q_sel, weights_for(r.rho));
    } else if (r.kind == "uncertainty_budget") {
      std::vector<PredictorPtr> models;
      for (std::size_t k = 0; k < layout.ensemble; ++k) models.push_back(column(1 + k));
      rule = std::make_shared<UncertaintyBudgetRule>(std::move(models), r.budget);
    } else if (r.kind == "conformal_pvalue") {
      family = Family::conformal;
      EnginePtr engine;
      if (r.engine == "fixed") engine = std::make_shared<FixedThreshold>(r.level);
      else if (r.engine == "lond") engine = std::make_shared<LondEngine>(r.level);
      else if (r.engine == "saffron") engine = std::make_shared<SaffronEngine>(r.level);
      else engine = std::make_shared<AddisEngine>(r.level);
      rule = std::make_shared<ConformalPValueRule>(mu, engine, weights_for(r.rho));
    } else if (r.kind == "elond") {
      family = Family::elond;
      std::optional<std::uint64_t> seed;
      if (r.randomize) seed = derive_seed(c.seed, {0xe10dULL});
      rule = std::make_shared<ELondRule>(mu, r.level, GammaSequence::default_lond(), seed);
    } else {
      family = Family::earlier;
      rule = std::make_shared<EarlierOutcomeRule>(mu, r.beta, weights_for(r.rho));
    }
    if (layout.quantiles) score = std::make_shared<CqrScore>(column(layout.lo()), column(layout.hi()));
    else score = std::make_shared<ResidualScore>(column(0));
  }

  // Deterministic and randomized sets from one pass over the permutations.
  struct Sets {
    PredictionSetDescriptor det, rand;
  };

  Sets pemi(const DataSequence& seq, const PermutationSample& perms, double alpha, double u, bool want_rand,
            const SelectionTaxonomy* taxonomy) const {
    constexpr auto serial = Execution::serial;
    switch (family) {
      case Family::covariate: {
        const auto sets = covariate_sets(seq, *rule, *score, perms, taxonomy, serial);
        return {Threshold{covariate_threshold(sets, alpha)},
                Threshold{want_rand ? covariate_threshold_randomized(sets, alpha, u) : ScoreBound{}}};
      }
      case Family::conformal:
      case Family::elond: {
        const auto sets = cutoff_pair_sets(seq, static_cast<const CutoffRule&>(*rule), *score, perms, serial);
        const auto piece = [&](std::optional<double> uu) -> PredictionSetDescriptor {
          const auto b = [&](const CovariateSets& s) {
            return uu ? covariate_threshold_randomized(s, alpha, *uu) : covariate_threshold(s, alpha);
          };
          return PiecewiseByCutoff{sets.cutoff, b(sets.regime[0]), b(sets.regime[1])};
        };
        return {piece(std::nullopt), want_rand ? piece(u) : PredictionSetDescriptor{}};
      }
      case Family::earlier: {
        const auto& er = static_cast<const EarlierOutcomeRule&>(*rule);
        auto det = fast_earlier_outcome_set(seq, er, *score, perms, alpha, {}, serial);
        if (!want_rand) return {std::move(det), {}};
        return {std::move(det), fast_earlier_outcome_set(seq, er, *score, perms, alpha, {u, false}, serial)};
      }
    }
    throw ConfigError("unreachable rule family");
  }
};

std::vector<double> transform(std::span<const double> x, const PredictorPtr& mu, const std::vector<LinearPredictor>& ens) {
  std::vector<double> out{(*mu)(x)};
  for (const auto& f : ens) out.push_back(f(x));
  return out;
}

// A bootstrap resample of the training data per ensemble member.
std::vector<LinearPredictor> fit_ensemble(std::span<const LabeledPoint> train, std::size_t k, std::uint64_t seed) {
  std::vector<LinearPredictor> out;
  for (std::size_t m = 0; m < k; ++m) {
    SplitMix64 gen(derive_seed(seed, {m}));
    std::vector<LabeledPoint> boot(train.size());
    for (auto& p : boot) p = train[uniform_below(gen, train.size())];
    out.push_back(fit_ols(boot));
  }
  return out;
}

// The n_offline + T points of one replication in rule-input form.
std::vector<LabeledPoint> replication_stream(const ExperimentConfig& c, const Layout& layout, const Dataset* data,
                                             std::size_t rep) {
  const std::size_t need = c.rule.n_offline + c.T;
  const auto key = [&](SeedKey k) { return derive_seed(c.seed, {rep, k}); };

  std::vector<LabeledPoint> train, stream;
  bool raw = true;
  if (data) {
    std::vector<std::size_t> order(data->rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (c.data.shuffle) {
      SplitMix64 gen(key(kShuffle));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(gen, i)]);
    }
    raw = !data->has_predictions();
    const std::size_t n_train = raw ? c.data.n_train : 0;
    if (order.size() < n_train + need)
      throw DataError(c.data.path + ": " + std::to_string(order.size()) + " rows, experiment needs " +
                      std::to_string(n_train + need));
    for (std::size_t i = 0; i < n_train; ++i) train.push_back(data->rows[order[i]]);
    for (std::size_t i = 0; i < need; ++i) stream.push_back(data->rows[order[n_train + i]]);
  } else {
    const Setting s = c.data.source == "nonlinear" ? Setting::nonlinear_1d : Setting::setting3_20d;
    stream = generate({s, c.data.sigma, key(kStream)}, need);
    if (c.data.model == "ols" || layout.ensemble > 0) train = generate({s, c.data.sigma, key(kTrain)}, c.data.n_train);
  }

  if (!raw) {
    // Reorder prediction columns into the layout.
    std::vector<std::size_t> cols{0};
    for (std::size_t k = 1; k <= layout.ensemble; ++k) {
      const auto j = data->column("f" + std::to_string(k));
      if (j == Dataset::npos) throw DataError(c.data.path + ": missing ensemble column f" + std::to_string(k));
      cols.push_back(j);
    }
    if (layout.quantiles) {
      for (const char* name : {"q_lo", "q_hi"}) {
        const auto j = data->column(name);
        if (j == Dataset::npos) throw DataError(c.data.path + ": missing column " + name);
        cols.push_back(j);
      }
    }
    for (auto& p : stream) {
      std::vector<double> x;
      for (auto j : cols) x.push_back(p.x[j]);
      p.x = std::move(x);
    }
  } else {
    if (layout.quantiles) throw DataError("quantile scores need q_lo and q_hi prediction columns");
    PredictorPtr mu;
    if (!data && c.data.model == "true") {
      const Setting s = c.data.source == "nonlinear" ? Setting::nonlinear_1d : Setting::setting3_20d;
      struct True final : Predictor {
        Setting s;
        explicit True(Setting s) : s(s) {}
        double operator()(std::span<const double> x) const override { return true_mean(s, x); }
      };
      mu = std::make_shared<True>(s);
    } else {
      mu = std::make_shared<LinearPredictor>(fit_ols(train));
    }
    const auto ens = fit_ensemble(train, layout.ensemble, key(kBootstrap));
    for (auto& p : stream) p.x = transform(p.x, mu, ens);
  }
  for (auto& p : stream)
    if (!p.cutoff) p.cutoff = c.rule.cutoff;
  return stream;
}

struct RepOutcome {
  std::vector<Event> events;
};

RepOutcome run_replication(const ExperimentConfig& c, const Pipeline& pipe, const Dataset* data, std::size_t rep) {
  const auto stream = replication_stream(c, pipe.layout, data, rep);
  const std::size_t n_off = c.rule.n_offline;
  const std::vector<LabeledPoint> offline(stream.begin(), stream.begin() + static_cast<long>(n_off));
  const bool want = [&] {
    for (Method m : c.methods)
      if (m != Method::vanilla) return true;
    return false;
  }();
  const bool want_rand = std::find(c.methods.begin(), c.methods.end(), Method::pemi_rand) != c.methods.end();

  RepOutcome out;
  std::vector<LabeledPoint> labeled;
  for (std::size_t t = 1; t <= c.T; ++t) {
    const LabeledPoint& now = stream[n_off + t - 1];
    const DataSequence seq = DataSequence::with_offline(offline, labeled, now.x, now.cutoff);
    labeled.push_back(now);

    std::optional<SelectionTaxonomy> taxonomy;
    bool selected;
    if (pipe.singleton) {
      Trajectory tr = pipe.rule->trajectory(SequenceView(seq));
      selected = tr.back() != 0;
      taxonomy = SelectionTaxonomy::singleton(std::move(tr));
    } else {
      selected = pipe.rule->select(SequenceView(seq));
    }
    if (!selected) continue;

    SplitMix64 tie(derive_seed(c.seed, {rep, kTieBreak, t}));
    const double u = uniform01(tie);
    const SelectionTaxonomy* tax = taxonomy ? &*taxonomy : nullptr;
    std::optional<Pipeline::Sets> sets;
    if (want && (std::find(c.methods.begin(), c.methods.end(), Method::pemi_det) != c.methods.end() || want_rand))
      sets = pipe.pemi(seq, sample_permutations(seq, c.M, derive_seed(c.seed, {rep, kPerms, t})), c.alpha, u,
                       want_rand, tax);

    for (Method m : c.methods) {
      PredictionSetDescriptor d;
      switch (m) {
        case Method::pemi_det: d = sets->det; break;
        case Method::pemi_rand: d = sets->rand; break;
        case Method::vanilla: d = vanilla_cp_set(seq, *pipe.score, c.alpha); break;
        case Method::oracle: {
          const auto all = FullEnumeration(seq.size(), seq.first_index(), c.oracle_limit).sample(false);
          d = pipe.pemi(seq, all, c.alpha, u, false, tax).det;
          break;
        }
      }
      out.events.push_back({rep, t, m, contains(d, *pipe.score, now.x, now.y), set_size(d, *pipe.score, now.x)});
    }
  }
  return out;
}

}  // namespace

ExtendedReal median_size(std::vector<ExtendedReal> sizes) {
  if (sizes.empty()) return ExtendedReal(std::numeric_limits<double>::quiet_NaN());
  std::sort(sizes.begin(), sizes.end());
  const std::size_t n = sizes.size();
  const ExtendedReal lower = sizes[(n - 1) / 2];
  if (n % 2 == 1) return lower;
  const ExtendedReal upper = sizes[n / 2];
  if (upper.is_pos_infinity()) return lower;
  return ExtendedReal((lower.value() + upper.value()) / 2.0);
}

void aggregate(const std::vector<Event>& events, const std::vector<Method>& methods, std::size_t T, std::size_t N,
               std::vector<MetricsRow>& metrics, std::vector<FcrReport>& fcr) {
  metrics.clear();
  fcr.clear();
  for (Method m : methods) {
    std::vector<std::vector<ExtendedReal>> sizes(T + 1);
    std::vector<std::size_t> covered(T + 1, 0), infinite(T + 1, 0);
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_rep;  // selected, missed
    for (const auto& e : events) {
      if (e.method != m || e.t == 0 || e.t > T) continue;
      sizes[e.t].push_back(e.size);
      covered[e.t] += e.covered;
      infinite[e.t] += e.size.is_pos_infinity();
      auto& r = per_rep[e.replication];
      ++r.first;
      r.second += !e.covered;
    }
    for (std::size_t t = 1; t <= T; ++t) {
      MetricsRow row;
      row.method = m;
      row.t = t;
      row.selection_count = sizes[t].size();
      row.covered_count = covered[t];
      const double sel = static_cast<double>(row.selection_count);
      row.coverage_estimate = sel > 0 ? static_cast<double>(covered[t]) / sel : std::nan("");
      row.infinite_fraction = sel > 0 ? static_cast<double>(infinite[t]) / sel : 0.0;
      row.median_size = median_size(std::move(sizes[t]));
      metrics.push_back(row);
    }
    double total = 0;
    for (const auto& [rep, r] : per_rep) total += static_cast<double>(r.second) / static_cast<double>(r.first);
    fcr.push_back({m, T, N, N > 0 ? total / static_cast<double>(N) : 0.0});
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const Pipeline pipe(config);
  std::optional<Dataset> data;
  if (config.data.source == "csv") data = load_dataset(config.data.path);

  std::vector<RepOutcome> reps(config.N);
  for_each_index(config.N, exec, [&](std::size_t r) {
    reps[r] = run_replication(config, pipe, data ? &*data : nullptr, r);
  });

  ExperimentResult result;
  for (auto& r : reps) result.events.insert(result.events.end(), r.events.begin(), r.events.end());
  aggregate(result.events, config.methods, config.T, config.N, result.metrics, result.fcr);
  return result;
}

}  // namespace pemi::bench

#include "split.hpp"

namespace pemi {
namespace {

ScoreBound bound_for(const CovariateSets& sets, double alpha, std::optional<double> u) {
  return u ? covariate_threshold_randomized(sets, alpha, *u) : covariate_threshold(sets, alpha);
}

}  // namespace

CutoffPairSets cutoff_pair_sets(const DataSequence& seq, const CutoffRule& rule, const LastPointScore& score,
                                const PermutationSample& perms, Execution exec) {
  detail::check_domain(seq, perms);
  if (!seq.has_cutoffs()) throw ConfigError("conformal selection requires a cutoff for every point");
  if (!rule.select(SequenceView(seq))) throw PreconditionError("the observed data point is not selected");

  // F and the null indicators are computed once per slot; each permutation
  // only gathers them. The imputed slot's indicator is the regime k.
  const std::size_t n = seq.size(), test = seq.test_slot();
  std::vector<double> f(n), v(n, 0.0);
  std::vector<std::uint8_t> null(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    f[s] = rule.conformal_score(seq.x(s), *seq.cutoff(s));
    if (s != test) {
      null[s] = seq.y(s) <= *seq.cutoff(s);
      v[s] = score.score(seq.x(s), seq.y(s));
    }
  }

  detail::Membership regime[2]{detail::Membership(perms.size()), detail::Membership(perms.size())};
  for_each_index(perms.size(), exec, [&](std::size_t i) {
    const auto img = perms.image(i);
    std::vector<double> fp(n);
    std::vector<std::uint8_t> np(n);
    std::size_t imputed_at = 0;
    for (std::size_t p = 0; p < n; ++p) {
      fp[p] = f[img[p]];
      np[p] = null[img[p]];
      if (img[p] == test) imputed_at = p;
    }
    const std::size_t last = img[n - 1];
    for (int k = 0; k < 2; ++k) {
      np[imputed_at] = static_cast<std::uint8_t>(k);
      if (!rule.select_from(fp, np, seq.offline_size())) continue;
      regime[k].state[i] = last == test ? 0 : 1;
      regime[k].score[i] = v[last];
    }
  });

  CutoffPairSets out;
  out.cutoff = *seq.test_cutoff();
  out.regime[0] = regime[0].fold();
  out.regime[1] = regime[1].fold();
  return out;
}

PredictionSetDescriptor fast_conformal_pvalue_set(const DataSequence& seq, const ConformalPValueRule& rule,
                                                  const LastPointScore& score, const PermutationSample& perms,
                                                  double alpha, std::optional<double> u, Execution exec) {
  const auto sets = cutoff_pair_sets(seq, rule, score, perms, exec);
  return PiecewiseByCutoff{sets.cutoff, bound_for(sets.regime[0], alpha, u), bound_for(sets.regime[1], alpha, u)};
}

PredictionSetDescriptor fast_elond_set(const DataSequence& seq, const ELondRule& rule, const LastPointScore& score,
                                       const PermutationSample& perms, double alpha, std::optional<double> u,
                                       Execution exec) {
  if (seq.offline_size() == 0) throw ConfigError("e-LOND selection needs an offline block");
  const auto sets = cutoff_pair_sets(seq, rule, score, perms, exec);
  return PiecewiseByCutoff{sets.cutoff, bound_for(sets.regime[0], alpha, u), bound_for(sets.regime[1], alpha, u)};
}

}  // namespace pemi

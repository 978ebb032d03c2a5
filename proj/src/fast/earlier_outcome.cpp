#include <algorithm>

#include "split.hpp"

namespace pemi {

PartitionSets partition_sets(const DataSequence& seq, const EarlierOutcomeRule& rule, const LastPointScore& score,
                             const PermutationSample& perms, Execution exec) {
  detail::check_domain(seq, perms);
  if (!rule.select(SequenceView(seq))) throw PreconditionError("the observed data point is not selected");

  const std::size_t n = seq.size(), test = seq.test_slot(), n_off = seq.offline_size();
  std::vector<double> mu(n), v(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    mu[s] = rule.predict(seq.x(s));
    if (s != test) v[s] = score.score(seq.x(s), seq.y(s));
  }
  PartitionSets out;
  out.breakpoints.assign(mu.begin(), mu.end() - 1);
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end()), out.breakpoints.end());
  const std::size_t D = out.breakpoints.size();

  // Per permutation: which intervals admit it. For pi(t) = s != t the imputed
  // label enters through 1{y <= mu_s}, which is 1 on intervals 0..J (mu_s the
  // J-th breakpoint) and 0 above.
  std::vector<std::int8_t> kind(perms.size(), -1);  // -1 out, 0 fixed, 1 B
  std::vector<std::uint8_t> le(perms.size(), 0), gt(perms.size(), 0);
  std::vector<std::size_t> J(perms.size(), 0);
  for_each_index(perms.size(), exec, [&](std::size_t i) {
    const auto img = perms.image(i);
    const std::size_t s = img[n - 1];
    const double m = mu[s];
    std::vector<std::uint8_t> below(n - 1);
    std::size_t imputed_at = n;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      if (img[p] == test) imputed_at = p;
      else below[p] = seq.y(img[p]) <= m;
    }
    if (s == test) {
      kind[i] = rule.decide(below, n_off) ? 0 : -1;
      return;
    }
    kind[i] = 1;
    below[imputed_at] = 1;
    le[i] = rule.decide(below, n_off);
    below[imputed_at] = 0;
    gt[i] = rule.decide(below, n_off);
    J[i] = static_cast<std::size_t>(std::lower_bound(out.breakpoints.begin(), out.breakpoints.end(), m) -
                                    out.breakpoints.begin());
  });

  out.intervals.assign(D + 1, CovariateSets{});
  for (std::size_t i = 0; i < perms.size(); ++i) {
    if (kind[i] < 0) continue;
    const std::size_t s = perms.image(i)[n - 1];
    for (std::size_t j = 0; j <= D; ++j) {
      const bool in = kind[i] == 0 || (j <= J[i] ? le[i] : gt[i]);
      if (!in) continue;
      ++out.intervals[j].ref_size;
      if (kind[i] == 1) out.intervals[j].scores_B.push_back(v[s]);
    }
  }
  return out;
}

PredictionSetDescriptor fast_earlier_outcome_set(const DataSequence& seq, const EarlierOutcomeRule& rule,
                                                 const LastPointScore& score, const PermutationSample& perms,
                                                 double alpha, EarlierOutcomeOptions options, Execution exec) {
  if (options.randomized_boundary && !options.u)
    throw ConfigError("randomized boundary points need a tie-breaking uniform");
  const auto sets = partition_sets(seq, rule, score, perms, exec);
  IntervalUnion out;
  out.breakpoints = sets.breakpoints;
  for (const auto& s : sets.intervals)
    out.bounds.push_back(options.u ? covariate_threshold_randomized(s, alpha, *options.u)
                                   : covariate_threshold(s, alpha));
  for (double b : sets.breakpoints) {
    const auto p = options.randomized_boundary ? pemi_pvalue_randomized(b, seq, rule, score, perms, *options.u, exec)
                                               : pemi_pvalue(b, seq, rule, score, perms, exec);
    if (p.value > alpha) out.boundary_points.push_back(b);
  }
  return out;
}

}  // namespace pemi

#include <algorithm>

#include "split.hpp"

namespace pemi {

std::size_t threshold_rank(std::size_t ref_size, double alpha) {
  // Smallest count c whose ratio c / |R| clears alpha; k = |R| + 1 - c.
  std::size_t c = 0;
  while (c <= ref_size && !exceeds_level(static_cast<double>(c), ref_size, alpha)) ++c;
  return ref_size + 1 - c;
}

ScoreBound covariate_threshold(const CovariateSets& sets, double alpha) {
  const std::size_t k = threshold_rank(sets.ref_size, alpha);
  if (k == 0) return {ExtendedReal::negative_infinity(), false};  // alpha >= 1: nothing passes
  if (k > sets.scores_B.size()) return {ExtendedReal::infinity(), true};
  std::vector<double> v = sets.scores_B;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return {v[k - 1], true};
}

ScoreBound covariate_threshold_randomized(const CovariateSets& sets, double alpha, double u) {
  if (!(u >= 0 && u <= 1)) throw DomainError("tie-breaking uniform must lie in [0, 1]");
  std::vector<double> v = sets.scores_B;
  std::sort(v.begin(), v.end());
  const std::size_t A = sets.fixed_count();
  const auto pass = [&](std::size_t strict, std::size_t ties) {
    return exceeds_level(pvalue_numerator(strict, ties, u), sets.ref_size, alpha);
  };
  // The count is non-increasing in s = v(X_t, y). Walk the regions
  // (-inf, v_1), {v_1}, (v_1, v_2), ... and stop at the first one that fails.
  if (!pass(v.size(), A)) return {ExtendedReal::negative_infinity(), false};
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const std::size_t above = v.size() - j;
    if (!pass(above, A + (j - i))) return {v[i], false};
    if (!pass(above, A)) return {v[i], true};
    i = j;
  }
  return {ExtendedReal::infinity(), true};
}

CovariateSets covariate_sets(const DataSequence& seq, const SelectionRule& rule, const LastPointScore& score,
                             const PermutationSample& perms, const SelectionTaxonomy* taxonomy, Execution exec) {
  if (!rule.capabilities().covariate_only)
    throw ConfigError("closed-form covariate set requires a covariate-only rule (" + rule.name() + ")");
  const auto keep = [&](const SequenceView& view) {
    if (!taxonomy || taxonomy->is_all()) return rule.select(view);
    const Trajectory tr = rule.trajectory(view);
    return tr.back() != 0 && taxonomy->contains(tr);
  };
  if (!keep(SequenceView(seq))) throw PreconditionError("the observed data point is not selected");
  return detail::split_reference(seq, score, perms, exec, keep);
}

PredictionSetDescriptor fast_covariate_set(const DataSequence& seq, const SelectionRule& rule,
                                           const LastPointScore& score, const PermutationSample& perms,
                                           double alpha, Execution exec) {
  return Threshold{covariate_threshold(covariate_sets(seq, rule, score, perms, nullptr, exec), alpha)};
}

PredictionSetDescriptor fast_covariate_set_randomized(const DataSequence& seq, const SelectionRule& rule,
                                                      const LastPointScore& score, const PermutationSample& perms,
                                                      double alpha, double u, Execution exec) {
  return Threshold{
      covariate_threshold_randomized(covariate_sets(seq, rule, score, perms, nullptr, exec), alpha, u)};
}

PredictionSetDescriptor pemi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const LastPointScore& score,
                                            const PermutationSample& perms, double alpha, Execution exec) {
  if (!rule.capabilities().covariate_only)
    throw ConfigError("threshold form needs a covariate-only rule; pass candidate labels instead");
  if (j >= data.tests.size()) throw PreconditionError("test index out of range");
  const auto sel = rule.selected(data);
  if (std::find(sel.begin(), sel.end(), j) == sel.end())
    throw PreconditionError("test point is not selected on the observed data");
  const DataSequence seq = data.with_test(j);
  const auto sets = detail::split_reference(
      seq, score, perms, exec, [&](const SequenceView& v) { return rule.selects(MultiTestView{v, data.tests, j}, j); });
  return Threshold{covariate_threshold(sets, alpha)};
}

}  // namespace pemi

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pemi/descriptor.hpp"
#include "pemi/engine.hpp"
#include "pemi/rules.hpp"

namespace pemi {

/// A reference set that does not depend on the imputed label, split as
/// R = {pi : pi(t) = t} U B. Members of the first part score exactly like the
/// identity; B carries the scores v(X_pi(t), Y_pi(t)).
struct CovariateSets {
  std::size_t ref_size = 1;
  std::vector<double> scores_B;

  std::size_t fixed_count() const { return ref_size - scores_B.size(); }
};

/// Rank k of the deterministic threshold, computed as |R| + 1 - c_min where
/// c_min is the smallest count passing exceeds_level. Equals
/// ceil((1 - alpha) |R|) in exact arithmetic.
std::size_t threshold_rank(std::size_t ref_size, double alpha);

/// {y : p(y) > alpha} as a score bound: the k-th smallest of scores_B U {+inf}.
ScoreBound covariate_threshold(const CovariateSets& sets, double alpha);

/// The randomized counterpart for tie-breaker u. The bound is exclusive when
/// the set stops just before a B score.
ScoreBound covariate_threshold_randomized(const CovariateSets& sets, double alpha, double u);

/// Throws ConfigError unless the rule is covariate_only and PreconditionError
/// unless it selects the observed data (and, with a taxonomy, the observed
/// trajectory belongs to it).
CovariateSets covariate_sets(const DataSequence& seq, const SelectionRule& rule, const LastPointScore& score,
                             const PermutationSample& perms, const SelectionTaxonomy* taxonomy = nullptr,
                             Execution exec = Execution::parallel);

PredictionSetDescriptor fast_covariate_set(const DataSequence& seq, const SelectionRule& rule,
                                           const LastPointScore& score, const PermutationSample& perms,
                                           double alpha, Execution exec = Execution::parallel);

PredictionSetDescriptor fast_covariate_set_randomized(const DataSequence& seq, const SelectionRule& rule,
                                                      const LastPointScore& score, const PermutationSample& perms,
                                                      double alpha, double u,
                                                      Execution exec = Execution::parallel);

/// Reference sets for the two sides of the cutoff: regime[0] for y > c_t,
/// regime[1] for y <= c_t.
struct CutoffPairSets {
  double cutoff = 0;
  CovariateSets regime[2];
};

CutoffPairSets cutoff_pair_sets(const DataSequence& seq, const CutoffRule& rule, const LastPointScore& score,
                                const PermutationSample& perms, Execution exec = Execution::parallel);

/// PEMI set after selection by a thresholded weighted conformal p-value.
PredictionSetDescriptor fast_conformal_pvalue_set(const DataSequence& seq, const ConformalPValueRule& rule,
                                                  const LastPointScore& score, const PermutationSample& perms,
                                                  double alpha, std::optional<double> u = std::nullopt,
                                                  Execution exec = Execution::parallel);

/// PEMI set after e-LOND selection; perms range over the offline block too.
PredictionSetDescriptor fast_elond_set(const DataSequence& seq, const ELondRule& rule, const LastPointScore& score,
                                       const PermutationSample& perms, double alpha,
                                       std::optional<double> u = std::nullopt,
                                       Execution exec = Execution::parallel);

/// Reference sets on the open intervals between the distinct sorted
/// predictions of the labeled points.
struct PartitionSets {
  std::vector<double> breakpoints;
  std::vector<CovariateSets> intervals;  // breakpoints.size() + 1 entries
};

PartitionSets partition_sets(const DataSequence& seq, const EarlierOutcomeRule& rule, const LastPointScore& score,
                             const PermutationSample& perms, Execution exec = Execution::parallel);

struct EarlierOutcomeOptions {
  /// Tie-breaker for randomized interval thresholds; deterministic if unset.
  std::optional<double> u;
  /// Evaluate the boundary points with the randomized p-value (needs u).
  bool randomized_boundary = false;
};

PredictionSetDescriptor fast_earlier_outcome_set(const DataSequence& seq, const EarlierOutcomeRule& rule,
                                                 const LastPointScore& score, const PermutationSample& perms,
                                                 double alpha, EarlierOutcomeOptions options = {},
                                                 Execution exec = Execution::parallel);

}  // namespace pemi

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pemi/descriptor.hpp"
#include "pemi/kernels.hpp"
#include "pemi/multi_rule.hpp"
#include "pemi/permutation.hpp"
#include "pemi/rule.hpp"
#include "pemi/score.hpp"
#include "pemi/sequence.hpp"

namespace pemi {

/// Sampled permutations that preserve the selection event, plus the identity.
/// Members are indices into the PermutationSample; a permutation drawn twice
/// appears twice.
struct ReferenceSet {
  std::vector<std::uint32_t> members;
  std::size_t size() const { return members.size() + 1; }
  static constexpr bool contains_identity = true;
};

/// p = (strict + u * ties) / ref_size, where strict and ties count reference
/// permutations whose score is above / equal to the identity's. u = 1 gives
/// the deterministic p-value #{V(pi0) <= V(pi)} / |R|.
struct PemiPValue {
  std::size_t ref_size = 1;
  std::size_t strict = 0;
  std::size_t ties = 1;
  double u = 1.0;
  double value = 1.0;

  std::size_t exceed_count() const { return strict + ties; }
};

/// Numerator of a (randomized) p-value; every path that decides membership
/// goes through this and exceeds_level so fast and generic agree bit for bit.
inline double pvalue_numerator(std::size_t strict, std::size_t ties, double u) {
  return static_cast<double>(strict) + u * static_cast<double>(ties);
}
inline bool exceeds_level(double numerator, std::size_t ref_size, double alpha) {
  return numerator / static_cast<double>(ref_size) > alpha;
}

ReferenceSet reference_set(double y, const DataSequence& seq, const SelectionRule& rule,
                           const PermutationSample& perms, Execution exec = Execution::parallel);

/// Reference set restricted to permutations whose whole trajectory lies in
/// the taxonomy (and that select at t).
ReferenceSet reference_set(double y, const DataSequence& seq, const SelectionRule& rule,
                           const SelectionTaxonomy& taxonomy, const PermutationSample& perms,
                           Execution exec = Execution::parallel);

PemiPValue pemi_pvalue(double y, const DataSequence& seq, const SelectionRule& rule, const ConformityScore& score,
                       const PermutationSample& perms, Execution exec = Execution::parallel);

/// Throws DomainError unless u lies in [0, 1].
PemiPValue pemi_pvalue_randomized(double y, const DataSequence& seq, const SelectionRule& rule,
                                  const ConformityScore& score, const PermutationSample& perms, double u,
                                  Execution exec = Execution::parallel);

/// Same as pemi_pvalue; insists that perms cover the extended range
/// {-n_off+1..t}.
PemiPValue pemi_pvalue_offline(double y, const DataSequence& seq, const SelectionRule& rule,
                               const ConformityScore& score, const PermutationSample& perms,
                               Execution exec = Execution::parallel);

PemiPValue pemi_pvalue_taxonomy(double y, const DataSequence& seq, const SelectionRule& rule,
                                const SelectionTaxonomy& taxonomy, const ConformityScore& score,
                                const PermutationSample& perms, std::optional<double> u = std::nullopt,
                                Execution exec = Execution::parallel);

/// {y in labels : p(y) > alpha}; randomized when u is given.
PredictionSetDescriptor pemi_set_finite(std::span<const double> labels, const DataSequence& seq,
                                        const SelectionRule& rule, const ConformityScore& score,
                                        const PermutationSample& perms, double alpha,
                                        std::optional<double> u = std::nullopt,
                                        Execution exec = Execution::parallel);

/// Per-grid-point membership 1{p(y) > alpha}. Grid must be sorted.
std::vector<std::uint8_t> pemi_set_grid(std::span<const double> grid, const DataSequence& seq,
                                        const SelectionRule& rule, const ConformityScore& score,
                                        const PermutationSample& perms, double alpha,
                                        std::optional<double> u = std::nullopt,
                                        Execution exec = Execution::parallel);

/// Multiple test points: perms act on {calibration, test j} (n + 1 slots); the
/// other test covariates stay in place. Throws PreconditionError when the rule
/// does not select j on the observed data.
PemiPValue pemi_pvalue_multi_test(double y, const MultiTestData& data, std::size_t j,
                                  const MultiSelectionRule& rule, const ConformityScore& score,
                                  const PermutationSample& perms, std::optional<double> u = std::nullopt,
                                  Execution exec = Execution::parallel);

/// Closed-form set for covariate-only multi-test rules (a single threshold).
PredictionSetDescriptor pemi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const LastPointScore& score,
                                            const PermutationSample& perms, double alpha,
                                            Execution exec = Execution::parallel);

/// Label-dependent multi-test rules: the set restricted to candidate labels.
PredictionSetDescriptor pemi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const ConformityScore& score,
                                            const PermutationSample& perms, double alpha,
                                            std::span<const double> candidate_labels,
                                            Execution exec = Execution::parallel);

}  // namespace pemi

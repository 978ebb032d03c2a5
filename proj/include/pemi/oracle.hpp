#pragma once

// Brute-force ground truth for verifying the engine and the closed forms.
// Nothing here is meant to scale.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "pemi/descriptor.hpp"
#include "pemi/engine.hpp"
#include "pemi/multi_rule.hpp"

namespace pemi {

/// All n! permutations of n slots in lexicographic order of their slot image.
/// Construction fails with PreconditionError when n exceeds `limit`; raising
/// the limit above the default prints a warning to stderr.
class FullEnumeration {
 public:
  static constexpr std::size_t kDefaultLimit = 8;

  explicit FullEnumeration(std::size_t n, long first_index = 1, std::size_t limit = kDefaultLimit);

  std::size_t size() const { return n_; }
  std::size_t count() const;

  /// Calls f(image) for each permutation, identity first.
  template <class F>
  void for_each(F&& f) const {
    std::vector<std::uint32_t> image(n_);
    std::iota(image.begin(), image.end(), 0u);
    do f(std::span<const std::uint32_t>(image));
    while (std::next_permutation(image.begin(), image.end()));
  }

  /// Every permutation as a sample; without the identity it is the Monte Carlo
  /// sample that makes the engine compute the full-enumeration p-value.
  PermutationSample sample(bool include_identity = false) const;

 private:
  std::size_t n_;
  long first_;
};

/// Eq. (4) with every permutation of the sequence's index range.
PemiPValue full_pemi_pvalue(double y, const DataSequence& seq, const SelectionRule& rule,
                            const ConformityScore& score, std::size_t limit = FullEnumeration::kDefaultLimit);

/// Randomized counterpart of full_pemi_pvalue.
PemiPValue full_pemi_pvalue_randomized(double y, const DataSequence& seq, const SelectionRule& rule,
                                       const ConformityScore& score, double u,
                                       std::size_t limit = FullEnumeration::kDefaultLimit);

/// Permutation full-conformal p-value with a possibly order-sensitive score:
/// the fraction of all permutations pi with V(pi) >= V(identity).
double permutation_fcp_pvalue(double y, const DataSequence& seq, const ConformityScore& score,
                              std::size_t limit = FullEnumeration::kDefaultLimit);

/// Swap construction for a rule symmetric in the labeled prefix: R_J collects
/// the labeled slots i such that exchanging Z_i with the test point keeps the
/// test point selected; the threshold is the usual rank over
/// {v(X_i, Y_i) : i in R_J} U {+inf} with |R_J| + 1 reference members.
///
/// Throws ConfigError for label-dependent rules and PreconditionError when the
/// observed point is not selected or the rule fails the symmetry check (20
/// random reorderings of the labeled prefix, on the observed and every swapped
/// data set).
PredictionSetDescriptor jomi_set_symmetric(const DataSequence& seq, const SelectionRule& rule,
                                           const LastPointScore& score, double alpha, std::uint64_t check_seed = 0);

/// Multi-test form: swaps calibration point i with test point j, other tests
/// held fixed. The symmetry check reorders the calibration block.
PredictionSetDescriptor jomi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const LastPointScore& score,
                                            double alpha, std::uint64_t check_seed = 0);

}  // namespace pemi

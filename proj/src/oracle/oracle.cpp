#include "pemi/oracle.hpp"

#include <iostream>

#include "pemi/errors.hpp"
#include "pemi/fast.hpp"
#include "pemi/random.hpp"

namespace pemi {

FullEnumeration::FullEnumeration(std::size_t n, long first_index, std::size_t limit) : n_(n), first_(first_index) {
  if (n == 0) throw DomainError("cannot enumerate permutations of an empty range");
  if (n > limit)
    throw PreconditionError("full enumeration of " + std::to_string(n) + " slots exceeds the limit of " +
                            std::to_string(limit));
  if (limit > kDefaultLimit && n > kDefaultLimit)
    std::cerr << "warning: enumerating " << n << "! permutations\n";
}

std::size_t FullEnumeration::count() const {
  std::size_t c = 1;
  for (std::size_t k = 2; k <= n_; ++k) c *= k;
  return c;
}

PermutationSample FullEnumeration::sample(bool include_identity) const {
  std::vector<Permutation> perms;
  perms.reserve(count());
  for_each([&](std::span<const std::uint32_t> image) {
    if (!include_identity && std::is_sorted(image.begin(), image.end())) return;
    perms.emplace_back(std::vector<std::uint32_t>(image.begin(), image.end()), first_);
  });
  return PermutationSample::from(perms, n_, first_);
}

namespace {

PermutationSample all_but_identity(const DataSequence& seq, std::size_t limit) {
  return FullEnumeration(seq.size(), seq.first_index(), limit).sample(false);
}

}  // namespace

PemiPValue full_pemi_pvalue(double y, const DataSequence& seq, const SelectionRule& rule,
                            const ConformityScore& score, std::size_t limit) {
  return pemi_pvalue(y, seq, rule, score, all_but_identity(seq, limit), Execution::serial);
}

PemiPValue full_pemi_pvalue_randomized(double y, const DataSequence& seq, const SelectionRule& rule,
                                       const ConformityScore& score, double u, std::size_t limit) {
  return pemi_pvalue_randomized(y, seq, rule, score, all_but_identity(seq, limit), u, Execution::serial);
}

double permutation_fcp_pvalue(double y, const DataSequence& seq, const ConformityScore& score, std::size_t limit) {
  const FullEnumeration all(seq.size(), seq.first_index(), limit);
  const double s0 = score(SequenceView(seq, y).with_last_labeled());
  std::size_t hits = 0;
  all.for_each([&](std::span<const std::uint32_t> image) {
    hits += score(SequenceView(seq, image, y).with_last_labeled()) >= s0;
  });
  return static_cast<double>(hits) / static_cast<double>(all.count());
}

namespace {

constexpr int kSymmetryChecks = 20;

// Slot order that exchanges slots a and b.
std::vector<std::uint32_t> swapped(std::size_t n, std::size_t a, std::size_t b) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::swap(order[a], order[b]);
  return order;
}

// Reorders the first `block` entries of `order` at random, checking that
// `selects` agrees with its value on `order`.
template <class Selects>
void check_symmetry(std::vector<std::uint32_t> order, std::size_t block, std::uint64_t seed, std::uint64_t key,
                    Selects selects) {
  const bool base = selects(order);
  std::vector<std::uint32_t> shuffle(block), reordered = order;
  for (int r = 0; r < kSymmetryChecks; ++r) {
    shuffle_identity(shuffle, derive_seed(seed, {key, static_cast<std::uint64_t>(r)}));
    for (std::size_t p = 0; p < block; ++p) reordered[p] = order[shuffle[p]];
    if (selects(reordered) != base)
      throw PreconditionError("selection rule is not symmetric in the labeled data");
  }
}

PredictionSetDescriptor swap_threshold(const std::vector<double>& kept_scores, double alpha) {
  CovariateSets sets;
  sets.ref_size = kept_scores.size() + 1;
  sets.scores_B = kept_scores;
  return Threshold{covariate_threshold(sets, alpha)};
}

}  // namespace

PredictionSetDescriptor jomi_set_symmetric(const DataSequence& seq, const SelectionRule& rule,
                                           const LastPointScore& score, double alpha, std::uint64_t check_seed) {
  if (!rule.capabilities().covariate_only)
    throw ConfigError("the swap construction needs a covariate-only rule (" + rule.name() + ")");
  const std::size_t n = seq.size(), test = seq.test_slot();
  const auto selects = [&](const std::vector<std::uint32_t>& order) {
    return rule.select(SequenceView(seq, order));
  };
  if (!selects(swapped(n, test, test))) throw PreconditionError("the observed data point is not selected");

  std::vector<double> kept;
  for (std::size_t i = 0; i <= test; ++i) {
    const auto order = swapped(n, i, test);
    check_symmetry(order, test, check_seed, i, selects);
    if (i != test && selects(order)) kept.push_back(score.score(seq.x(i), seq.y(i)));
  }
  return swap_threshold(kept, alpha);
}

PredictionSetDescriptor jomi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const LastPointScore& score,
                                            double alpha, std::uint64_t check_seed) {
  if (!rule.capabilities().covariate_only)
    throw ConfigError("the swap construction needs a covariate-only rule (" + rule.name() + ")");
  if (j >= data.tests.size()) throw PreconditionError("test index out of range");
  const DataSequence seq = data.with_test(j);
  const std::size_t n = seq.size(), test = seq.test_slot();
  const auto selects = [&](const std::vector<std::uint32_t>& order) {
    return rule.selects(MultiTestView{SequenceView(seq, order), data.tests, j}, j);
  };
  if (!selects(swapped(n, test, test))) throw PreconditionError("test point is not selected on the observed data");

  std::vector<double> kept;
  for (std::size_t i = 0; i <= test; ++i) {
    const auto order = swapped(n, i, test);
    check_symmetry(order, test, check_seed, i, selects);
    if (i != test && selects(order)) kept.push_back(score.score(seq.x(i), seq.y(i)));
  }
  return swap_threshold(kept, alpha);
}

}  // namespace pemi

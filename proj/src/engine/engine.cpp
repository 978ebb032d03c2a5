#include "pemi/engine.hpp"

#include <algorithm>

#include "pemi/errors.hpp"

namespace pemi {
namespace {

void check_domain(const DataSequence& seq, const PermutationSample& perms) {
  if (perms.domain_size() != seq.size() || perms.first_index() != seq.first_index())
    throw DomainError("permutations do not cover the sequence's index range");
}

void check_u(double u) {
  if (!(u >= 0 && u <= 1)) throw DomainError("tie-breaking uniform must lie in [0, 1]");
}

// Indices of the sampled permutations whose view passes `keep`.
template <class Keep>
ReferenceSet collect(const DataSequence& seq, const PermutationSample& perms, double y, Execution exec, Keep keep) {
  check_domain(seq, perms);
  std::vector<std::uint8_t> in(perms.size(), 0);
  for_each_index(perms.size(), exec, [&](std::size_t i) { in[i] = keep(SequenceView(seq, perms.image(i), y)); });
  ReferenceSet r;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) r.members.push_back(static_cast<std::uint32_t>(i));
  return r;
}

// Counts, over the reference set, scores above and equal to the identity's.
template <class Keep>
PemiPValue count_pvalue(double y, const DataSequence& seq, const ConformityScore& score,
                        const PermutationSample& perms, double u, Execution exec, Keep keep) {
  check_domain(seq, perms);
  const double s0 = score(SequenceView(seq, y).with_last_labeled());
  // -1: outside the reference set; 0: below; 1: tie; 2: above.
  std::vector<std::int8_t> cmp(perms.size(), -1);
  for_each_index(perms.size(), exec, [&](std::size_t i) {
    const SequenceView v(seq, perms.image(i), y);
    if (!keep(v)) return;
    const double s = score(v.with_last_labeled());
    cmp[i] = s > s0 ? 2 : (s == s0 ? 1 : 0);
  });
  PemiPValue p;  // the identity: a member tied with itself
  for (auto c : cmp) {
    if (c < 0) continue;
    ++p.ref_size;
    if (c == 2) ++p.strict;
    if (c == 1) ++p.ties;
  }
  p.u = u;
  p.value = pvalue_numerator(p.strict, p.ties, u) / static_cast<double>(p.ref_size);
  return p;
}

auto plain_keep(const SelectionRule& rule) {
  return [&rule](const SequenceView& v) { return rule.select(v); };
}

auto taxonomy_keep(const SelectionRule& rule, const SelectionTaxonomy& taxonomy) {
  return [&rule, &taxonomy](const SequenceView& v) {
    if (taxonomy.is_all()) return rule.select(v);
    const Trajectory tr = rule.trajectory(v);
    return tr.back() != 0 && taxonomy.contains(tr);
  };
}

}  // namespace

ReferenceSet reference_set(double y, const DataSequence& seq, const SelectionRule& rule,
                           const PermutationSample& perms, Execution exec) {
  return collect(seq, perms, y, exec, plain_keep(rule));
}

ReferenceSet reference_set(double y, const DataSequence& seq, const SelectionRule& rule,
                           const SelectionTaxonomy& taxonomy, const PermutationSample& perms, Execution exec) {
  return collect(seq, perms, y, exec, taxonomy_keep(rule, taxonomy));
}

PemiPValue pemi_pvalue(double y, const DataSequence& seq, const SelectionRule& rule, const ConformityScore& score,
                       const PermutationSample& perms, Execution exec) {
  return count_pvalue(y, seq, score, perms, 1.0, exec, plain_keep(rule));
}

PemiPValue pemi_pvalue_randomized(double y, const DataSequence& seq, const SelectionRule& rule,
                                  const ConformityScore& score, const PermutationSample& perms, double u,
                                  Execution exec) {
  check_u(u);
  return count_pvalue(y, seq, score, perms, u, exec, plain_keep(rule));
}

PemiPValue pemi_pvalue_offline(double y, const DataSequence& seq, const SelectionRule& rule,
                               const ConformityScore& score, const PermutationSample& perms, Execution exec) {
  if (perms.first_index() != seq.first_index())
    throw DomainError("offline PEMI needs permutations over the extended index range");
  return pemi_pvalue(y, seq, rule, score, perms, exec);
}

PemiPValue pemi_pvalue_taxonomy(double y, const DataSequence& seq, const SelectionRule& rule,
                                const SelectionTaxonomy& taxonomy, const ConformityScore& score,
                                const PermutationSample& perms, std::optional<double> u, Execution exec) {
  if (u) check_u(*u);
  return count_pvalue(y, seq, score, perms, u.value_or(1.0), exec, taxonomy_keep(rule, taxonomy));
}

PredictionSetDescriptor pemi_set_finite(std::span<const double> labels, const DataSequence& seq,
                                        const SelectionRule& rule, const ConformityScore& score,
                                        const PermutationSample& perms, double alpha, std::optional<double> u,
                                        Execution exec) {
  if (labels.empty()) throw PreconditionError("label set must be non-empty");
  FiniteLabels out;
  for (double y : labels) {
    const auto p = u ? pemi_pvalue_randomized(y, seq, rule, score, perms, *u, exec)
                     : pemi_pvalue(y, seq, rule, score, perms, exec);
    if (p.value > alpha) out.labels.push_back(y);
  }
  return out;
}

std::vector<std::uint8_t> pemi_set_grid(std::span<const double> grid, const DataSequence& seq,
                                        const SelectionRule& rule, const ConformityScore& score,
                                        const PermutationSample& perms, double alpha, std::optional<double> u,
                                        Execution exec) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("label grid must be sorted");
  std::vector<std::uint8_t> mask(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto p = u ? pemi_pvalue_randomized(grid[g], seq, rule, score, perms, *u, exec)
                     : pemi_pvalue(grid[g], seq, rule, score, perms, exec);
    mask[g] = p.value > alpha;
  }
  return mask;
}

// ---- multiple test points -------------------------------------------------

namespace {

void check_selected(const MultiTestData& data, std::size_t j, const MultiSelectionRule& rule) {
  if (j >= data.tests.size()) throw PreconditionError("test index out of range");
  const auto sel = rule.selected(data);
  if (std::find(sel.begin(), sel.end(), j) == sel.end())
    throw PreconditionError("test point is not selected on the observed data");
}

}  // namespace

PemiPValue pemi_pvalue_multi_test(double y, const MultiTestData& data, std::size_t j,
                                  const MultiSelectionRule& rule, const ConformityScore& score,
                                  const PermutationSample& perms, std::optional<double> u, Execution exec) {
  check_selected(data, j, rule);
  if (u) check_u(*u);
  const DataSequence seq = data.with_test(j);
  return count_pvalue(y, seq, score, perms, u.value_or(1.0), exec, [&](const SequenceView& v) {
    return rule.selects(MultiTestView{v, data.tests, j}, j);
  });
}

PredictionSetDescriptor pemi_set_multi_test(const MultiTestData& data, std::size_t j,
                                            const MultiSelectionRule& rule, const ConformityScore& score,
                                            const PermutationSample& perms, double alpha,
                                            std::span<const double> candidate_labels, Execution exec) {
  FiniteLabels out;
  for (double y : candidate_labels)
    if (pemi_pvalue_multi_test(y, data, j, rule, score, perms, std::nullopt, exec).value > alpha)
      out.labels.push_back(y);
  return out;
}

}  // namespace pemi

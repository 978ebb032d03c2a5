#pragma once

// Shared by the closed-form paths: splits a y-independent reference set into
// the identity-like part and B.

#include "pemi/errors.hpp"
#include "pemi/fast.hpp"

namespace pemi::detail {

inline void check_domain(const DataSequence& seq, const PermutationSample& perms) {
  if (perms.domain_size() != seq.size() || perms.first_index() != seq.first_index())
    throw DomainError("permutations do not cover the sequence's index range");
}

/// Per-permutation outcome of one regime: -1 outside R, 0 pi(t) = t, 1 in B.
struct Membership {
  std::vector<std::int8_t> state;
  std::vector<double> score;  // v(X_pi(t), Y_pi(t)) for B members

  explicit Membership(std::size_t M) : state(M, -1), score(M, 0.0) {}

  CovariateSets fold() const {
    CovariateSets out;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i] < 0) continue;
      ++out.ref_size;
      if (state[i] == 1) out.scores_B.push_back(score[i]);
    }
    return out;
  }
};

/// Evaluates keep(view) on every sampled permutation with no imputed label.
template <class Keep>
CovariateSets split_reference(const DataSequence& seq, const LastPointScore& v, const PermutationSample& perms,
                              Execution exec, Keep keep) {
  check_domain(seq, perms);
  Membership m(perms.size());
  const std::size_t test = seq.test_slot();
  for_each_index(perms.size(), exec, [&](std::size_t i) {
    const auto img = perms.image(i);
    const SequenceView view(seq, img);
    if (!keep(view)) return;
    const std::size_t s = img[view.last()];
    m.state[i] = s == test ? 0 : 1;
    if (s != test) m.score[i] = v.score(seq.x(s), seq.y(s));
  });
  return m.fold();
}

}  // namespace pemi::detail

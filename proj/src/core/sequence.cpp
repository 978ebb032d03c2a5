#include "pemi/sequence.hpp"

#include <cmath>
#include <string>

#include "pemi/errors.hpp"
#include "pemi/permutation.hpp"

namespace pemi {

DataSequence::DataSequence(std::vector<LabeledPoint> labeled, Features test_x, std::optional<double> test_cutoff)
    : points_(std::move(labeled)) {
  points_.push_back({std::move(test_x), SequenceView::kNoLabel, test_cutoff});
  validate();
}

DataSequence DataSequence::with_offline(std::vector<LabeledPoint> offline, std::vector<LabeledPoint> labeled,
                                        Features test_x, std::optional<double> test_cutoff) {
  DataSequence seq;
  seq.n_offline_ = offline.size();
  seq.points_ = std::move(offline);
  seq.points_.reserve(seq.points_.size() + labeled.size() + 1);
  for (auto& p : labeled) seq.points_.push_back(std::move(p));
  seq.points_.push_back({std::move(test_x), SequenceView::kNoLabel, test_cutoff});
  seq.validate();
  return seq;
}

bool DataSequence::has_cutoffs() const {
  for (const auto& p : points_)
    if (!p.cutoff) return false;
  return true;
}

void DataSequence::validate() const {
  const std::size_t d = points_.back().x.size();
  for (std::size_t s = 0; s < points_.size(); ++s) {
    if (points_[s].x.size() != d)
      throw DomainError("feature dimension mismatch at slot " + std::to_string(s));
    if (s != test_slot() && !std::isfinite(points_[s].y))
      throw DomainError("non-finite label at slot " + std::to_string(s));
  }
}

PermutedSequence permute_with_imputation(const DataSequence& seq, const Permutation& pi, double y) {
  if (pi.size() != seq.size() || pi.first_index() != seq.first_index())
    throw DomainError("permutation domain does not match the sequence's index range");
  const SequenceView view(seq, pi.image(), y);
  PermutedSequence out;
  out.prefix.reserve(view.last());
  for (std::size_t p = 0; p < view.last(); ++p) {
    const auto x = view.x(p);
    out.prefix.push_back({Features(x.begin(), x.end()), view.y(p), view.cutoff(p)});
  }
  const auto fx = view.x(view.last());
  out.final_x.assign(fx.begin(), fx.end());
  out.final_cutoff = view.cutoff(view.last());
  out.final_source = view.source(view.last());
  return out;
}

}  // namespace pemi

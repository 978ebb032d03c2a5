#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace pemi {

using Features = std::vector<double>;

/// One observation Z_i = (X_i, Y_i). `cutoff` is the per-point threshold c_i
/// used by conformal selection rules; other rules ignore it.
struct LabeledPoint {
  Features x;
  double y = 0.0;
  std::optional<double> cutoff;
};

/// The data available at online time t: an optional offline block
/// (indices -n_off+1..0), the labeled online history (1..t-1) and the test
/// covariates X_t (index t).
///
/// Internally every point occupies a 0-based slot; slot s holds time index
/// s - n_off + 1 and the test point is always the last slot.
class DataSequence {
 public:
  DataSequence(std::vector<LabeledPoint> labeled, Features test_x, std::optional<double> test_cutoff = {});

  static DataSequence with_offline(std::vector<LabeledPoint> offline, std::vector<LabeledPoint> labeled,
                                   Features test_x, std::optional<double> test_cutoff = {});

  /// Online time index of the test point.
  std::size_t t() const { return points_.size() - n_offline_; }
  std::size_t offline_size() const { return n_offline_; }
  std::size_t size() const { return points_.size(); }
  std::size_t test_slot() const { return points_.size() - 1; }
  long first_index() const { return 1 - static_cast<long>(n_offline_); }
  std::size_t dim() const { return points_.back().x.size(); }

  std::span<const double> x(std::size_t slot) const { return points_[slot].x; }
  /// Label of a labeled slot. The test slot has no label.
  double y(std::size_t slot) const {
    assert(slot != test_slot());
    return points_[slot].y;
  }
  const std::optional<double>& cutoff(std::size_t slot) const { return points_[slot].cutoff; }
  bool has_cutoffs() const;

  std::span<const LabeledPoint> offline() const { return {points_.data(), n_offline_}; }
  std::span<const LabeledPoint> labeled() const { return {points_.data() + n_offline_, t() - 1}; }
  std::span<const double> test_x() const { return points_.back().x; }
  const std::optional<double>& test_cutoff() const { return points_.back().cutoff; }

 private:
  DataSequence() = default;
  void validate() const;

  std::vector<LabeledPoint> points_;
  std::size_t n_offline_ = 0;
};

/// Read-only view of a permuted, label-imputed data sequence
///   (Z^y_{pi(1)}, ..., Z^y_{pi(t-1)}, X_{pi(t)})
/// without copying any point. Position p reads slot order[p]; whichever
/// position holds the test slot reports the imputed label y. The last position
/// exposes covariates only, unless the view was made with with_last_labeled()
/// (conformity scores see the full sequence).
///
/// A view may also be a prefix (fewer online positions), which is how
/// selection trajectories are evaluated.
class SequenceView {
 public:
  explicit SequenceView(const DataSequence& seq, double imputed_y = kNoLabel)
      : seq_(&seq), imputed_y_(imputed_y), length_(seq.size()) {}

  SequenceView(const DataSequence& seq, std::span<const std::uint32_t> order, double imputed_y = kNoLabel)
      : seq_(&seq), order_(order), imputed_y_(imputed_y), length_(seq.size()) {
    assert(order.empty() || order.size() == seq.size());
  }

  /// Offline block plus the first `online_steps` online positions.
  SequenceView prefix(std::size_t online_steps) const {
    assert(online_steps >= 1 && online_steps <= seq_->t());
    SequenceView v = *this;
    v.length_ = seq_->offline_size() + online_steps;
    v.last_labeled_ = false;
    return v;
  }

  SequenceView with_last_labeled() const {
    SequenceView v = *this;
    v.last_labeled_ = true;
    return v;
  }

  std::size_t size() const { return length_; }
  std::size_t offline_size() const { return seq_->offline_size(); }
  /// Online time index of the last position.
  std::size_t t() const { return length_ - seq_->offline_size(); }
  std::size_t last() const { return length_ - 1; }
  bool last_labeled() const { return last_labeled_; }
  const DataSequence& data() const { return *seq_; }
  double imputed_y() const { return imputed_y_; }

  std::size_t source(std::size_t pos) const { return order_.empty() ? pos : order_[pos]; }
  bool is_imputed(std::size_t pos) const { return source(pos) == seq_->test_slot(); }

  std::span<const double> x(std::size_t pos) const { return seq_->x(source(pos)); }
  double y(std::size_t pos) const {
    assert(pos < last() || last_labeled_);
    const std::size_t s = source(pos);
    return s == seq_->test_slot() ? imputed_y_ : seq_->y(s);
  }
  const std::optional<double>& cutoff(std::size_t pos) const { return seq_->cutoff(source(pos)); }

  static constexpr double kNoLabel = std::numeric_limits<double>::quiet_NaN();

 private:
  const DataSequence* seq_;
  std::span<const std::uint32_t> order_;
  double imputed_y_;
  std::size_t length_;
  bool last_labeled_ = false;
};

/// Materialised form of a SequenceView over a full permutation.
struct PermutedSequence {
  std::vector<LabeledPoint> prefix;  // positions -n_off+1 .. t-1
  Features final_x;
  std::optional<double> final_cutoff;
  std::size_t final_source = 0;  // slot whose covariates occupy the last position
};

class Permutation;

/// Applies pi to the sequence with the test label imputed as y.
PermutedSequence permute_with_imputation(const DataSequence& seq, const Permutation& pi, double y);

}  // namespace pemi

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pemi/sequence.hpp"

namespace pemi {

using Trajectory = std::vector<std::uint8_t>;

/// What a rule reads. Fast paths dispatch on these tags, so they must be
/// honest: a covariate_only rule never looks at a label, a cutoff_binary rule
/// sees labels only through 1{y_i <= c_i}.
struct RuleCapabilities {
  bool covariate_only = false;
  bool cutoff_binary = false;
};

/// An online selection rule S_t: (Z_1, ..., Z_{t-1}, X_t) -> {0, 1}, one
/// object for every t. Rules are evaluated on (possibly permuted) views and
/// must be pure.
class SelectionRule {
 public:
  virtual ~SelectionRule() = default;

  /// Decision for the last position of the view.
  virtual bool select(const SequenceView& view) const = 0;

  /// (s_1, ..., s_t), s_i evaluated on the length-i online prefix. The default
  /// re-evaluates every prefix; rules with a running state override it.
  virtual Trajectory trajectory(const SequenceView& view) const;

  virtual RuleCapabilities capabilities() const { return {}; }
  virtual std::string name() const = 0;
};

using RulePtr = std::shared_ptr<const SelectionRule>;

inline bool evaluate_rule(const SelectionRule& rule, const SequenceView& view) { return rule.select(view); }
inline Trajectory evaluate_trajectory(const SelectionRule& rule, const SequenceView& view) {
  return rule.trajectory(view);
}

/// Weight attached to time position i when the current time is t.
class PositionWeights {
 public:
  static PositionWeights equal() { return PositionWeights(Kind::equal, 1.0, {}); }
  /// w(i, t) = rho^(t - i).
  static PositionWeights geometric(double rho);
  static PositionWeights custom(std::function<double(long i, long t)> fn) {
    return PositionWeights(Kind::custom, 1.0, std::move(fn));
  }

  double operator()(long i, long t) const;
  /// out[k] = w(first + k, t).
  void fill(std::span<double> out, long first, long t) const;

 private:
  enum class Kind { equal, geometric, custom };
  PositionWeights(Kind k, double rho, std::function<double(long, long)> fn)
      : kind_(k), rho_(rho), fn_(std::move(fn)) {}

  Kind kind_;
  double rho_;
  std::function<double(long, long)> fn_;
};

/// A family of admissible selection trajectories.
class SelectionTaxonomy {
 public:
  static SelectionTaxonomy all();
  static SelectionTaxonomy singleton(Trajectory observed);
  static SelectionTaxonomy predicate(std::function<bool(std::span<const std::uint8_t>)> member);

  bool contains(std::span<const std::uint8_t> trajectory) const;
  bool is_all() const { return all_; }

 private:
  SelectionTaxonomy() = default;
  bool all_ = false;
  std::function<bool(std::span<const std::uint8_t>)> member_;
};

/// Always returns the same decision.
class ConstantRule final : public SelectionRule {
 public:
  explicit ConstantRule(bool decision = true) : decision_(decision) {}
  bool select(const SequenceView&) const override { return decision_; }
  Trajectory trajectory(const SequenceView& view) const override { return Trajectory(view.t(), decision_); }
  RuleCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return decision_ ? "always" : "never"; }

 private:
  bool decision_;
};

}  // namespace pemi

#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

namespace pemi {

/// A real number or one of the two infinities. Quantiles over score multisets
/// augmented with +inf return this; -inf only arises as the bound of an empty
/// randomized prediction set.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }
  static constexpr ExtendedReal negative_infinity() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  constexpr double value() const { return value_; }
  bool is_infinite() const { return std::isinf(value_); }
  bool is_pos_infinity() const { return std::isinf(value_) && value_ > 0; }
  bool is_finite() const { return std::isfinite(value_); }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }
  friend constexpr std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, ExtendedReal e) {
    if (e.is_infinite()) return os << (e.value_ > 0 ? "inf" : "-inf");
    return os << e.value_;
  }

 private:
  double value_ = 0.0;
};

}  // namespace pemi

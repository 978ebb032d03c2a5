#include "pemi/rule.hpp"

#include <algorithm>
#include <cmath>

#include "pemi/errors.hpp"

namespace pemi {

Trajectory SelectionRule::trajectory(const SequenceView& view) const {
  Trajectory out(view.t());
  for (std::size_t i = 1; i <= view.t(); ++i) out[i - 1] = select(view.prefix(i)) ? 1 : 0;
  return out;
}

PositionWeights PositionWeights::geometric(double rho) {
  if (!(rho > 0)) throw ConfigError("geometric weight ratio must be positive");
  return PositionWeights(Kind::geometric, rho, {});
}

double PositionWeights::operator()(long i, long t) const {
  switch (kind_) {
    case Kind::equal:
      return 1.0;
    case Kind::geometric:
      return std::pow(rho_, static_cast<double>(t - i));
    case Kind::custom:
      return fn_(i, t);
  }
  return 1.0;
}

void PositionWeights::fill(std::span<double> out, long first, long t) const {
  if (kind_ == Kind::geometric) {
    // Built from the newest position backwards by repeated multiplication;
    // exact for power-of-two ratios.
    double w = std::pow(rho_, static_cast<double>(t - (first + static_cast<long>(out.size()) - 1)));
    for (std::size_t k = out.size(); k-- > 0;) {
      out[k] = w;
      w *= rho_;
    }
    return;
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*this)(first + static_cast<long>(k), t);
}

SelectionTaxonomy SelectionTaxonomy::all() {
  SelectionTaxonomy s;
  s.all_ = true;
  return s;
}

SelectionTaxonomy SelectionTaxonomy::singleton(Trajectory observed) {
  SelectionTaxonomy s;
  s.member_ = [obs = std::move(observed)](std::span<const std::uint8_t> tr) {
    return std::equal(tr.begin(), tr.end(), obs.begin(), obs.end());
  };
  return s;
}

SelectionTaxonomy SelectionTaxonomy::predicate(std::function<bool(std::span<const std::uint8_t>)> member) {
  SelectionTaxonomy s;
  s.member_ = std::move(member);
  return s;
}

bool SelectionTaxonomy::contains(std::span<const std::uint8_t> trajectory) const {
  return all_ || member_(trajectory);
}

}  // namespace pemi

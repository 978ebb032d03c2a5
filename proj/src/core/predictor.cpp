#include "pemi/predictor.hpp"

#include "pemi/errors.hpp"

namespace pemi {

double LinearPredictor::operator()(std::span<const double> x) const {
  if (x.size() != coef_.size()) throw ConfigError("linear predictor dimension mismatch");
  double s = intercept_;
  for (std::size_t j = 0; j < coef_.size(); ++j) s += coef_[j] * x[j];
  return s;
}

}  // namespace pemi

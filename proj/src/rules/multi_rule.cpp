#include "pemi/multi_rule.hpp"

#include "pemi/errors.hpp"
#include "pemi/quantile.hpp"

namespace pemi {

std::vector<std::size_t> MultiSelectionRule::selected(const MultiTestView& view) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < view.m(); ++k)
    if (selects(view, k)) out.push_back(k);
  return out;
}

std::vector<std::size_t> MultiSelectionRule::selected(const MultiTestData& data) const {
  if (data.tests.empty()) return {};
  const DataSequence seq = data.with_test(0);
  const SequenceView view(seq);
  return selected(MultiTestView{view, data.tests, 0});
}

TopKRule::TopKRule(PredictorPtr mu, std::size_t K, double gate_q, PositionWeights calib_weights)
    : mu_(std::move(mu)), K_(K), gate_q_(gate_q), weights_(std::move(calib_weights)) {
  if (K == 0) throw ConfigError("top-K rule needs K >= 1");
  if (!(gate_q >= 0 && gate_q < 1)) throw ConfigError("gate level must lie in [0, 1)");
}

bool TopKRule::selects(const MultiTestView& view, std::size_t k) const {
  const double mk = (*mu_)(view.test_x(k));
  std::size_t above = 0;
  for (std::size_t l = 0; l < view.m(); ++l)
    if (l != k && (*mu_)(view.test_x(l)) > mk) ++above;
  if (above >= K_) return false;
  if (gate_q_ == 0.0 || view.n() == 0) return true;
  std::vector<double> calib(view.n()), w(view.n());
  for (std::size_t p = 0; p < view.n(); ++p) calib[p] = (*mu_)(view.calib.x(p));
  weights_.fill(w, 1, static_cast<long>(view.n()) + 1);
  return mk >= weighted_quantile(1 - gate_q_, calib, w);
}

}  // namespace pemi

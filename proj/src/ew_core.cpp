#include "udnmob/ew_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace udnmob {

double gamma_anytime(std::size_t round, std::size_t n) {
  if (round == 0) throw std::domain_error("gamma_anytime: round index starts at 1");
  if (n == 0) throw std::domain_error("gamma_anytime: N must be positive");
  if (n == 1) return 0.0;
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * std::log(nd) / (static_cast<double>(round) * nd));
}

GammaSchedule GammaSchedule::constant(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("constant gamma must be positive and finite");
  }
  return GammaSchedule(Kind::kConstant, 0, gamma);
}

double GammaSchedule::operator()(std::size_t round) const {
  return kind_ == Kind::kConstant ? value_ : gamma_anytime(round, n_);
}

std::vector<double> softmin_probabilities(std::span<const double> cum_est_loss, double gamma) {
  if (cum_est_loss.empty()) throw std::domain_error("softmin over empty vector");
  if (!std::isfinite(gamma) || gamma < 0.0) throw std::domain_error("softmin: bad gamma");
  double lo = cum_est_loss.front();
  for (double x : cum_est_loss) {
    if (!std::isfinite(x)) throw std::domain_error("softmin: non-finite cumulative loss");
    lo = std::min(lo, x);
  }
  std::vector<double> p(cum_est_loss.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-gamma * (cum_est_loss[i] - lo));
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

double log_sum_exp_neg(std::span<const double> x, double gamma) {
  if (x.empty()) throw std::domain_error("log_sum_exp over empty vector");
  const double lo = *std::min_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(-gamma * (v - lo));
  return -gamma * lo + std::log(s);
}

std::vector<double> importance_estimate(double observed_mean_loss, double p_selected,
                                        SbsId selected, std::size_t n) {
  if (!(p_selected > 0.0 && p_selected <= 1.0)) {
    throw std::domain_error("importance_estimate: selection probability must be in (0,1]");
  }
  if (selected >= n) throw std::domain_error("importance_estimate: arm out of range");
  if (!std::isfinite(observed_mean_loss) || observed_mean_loss < 0.0) {
    throw std::domain_error("importance_estimate: observed loss must be finite and >= 0");
  }
  std::vector<double> est(n, 0.0);
  est[selected] = observed_mean_loss / p_selected;
  return est;
}

std::vector<double> softmin_probabilities(const WeightState& state) {
  if (state.rounds == 0) {
    return std::vector<double>(state.size(), 1.0 / static_cast<double>(state.size()));
  }
  return softmin_probabilities(state.cum_est_loss, state.gamma(state.rounds));
}

void accumulate(WeightState& state, std::span<const double> estimate) {
  if (estimate.size() != state.size()) throw std::domain_error("estimate size mismatch");
  for (std::size_t i = 0; i < estimate.size(); ++i) state.cum_est_loss[i] += estimate[i];
  ++state.rounds;
}

}  // namespace udnmob

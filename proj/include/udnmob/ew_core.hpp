#pragma once

// Exponential weighting over a finite set of arms or experts.
//
//   p_a = exp(-gamma * L_a) / sum_b exp(-gamma * L_b)
//
// computed after subtracting min_b L_b so that long runs (L grows linearly
// in rounds) never underflow. Losses are estimated by importance weighting:
// only the played arm receives observed / p_played, which is unbiased for
// the full loss vector.

#include <cstddef>
#include <span>
#include <vector>

#include "udnmob/core.hpp"

namespace udnmob {

/// sqrt(2 ln N / (l N)); zero for N = 1.
double gamma_anytime(std::size_t round, std::size_t n);

/// Learning-rate schedule gamma_l, non-increasing in l.
class GammaSchedule {
 public:
  enum class Kind { kAnytime, kConstant };

  static GammaSchedule anytime(std::size_t n) { return GammaSchedule(Kind::kAnytime, n, 0.0); }
  static GammaSchedule constant(double gamma);

  double operator()(std::size_t round) const;
  Kind kind() const noexcept { return kind_; }

 private:
  GammaSchedule(Kind kind, std::size_t n, double value) : kind_(kind), n_(n), value_(value) {}

  Kind kind_;
  std::size_t n_;
  double value_;
};

std::vector<double> softmin_probabilities(std::span<const double> cum_est_loss, double gamma);

/// log sum_i exp(-gamma * x_i), stable.
double log_sum_exp_neg(std::span<const double> x, double gamma);

std::vector<double> importance_estimate(double observed_mean_loss, double p_selected,
                                        SbsId selected, std::size_t n);

struct WeightState {
  std::vector<double> cum_est_loss;
  GammaSchedule gamma;
  /// Number of completed updates; the next round index is rounds + 1.
  std::size_t rounds = 0;

  WeightState(std::size_t n, GammaSchedule schedule)
      : cum_est_loss(n, 0.0), gamma(schedule) {}

  std::size_t size() const noexcept { return cum_est_loss.size(); }
};

/// p(l+1) after l completed rounds, using gamma_l; uniform before the first update.
std::vector<double> softmin_probabilities(const WeightState& state);

/// L_hat += estimate, then advance the round counter.
void accumulate(WeightState& state, std::span<const double> estimate);

}  // namespace udnmob

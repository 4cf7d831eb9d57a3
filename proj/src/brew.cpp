#include "udnmob/brew.hpp"

#include <algorithm>
#include <cmath>

namespace udnmob {

double brew_b_n(std::size_t n) {
  if (n < 2) throw ConfigError("B_N needs N >= 2");
  const double nd = static_cast<double>(n);
  return std::pow(4.5 * nd * std::log(nd), -1.0 / 3.0);
}

std::size_t brew_batch_length(std::size_t n, std::uint64_t horizon) {
  if (horizon == 0) throw ConfigError("horizon must be >= 1");
  const double tau = std::ceil(brew_b_n(n) * std::cbrt(static_cast<double>(horizon)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(tau));
}

BrewConfig BrewConfig::with_auto_tau(std::size_t n, std::uint64_t horizon, double handover_cost) {
  BrewConfig cfg;
  cfg.n = n;
  cfg.horizon = horizon;
  cfg.tau = brew_batch_length(n, horizon);
  cfg.gamma = GammaSchedule::anytime(n);
  cfg.handover_cost = handover_cost;
  return cfg;
}

void BrewConfig::validate() const {
  if (n < 1) throw ConfigError("BREW needs at least one SBS");
  if (tau < 1) throw ConfigError("BREW batch length must be >= 1");
  if (horizon < 1) throw ConfigError("BREW horizon must be >= 1");
  if (!(handover_cost >= 0.0)) throw ConfigError("handover cost must be >= 0");
}

void MissingFeedbackConfig::validate() const {
  if (!(p_miss >= 0.0 && p_miss < 1.0)) throw ConfigError("p_miss must lie in [0,1)");
}

double BatchAccumulator::mean() const {
  if (values_.empty()) throw std::domain_error("mean of an empty batch");
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

BrewState::BrewState(std::size_t n, GammaSchedule schedule)
    : weights(n, schedule), probabilities(n, 1.0 / static_cast<double>(n)) {}

SbsId brew_select(const BrewState& state, bool batch_boundary, std::optional<SbsId> held,
                  RngStream& rng) {
  if (!batch_boundary) {
    if (!held) throw ProtocolError("brew_select: mid-batch call without a held action");
    return *held;
  }
  return rng.categorical(state.probabilities);
}

namespace {

void apply_estimate(BrewState& state, std::span<const double> estimate) {
  accumulate(state.weights, estimate);
  state.probabilities = softmin_probabilities(state.weights);
  ++state.batch;
}

}  // namespace

void brew_end_batch(const BatchAccumulator& acc, BrewState& state) {
  if (acc.observed_count() == 0) throw std::domain_error("brew_end_batch: empty batch");
  const auto est = importance_estimate(acc.mean(), state.probabilities.at(acc.chosen()),
                                       acc.chosen(), state.weights.size());
  apply_estimate(state, est);
}

double binomial_pmf(std::size_t n, std::size_t k, double q) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c * std::pow(q, static_cast<double>(k)) * std::pow(1.0 - q, static_cast<double>(n - k));
}

void brew_missing_end_batch(const BatchAccumulator& acc, const MissingFeedbackConfig& cfg,
                            BrewState& state) {
  cfg.validate();
  const std::size_t n = state.weights.size();
  const std::size_t zeta = acc.observed_count();
  if (zeta == 0) {
    const std::vector<double> zero(n, 0.0);
    apply_estimate(state, zero);
    return;
  }
  const double pattern = binomial_pmf(acc.length(), zeta, 1.0 - cfg.p_miss);
  auto est = importance_estimate(acc.mean(), state.probabilities.at(acc.chosen()),
                                 acc.chosen(), n);
  est[acc.chosen()] /= pattern;
  apply_estimate(state, est);
}

BrewPolicy::BrewPolicy(BrewConfig cfg, std::optional<MissingFeedbackConfig> missing,
                       RngStream rng)
    : cfg_(cfg), missing_(missing), rng_(rng), state_(cfg.n, cfg.gamma) {
  cfg_.validate();
  if (missing_) missing_->validate();
}

void BrewPolicy::close_batch() {
  if (!acc_) return;
  if (missing_) {
    brew_missing_end_batch(*acc_, *missing_, state_);
  } else if (acc_->observed_count() > 0) {
    brew_end_batch(*acc_, state_);
  } else {
    // Everything still in flight (delay >= tau); the round advances with no estimate.
    apply_estimate(state_, std::vector<double>(cfg_.n, 0.0));
  }
  acc_.reset();
}

SbsId BrewPolicy::select(const SlotContext& ctx) {
  const bool boundary = (ctx.t - 1) % cfg_.tau == 0;
  if (boundary) {
    close_batch();
    held_ = brew_select(state_, true, held_, rng_);
    const std::uint64_t start = ctx.t;
    const std::uint64_t remaining = cfg_.horizon >= start ? cfg_.horizon - start + 1 : 1;
    const auto length = static_cast<std::size_t>(std::min<std::uint64_t>(cfg_.tau, remaining));
    acc_.emplace(state_.batch, *held_, length);
  }
  if (ctx.available.contains(*held_)) return *held_;
  // Held SBS switched off: serve from a uniformly drawn active SBS, credit the batch to a(l).
  return rng_.uniform_member(ctx.available);
}

void BrewPolicy::observe(std::span<const FeedbackEvent> events) {
  if (!acc_) return;
  for (const auto& ev : events) acc_->add(ev.observed);
}

void BrewPolicy::finish() { close_batch(); }

}  // namespace udnmob

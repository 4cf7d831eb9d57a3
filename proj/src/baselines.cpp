#include "udnmob/baselines.hpp"

#include <algorithm>
#include <limits>

namespace udnmob {

void MacroConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("macro threshold must lie in (0,1)");
}

void FhoConfig::validate() const {
  macro.validate();
  if (window == 0) throw ConfigError("FHO window must be positive");
  if (max_handover == 0 || max_handover > window) {
    throw ConfigError("FHO max_handover must lie in [1, window]");
  }
  if (freeze_len == 0) throw ConfigError("FHO freeze length must be positive");
}

SbsId best_available(std::span<const double> measurements, SbsSet available) {
  SbsId best = measurements.size();
  double best_value = std::numeric_limits<double>::infinity();
  for (SbsId a = 0; a < measurements.size(); ++a) {
    if (!available.contains(a)) continue;
    if (best == measurements.size() || measurements[a] < best_value) {
      best = a;
      best_value = measurements[a];
    }
  }
  if (best == measurements.size()) throw std::domain_error("no active SBS to measure");
  return best;
}

SbsId macro_step(const MacroConfig& cfg, std::span<const double> measurements,
                 std::optional<SbsId> serving, SbsSet available) {
  if (!serving || !available.contains(*serving)) return best_available(measurements, available);
  if (measurements[*serving] <= cfg.threshold) return *serving;
  return best_available(measurements, available);
}

SbsId macro_step(const MacroConfig& cfg, std::span<const double> measurements, SbsId serving) {
  return macro_step(cfg, measurements, serving, SbsSet::all(measurements.size()));
}

std::size_t FhoHistory::count_in_window(std::uint64_t t, std::size_t window) {
  const std::uint64_t oldest = t > window ? t - window : 0;
  while (!handovers_.empty() && handovers_.front() < oldest) handovers_.pop_front();
  return static_cast<std::size_t>(
      std::count_if(handovers_.begin(), handovers_.end(), [t](std::uint64_t s) { return s < t; }));
}

SbsId fho_step(const FhoConfig& cfg, std::span<const double> measurements,
               std::optional<SbsId> serving, FhoHistory& history, std::uint64_t t,
               SbsSet available) {
  SbsId next;
  if (!serving) {
    next = best_available(measurements, available);
  } else if (!available.contains(*serving)) {
    next = best_available(measurements, available);  // forced; a freeze cannot keep a dead SBS
  } else {
    if (!history.frozen(t) && history.count_in_window(t, cfg.window) >= cfg.max_handover) {
      history.freeze(t, cfg.freeze_len);
    }
    next = history.frozen(t) ? *serving : macro_step(cfg.macro, measurements, serving, available);
  }
  if (serving && next != *serving) history.record_handover(t);
  return next;
}

SbsId extended_macro_step(std::span<const double> measurements, std::optional<SbsId> serving,
                          SbsSet available, double handover_cost) {
  SbsId best = measurements.size();
  double best_value = std::numeric_limits<double>::infinity();
  for (SbsId a = 0; a < measurements.size(); ++a) {
    if (!available.contains(a)) continue;
    const double v = measurements[a] + ((serving && a != *serving) ? handover_cost : 0.0);
    if (best == measurements.size() || v < best_value) {
      best = a;
      best_value = v;
    }
  }
  if (best == measurements.size()) throw std::domain_error("no active SBS to measure");
  return best;
}

double EnergyMatrix::max_value() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double EnergyMatrix::min_value() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

BestFixed genie_best_fixed(const EnergyMatrix& energy) {
  if (energy.arms() == 0) throw std::domain_error("genie over an empty matrix");
  std::vector<double> sums(energy.arms(), 0.0);
  for (std::size_t t = 0; t < energy.slots(); ++t) {
    const auto row = energy.row(t);
    for (SbsId a = 0; a < row.size(); ++a) sums[a] += row[a];
  }
  const auto it = std::min_element(sums.begin(), sums.end());
  return {static_cast<SbsId>(it - sums.begin()), *it};
}

EnergyMatrix appendix_c_sequence(std::size_t n, std::size_t horizon, double threshold,
                                 double e_max) {
  if (n < 2) throw ConfigError("threshold-trap sequence needs N >= 2");
  if (horizon < 3) throw ConfigError("threshold-trap sequence needs T >= 3");
  if (!(threshold > 0.0 && threshold < e_max && e_max <= 1.0)) {
    throw ConfigError("threshold-trap sequence needs 0 < threshold < e_max <= 1");
  }
  EnergyMatrix m(horizon, n, e_max);
  // slot 1: SBS 0 best, both under the threshold
  m.at(0, 0) = 0.25 * threshold;
  m.at(0, 1) = 0.5 * threshold;
  // slot 2: SBS 0 crosses the threshold, SBS 1 is the best neighbour
  m.at(1, 0) = 0.5 * (threshold + e_max);
  m.at(1, 1) = 0.25 * threshold;
  // afterwards: both under the threshold, SBS 0 strictly better
  for (std::size_t t = 2; t < horizon; ++t) {
    m.at(t, 0) = 0.1 * threshold;
    m.at(t, 1) = 0.9 * threshold;
  }
  return m;
}

MacroPolicy::MacroPolicy(MacroConfig cfg) : cfg_(cfg) { cfg_.validate(); }

SbsId MacroPolicy::select(const SlotContext& ctx) {
  return macro_step(cfg_, ctx.measurements, ctx.previous, ctx.available);
}

FhoPolicy::FhoPolicy(FhoConfig cfg) : cfg_(cfg) { cfg_.validate(); }

SbsId FhoPolicy::select(const SlotContext& ctx) {
  return fho_step(cfg_, ctx.measurements, ctx.previous, history_, ctx.t, ctx.available);
}

SbsId ExtendedMacroPolicy::select(const SlotContext& ctx) {
  return extended_macro_step(ctx.measurements, ctx.previous, ctx.available, handover_cost_);
}

SbsId FixedArmPolicy::select(const SlotContext& ctx) {
  if (ctx.available.contains(arm_)) return arm_;
  return ctx.available.nth(0);
}

}  // namespace udnmob

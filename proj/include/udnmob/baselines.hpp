#pragma once

// Measurement-driven handover baselines and offline comparators.
//
// 3GPP-macro serves the best SBS until the serving SBS's metric crosses the
// threshold, then re-measures and hands over to the best one. 3GPP-FHO adds
// a sliding-window handover counter: once max_handover handovers fall inside
// the window, handovers are frozen for freeze_len slots. The extended macro
// used with SBS on/off picks, every slot, the active SBS minimizing
// measurement + E_s * [switch].
//
// Metrics are normalized energies (lower is better). Baselines see the whole
// measurement vector each slot; bandit learners see only their own SBS.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "udnmob/core.hpp"
#include "udnmob/energy_matrix.hpp"
#include "udnmob/policy.hpp"

namespace udnmob {

struct MacroConfig {
  double threshold = 0.10;
  void validate() const;
};

struct FhoConfig {
  MacroConfig macro;
  std::size_t window = 20;
  std::size_t max_handover = 4;
  std::size_t freeze_len = 1;
  void validate() const;
};

/// Index of the smallest measurement among active SBSs (ties to lowest id).
SbsId best_available(std::span<const double> measurements, SbsSet available);

SbsId macro_step(const MacroConfig& cfg, std::span<const double> measurements,
                 std::optional<SbsId> serving, SbsSet available);
/// Overload for an always-on network.
SbsId macro_step(const MacroConfig& cfg, std::span<const double> measurements, SbsId serving);

class FhoHistory {
 public:
  void record_handover(std::uint64_t t) { handovers_.push_back(t); }
  /// Handovers in slots [t - window, t - 1].
  std::size_t count_in_window(std::uint64_t t, std::size_t window);
  bool frozen(std::uint64_t t) const noexcept { return t < frozen_until_; }
  void freeze(std::uint64_t from, std::size_t len) { frozen_until_ = from + len; }

 private:
  std::deque<std::uint64_t> handovers_;
  std::uint64_t frozen_until_ = 0;
};

/// Advances the history: records a handover if the returned SBS differs from serving.
SbsId fho_step(const FhoConfig& cfg, std::span<const double> measurements,
               std::optional<SbsId> serving, FhoHistory& history, std::uint64_t t,
               SbsSet available);

SbsId extended_macro_step(std::span<const double> measurements, std::optional<SbsId> serving,
                          SbsSet available, double handover_cost);

struct BestFixed {
  SbsId arm;
  double energy;
};

/// argmin / min of column sums, ties to the smallest index.
BestFixed genie_best_fixed(const EnergyMatrix& energy);

/// Two-SBS sequence on which the threshold rule locks onto the worse SBS:
/// slot 1 favours SBS 0, slot 2 pushes SBS 0 above the threshold while SBS 1
/// is below it, and from slot 3 on both are below the threshold with SBS 0
/// strictly better. Extra SBSs (N > 2) sit at e_max throughout.
EnergyMatrix appendix_c_sequence(std::size_t n, std::size_t horizon, double threshold,
                                 double e_max);

class MacroPolicy final : public Policy {
 public:
  explicit MacroPolicy(MacroConfig cfg);
  std::string name() const override { return "macro"; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent>) override {}

 private:
  MacroConfig cfg_;
};

class FhoPolicy final : public Policy {
 public:
  explicit FhoPolicy(FhoConfig cfg);
  std::string name() const override { return "fho"; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent>) override {}

 private:
  FhoConfig cfg_;
  FhoHistory history_;
};

class ExtendedMacroPolicy final : public Policy {
 public:
  explicit ExtendedMacroPolicy(double handover_cost) : handover_cost_(handover_cost) {}
  std::string name() const override { return "macro_ext"; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent>) override {}

 private:
  double handover_cost_;
};

/// Always serves one SBS when active, otherwise the lowest active id.
class FixedArmPolicy final : public Policy {
 public:
  explicit FixedArmPolicy(SbsId arm) : arm_(arm) {}
  std::string name() const override { return "fixed"; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent>) override {}

 private:
  SbsId arm_;
};

}  // namespace udnmob

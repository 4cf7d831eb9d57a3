#pragma once

// Slot-level protocol shared by every mobility policy.
//
// Each slot t = 1..T: the harness hands the policy the active SBS set and
// the measurement vector, the policy returns the SBS to serve it, the
// environment charges the slot and routes feedback through its channel, and
// the policy receives whatever feedback events arrive at that slot.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "udnmob/core.hpp"

namespace udnmob {

struct FeedbackEvent {
  std::uint64_t origin_slot = 0;  // slot whose energy is being reported
  SbsId action = 0;               // SBS that served that slot
  double observed = 0.0;          // service + handover charge of that slot, learner units
};

struct SlotContext {
  std::uint64_t t = 1;
  SbsSet available;
  /// Per-SBS measurement available to measurement-driven baselines (lower is better).
  std::span<const double> measurements;
  /// Serving SBS in the previous slot; empty at t = 1.
  std::optional<SbsId> previous;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual SbsId select(const SlotContext& ctx) = 0;
  virtual void observe(std::span<const FeedbackEvent> events) = 0;
  /// Called once after slot T.
  virtual void finish() {}
  /// Random a_0 for learners whose first decision is conditioned on a previous action.
  virtual std::optional<SbsId> initial_context() const { return std::nullopt; }
};

}  // namespace udnmob

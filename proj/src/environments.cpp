#include "udnmob/environments.hpp"

#include <cmath>

namespace udnmob {

std::vector<FeedbackEvent> DelayChannel::deliver(std::uint64_t t) {
  std::vector<FeedbackEvent> out;
  while (!pending_.empty() && pending_.front().origin_slot + delay_ <= t) {
    out.push_back(pending_.front());
    pending_.pop_front();
  }
  return out;
}

MissChannel::MissChannel(double p_miss, RngStream rng) : p_miss_(p_miss), rng_(rng) {
  if (!(p_miss >= 0.0 && p_miss < 1.0)) throw ConfigError("p_miss must lie in [0,1)");
}

void AvailabilityConfig::validate(std::size_t n) const {
  switch (mode) {
    case AvailabilityMode::kAlwaysOn:
      break;
    case AvailabilityMode::kIid:
      if (p_on.size() != n) throw ConfigError("iid availability needs one p_on per SBS");
      for (double p : p_on) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_on must lie in [0,1]");
      }
      {
        bool any = false;
        for (double p : p_on) any = any || p > 0.0;
        if (!any) throw ConfigError("iid availability: every SBS is always off");
      }
      break;
    case AvailabilityMode::kAdaptive:
      if (n < 2) throw ConfigError("adaptive availability needs N >= 2");
      break;
    case AvailabilityMode::kScripted:
      if (script.empty()) throw ConfigError("scripted availability needs at least one slot");
      for (std::size_t i = 0; i < script.size(); ++i) {
        if (script[i].empty()) {
          throw ConfigError("scripted availability: empty active set at slot " +
                            std::to_string(i + 1));
        }
        if ((script[i].bits() & ~SbsSet::all(n).bits()) != 0) {
          throw ConfigError("scripted availability: SBS id out of range");
        }
      }
      break;
  }
}

AvailabilityProcess::AvailabilityProcess(std::size_t n, AvailabilityConfig cfg, RngStream rng)
    : n_(n), cfg_(std::move(cfg)), rng_(rng) {
  cfg_.validate(n_);
  switch (cfg_.mode) {
    case AvailabilityMode::kAlwaysOn:
    case AvailabilityMode::kAdaptive:
      current_ = SbsSet::all(n_);
      break;
    case AvailabilityMode::kIid:
      current_ = draw_iid();
      break;
    case AvailabilityMode::kScripted:
      current_ = cfg_.script.front();
      break;
  }
}

SbsSet AvailabilityProcess::draw_iid() {
  for (;;) {
    SbsSet s;
    for (SbsId a = 0; a < n_; ++a) {
      if (rng_.bernoulli(cfg_.p_on[a])) s.insert(a);
    }
    if (!s.empty()) return s;
  }
}

void AvailabilityProcess::advance(SbsId action) {
  ++t_;
  switch (cfg_.mode) {
    case AvailabilityMode::kAlwaysOn:
      break;
    case AvailabilityMode::kIid:
      current_ = draw_iid();
      break;
    case AvailabilityMode::kAdaptive:
      current_ = SbsSet::all(n_);
      current_.erase(action);
      break;
    case AvailabilityMode::kScripted:
      current_ = cfg_.script[(t_ - 1) % cfg_.script.size()];
      break;
  }
}

Environment::Environment(std::shared_ptr<const EnergyMatrix> energy,
                         std::shared_ptr<const EnergyMatrix> measurement,
                         EnvironmentOptions opts, std::uint64_t seed, std::uint64_t repetition)
    : energy_(std::move(energy)),
      measurement_(measurement ? std::move(measurement) : energy_),
      opts_(std::move(opts)),
      delay_(opts_.delay),
      miss_(opts_.p_miss, RngStream(seed, stream_id_for("feedback_miss", repetition))),
      measurement_miss_(opts_.p_miss, RngStream(seed, stream_id_for("measurement_miss", repetition))),
      availability_(energy_->arms(), opts_.availability,
                    RngStream(seed, stream_id_for("availability", repetition))),
      no_measurement_(energy_->arms(), 0.0) {
  if (measurement_->arms() != energy_->arms() || measurement_->slots() != energy_->slots()) {
    throw ConfigError("measurement matrix shape differs from the energy matrix");
  }
  if (!(opts_.handover_cost >= 0.0)) throw ConfigError("handover cost must be >= 0");
  if (!(opts_.feedback_scale > 0.0)) throw ConfigError("feedback scale must be positive");
  refresh_measurement();
}

void Environment::refresh_measurement() {
  if (t_ <= opts_.delay) return;
  const std::uint64_t origin = t_ - opts_.delay;
  if (origin > energy_->slots()) return;
  if (measurement_miss_.delivered()) measurement_row_ = static_cast<std::size_t>(origin - 1);
}

std::span<const double> Environment::measurements() const {
  if (!measurement_row_) return no_measurement_;
  return measurement_->row(*measurement_row_);
}

StepResult Environment::step(SbsId action) {
  if (t_ > energy_->slots()) throw ProtocolError("step past the horizon");
  if (!availability_.current().contains(action)) {
    throw ProtocolError("action " + std::to_string(action) + " is not an active SBS at slot " +
                        std::to_string(t_));
  }
  StepResult out;
  out.cost.service = NormalizedEnergy(energy_->at(static_cast<std::size_t>(t_ - 1), action));
  out.cost.switched = previous_.has_value() && *previous_ != action;
  out.cost.handover_cost = opts_.handover_cost;

  const FeedbackEvent ev{t_, action, out.cost.total() * opts_.feedback_scale};
  if (miss_.delivered()) delay_.push(ev);
  out.feedback = delay_.deliver(t_);

  availability_.advance(action);
  out.next_available = availability_.current();
  previous_ = action;
  ++t_;
  refresh_measurement();
  return out;
}

}  // namespace udnmob

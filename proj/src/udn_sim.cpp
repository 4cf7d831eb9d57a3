#include "udnmob/udn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace udnmob {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point Bounds::clamp(Point p) const noexcept {
  return {std::clamp(p.x, xmin, xmax), std::clamp(p.y, ymin, ymax)};
}

Layout Layout::ring(std::size_t n, double ring_radius, double house_side) {
  if (n == 0) throw ConfigError("layout needs at least one SBS");
  Layout l;
  l.house_side = house_side;
  l.ring_radius = ring_radius;
  l.sbs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    l.sbs.push_back({ring_radius * std::cos(angle), ring_radius * std::sin(angle)});
    l.sbs_angle.push_back(angle);
  }
  return l;
}

double sbs_distance(const Layout& layout, SbsId a, Point ue) {
  const double r = layout.ring_radius;
  const double rho = std::hypot(ue.x, ue.y);
  if (rho == 0.0) return r;
  const double cos_gap = std::cos(layout.sbs_angle.at(a) - std::atan2(ue.y, ue.x));
  return std::sqrt(std::max(0.0, r * r + rho * rho - 2.0 * r * rho * cos_gap));
}

double pathloss_db(double d_m, double penetration_loss_db, double d0_m) {
  if (!(d_m > d0_m)) throw std::domain_error("pathloss model needs d > d0");
  return 15.3 + 37.6 * std::log10(d_m) + penetration_loss_db;
}

double noise_power_dbm(const RadioParams& params) {
  if (!(params.bandwidth_hz > 0.0)) throw std::domain_error("bandwidth must be positive");
  return params.noise_density_dbm_hz + 10.0 * std::log10(params.bandwidth_hz) +
         params.noise_figure_db;
}

namespace {

double received_dbm(const Layout& layout, const RadioParams& params, Point ue,
                    std::span<const double> shadow_db, SbsId a) {
  const double pl = pathloss_db(sbs_distance(layout, a, ue), params.penetration_loss_db,
                                params.d0_m);
  return params.tx_power_dbm - pl - (shadow_db.empty() ? 0.0 : shadow_db[a]);
}

}  // namespace

double slot_energy(const Layout& layout, const RadioParams& params, Point ue,
                   std::span<const std::size_t> load, std::span<const double> shadow_db, SbsId sbs,
                   bool interference) {
  if (sbs >= layout.sbs.size()) throw std::domain_error("SBS id out of range");
  const double signal_mw = dbm_to_mw(received_dbm(layout, params, ue, shadow_db, sbs));
  double noise_mw = dbm_to_mw(noise_power_dbm(params));
  if (interference) {
    for (SbsId b = 0; b < layout.sbs.size(); ++b) {
      if (b != sbs) noise_mw += dbm_to_mw(received_dbm(layout, params, ue, shadow_db, b));
    }
  }
  const double rate_bps = params.bandwidth_hz * std::log2(1.0 + signal_mw / noise_mw);
  const double airtime_s = params.payload_bits / rate_bps;
  const double power_w = dbm_to_mw(params.tx_power_dbm) * 1e-3;
  const double attached = load.empty() ? 0.0 : static_cast<double>(load[sbs]);
  return airtime_s * power_w * (1.0 + attached / static_cast<double>(params.max_ue_per_sbs));
}

Walker make_walker(const Bounds& bounds, SpeedRange speeds, RngStream& rng) {
  Walker w;
  w.pos = {rng.uniform(bounds.xmin, bounds.xmax), rng.uniform(bounds.ymin, bounds.ymax)};
  w.waypoint = {rng.uniform(bounds.xmin, bounds.xmax), rng.uniform(bounds.ymin, bounds.ymax)};
  w.speed = rng.uniform(speeds.lo, speeds.hi);
  return w;
}

void waypoint_step(Walker& w, const Bounds& bounds, SpeedRange speeds, RngStream& rng) {
  const double dx = w.waypoint.x - w.pos.x;
  const double dy = w.waypoint.y - w.pos.y;
  const double left = std::hypot(dx, dy);
  if (left <= w.speed) {
    if (w.speed <= 0.0 && left > 0.0) return;  // parked short of its waypoint
    w.pos = w.waypoint;
    w.waypoint = {rng.uniform(bounds.xmin, bounds.xmax), rng.uniform(bounds.ymin, bounds.ymax)};
    w.speed = rng.uniform(speeds.lo, speeds.hi);
  } else {
    w.pos = {w.pos.x + dx / left * w.speed, w.pos.y + dy / left * w.speed};
  }
  w.pos = bounds.clamp(w.pos);
}

void UdnConfig::validate() const {
  if (n < 1 || n > SbsSet::kMaxSbs) throw ConfigError("udn: N must lie in [1, 64]");
  if (horizon < 1) throw ConfigError("udn: T must be positive");
  if (!(handover_cost >= 0.0 && handover_cost < 1.0)) throw ConfigError("udn: E_s must lie in [0,1)");
  if (!(target_best_median > 0.0 && target_best_median < 1.0 - handover_cost)) {
    throw ConfigError("udn: target median must lie in (0, 1 - E_s)");
  }
  if (coherence_slots == 0) throw ConfigError("udn: coherence length must be positive");
  if (radio.max_ue_per_sbs == 0) throw ConfigError("udn: max UEs per SBS must be positive");
  if (!(radio.shadow_sigma_db >= 0.0)) throw ConfigError("udn: shadowing sigma must be >= 0");
  if (!(radio.bandwidth_hz > 0.0 && radio.payload_bits > 0.0)) {
    throw ConfigError("udn: bandwidth and payload must be positive");
  }
  if (!(mean_background_ue >= 0.0)) throw ConfigError("udn: M must be >= 0");
  if (!(presence_switch_prob >= 0.0 && presence_switch_prob <= 1.0)) {
    throw ConfigError("udn: presence switch probability must lie in [0,1]");
  }
  if (!(ue_speed.lo >= 0.0 && ue_speed.lo <= ue_speed.hi && background_speed.lo >= 0.0 &&
        background_speed.lo <= background_speed.hi)) {
    throw ConfigError("udn: speed ranges must satisfy 0 <= lo <= hi");
  }
}

UdnOutput generate_udn(const UdnConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = cfg.n;
  const std::size_t T = static_cast<std::size_t>(cfg.horizon);
  const Layout layout = Layout::ring(n);
  const Bounds house = layout.house();

  RngStream ue_rng(seed, stream_id_for("udn_ue"));
  RngStream bg_rng(seed, stream_id_for("udn_background"));
  RngStream presence_rng(seed, stream_id_for("udn_presence"));
  RngStream shadow_rng(seed, stream_id_for("udn_shadow"));

  // 2M potential background UEs, each present half of the time on average.
  const auto potential = static_cast<std::size_t>(std::llround(2.0 * cfg.mean_background_ue));
  std::vector<Walker> background;
  std::vector<bool> present;
  for (std::size_t i = 0; i < potential; ++i) {
    background.push_back(make_walker(house, cfg.background_speed, bg_rng));
    present.push_back(presence_rng.bernoulli(0.5));
  }
  Walker ue = make_walker(house, cfg.ue_speed, ue_rng);

  EnergyMatrix raw(T, n), raw_quality(T, n);
  std::vector<double> shadow(n, 0.0), shadow_sum(n, 0.0);
  std::vector<std::size_t> load(n, 0), no_load(n, 0);
  std::vector<SbsId> order(n);
  std::vector<double> rx(n);
  Point pos_sum;

  for (std::size_t t = 0; t < T; ++t) {
    if (cfg.shadowing && t % cfg.coherence_slots == 0) {
      for (auto& s : shadow) s = cfg.radio.shadow_sigma_db * shadow_rng.normal();
    }
    std::fill(load.begin(), load.end(), 0);
    for (std::size_t i = 0; i < potential; ++i) {
      if (presence_rng.bernoulli(cfg.presence_switch_prob)) present[i] = !present[i];
      waypoint_step(background[i], house, cfg.background_speed, bg_rng);
      if (!present[i]) continue;
      // strongest SBS that still has room
      for (SbsId a = 0; a < n; ++a) rx[a] = received_dbm(layout, cfg.radio, background[i].pos, shadow, a);
      std::iota(order.begin(), order.end(), SbsId{0});
      std::stable_sort(order.begin(), order.end(), [&](SbsId a, SbsId b) { return rx[a] > rx[b]; });
      for (SbsId a : order) {
        if (load[a] < cfg.radio.max_ue_per_sbs) {
          ++load[a];
          break;
        }
      }
    }
    waypoint_step(ue, house, cfg.ue_speed, ue_rng);
    pos_sum.x += ue.pos.x;
    pos_sum.y += ue.pos.y;
    for (SbsId a = 0; a < n; ++a) {
      raw.at(t, a) = slot_energy(layout, cfg.radio, ue.pos, load, shadow, a, cfg.interference);
      raw_quality.at(t, a) =
          slot_energy(layout, cfg.radio, ue.pos, no_load, shadow, a, cfg.interference);
      shadow_sum[a] += shadow[a];
    }
  }

  // Calibrate so that the best SBS's median normalized energy hits the target.
  std::vector<double> col_sum(n, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (SbsId a = 0; a < n; ++a) col_sum[a] += raw.at(t, a);
  }
  const SbsId best = static_cast<SbsId>(std::min_element(col_sum.begin(), col_sum.end()) -
                                        col_sum.begin());
  std::vector<double> column(T);
  for (std::size_t t = 0; t < T; ++t) column[t] = raw.at(t, best);
  std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(T / 2), column.end());
  const double median = column[T / 2];

  UdnOutput out;
  out.e_max_raw = median * (1.0 - cfg.handover_cost) / cfg.target_best_median;
  out.e_s_raw = cfg.handover_cost / (1.0 - cfg.handover_cost) * out.e_max_raw;
  out.energy = EnergyMatrix(T, n);
  out.measurement = EnergyMatrix(T, n);
  for (std::size_t t = 0; t < T; ++t) {
    for (SbsId a = 0; a < n; ++a) {
      out.energy.at(t, a) =
          normalize_energy(std::min(raw.at(t, a), out.e_max_raw), out.e_max_raw, out.e_s_raw)
              .energy.value();
      out.measurement.at(t, a) =
          normalize_energy(std::min(raw_quality.at(t, a), out.e_max_raw), out.e_max_raw,
                           out.e_s_raw)
              .energy.value();
    }
  }
  out.mean_ue_position = {pos_sum.x / static_cast<double>(T), pos_sum.y / static_cast<double>(T)};
  out.mean_shadow_db.resize(n);
  for (SbsId a = 0; a < n; ++a) out.mean_shadow_db[a] = shadow_sum[a] / static_cast<double>(T);
  return out;
}

}  // namespace udnmob

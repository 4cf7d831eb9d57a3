#pragma once

// System-level energy generator for one traced UE in an indoor UDN.
//
// N SBSs sit on a ring around a square house; the traced UE and a varying
// population of background UEs walk inside the house. Each slot the traced
// UE's energy on SBS a is payload / Shannon rate x transmit power, scaled by
// (1 + load_a / max_ue) where load_a counts background UEs attached to a.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "udnmob/core.hpp"
#include "udnmob/energy_matrix.hpp"

namespace udnmob {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct Bounds {
  double xmin, xmax, ymin, ymax;
  bool contains(Point p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  Point clamp(Point p) const noexcept;
};

struct Layout {
  double house_side = 14.0;
  double ring_radius = 80.0;
  std::vector<Point> sbs;
  std::vector<double> sbs_angle;  // radians; every SBS sits at ring_radius

  /// N SBSs at angles 2*pi*k/N on a ring centered on the house.
  static Layout ring(std::size_t n, double ring_radius = 80.0, double house_side = 14.0);
  Bounds house() const noexcept {
    return {-house_side / 2, house_side / 2, -house_side / 2, house_side / 2};
  }
};

struct RadioParams {
  double tx_power_dbm = 15.0;
  double carrier_hz = 2.1e9;
  double bandwidth_hz = 20e6;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 5.5;
  double penetration_loss_db = 10.0;
  double d0_m = 1.0;
  double shadow_sigma_db = 5.0;
  double payload_bits = 1e6;
  std::size_t max_ue_per_sbs = 3;
};

/// Distance from the UE to SBS a, computed in polar form so that all SBSs
/// are exactly ring_radius away from the house center.
double sbs_distance(const Layout& layout, SbsId a, Point ue);

/// 15.3 + 37.6 log10(d) + penetration loss; d must exceed d0.
double pathloss_db(double d_m, double penetration_loss_db = 10.0, double d0_m = 1.0);

/// Thermal noise density + 10 log10(bandwidth) + noise figure.
double noise_power_dbm(const RadioParams& params);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Raw (unclipped) energy of serving the UE from `sbs` for one slot.
/// shadow_db[a] is the shadowing loss towards SBS a; with `interference`
/// every other SBS's received power adds to the noise.
double slot_energy(const Layout& layout, const RadioParams& params, Point ue,
                   std::span<const std::size_t> load, std::span<const double> shadow_db, SbsId sbs,
                   bool interference = false);

struct SpeedRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct Walker {
  Point pos;
  Point waypoint;
  double speed = 0.0;
};

/// Random-waypoint move: advance by `speed` towards the waypoint; on arrival
/// stop there and draw a new uniform waypoint and speed.
void waypoint_step(Walker& w, const Bounds& bounds, SpeedRange speeds, RngStream& rng);

Walker make_walker(const Bounds& bounds, SpeedRange speeds, RngStream& rng);

struct UdnConfig {
  std::size_t n = 6;
  std::uint64_t horizon = 1000;
  double handover_cost = 0.2;        // normalized E_s
  RadioParams radio;
  std::size_t coherence_slots = 10;
  bool shadowing = true;
  bool interference = false;
  double mean_background_ue = 6.0;   // M
  double presence_switch_prob = 0.01;
  SpeedRange ue_speed{0.005, 0.02};  // meters per slot
  SpeedRange background_speed{0.02, 0.1};
  double target_best_median = 0.1;   // normalized median energy of the best SBS

  void validate() const;
};

struct UdnOutput {
  EnergyMatrix energy;       // normalized, what the UE pays
  EnergyMatrix measurement;  // normalized signal-quality view (load not visible)
  double e_max_raw = 0.0;
  double e_s_raw = 0.0;
  Point mean_ue_position;
  std::vector<double> mean_shadow_db;  // per SBS, over the run
};

/// Deterministic in (config, seed).
UdnOutput generate_udn(const UdnConfig& cfg, std::uint64_t seed);

}  // namespace udnmob

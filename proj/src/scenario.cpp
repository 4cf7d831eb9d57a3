#include "udnmob/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "udnmob/baselines.hpp"

namespace udnmob {

namespace {

using nlohmann::json;

constexpr double kSlack = 1e-12;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario key '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + " key '" + key + "': " + e.what());
  }
}

const char* mode_name(AvailabilityMode m) {
  switch (m) {
    case AvailabilityMode::kAlwaysOn: return "always_on";
    case AvailabilityMode::kIid: return "iid";
    case AvailabilityMode::kAdaptive: return "adaptive";
    case AvailabilityMode::kScripted: return "scripted";
  }
  return "always_on";
}

AvailabilityConfig parse_availability(const json& j, std::size_t n) {
  AvailabilityConfig cfg;
  const auto mode = get_or<std::string>(j, "mode", "always_on");
  if (mode == "always_on") {
    cfg.mode = AvailabilityMode::kAlwaysOn;
  } else if (mode == "iid") {
    cfg.mode = AvailabilityMode::kIid;
    if (j.contains("p_on")) {
      cfg.p_on = require<std::vector<double>>(j, "p_on", "availability");
    } else if (j.contains("p_off")) {
      cfg.p_on.assign(n, 1.0 - require<double>(j, "p_off", "availability"));
    } else {
      throw ConfigError("iid availability needs p_on or p_off");
    }
  } else if (mode == "adaptive") {
    cfg.mode = AvailabilityMode::kAdaptive;
  } else if (mode == "scripted") {
    cfg.mode = AvailabilityMode::kScripted;
    for (const auto& ids : require<std::vector<std::vector<SbsId>>>(j, "sets", "availability")) {
      for (SbsId a : ids) {
        if (a >= n) throw ConfigError("scripted availability: SBS id out of range");
      }
      cfg.script.push_back(SbsSet::from_ids(ids));
    }
  } else {
    throw ConfigError("unknown availability mode '" + mode + "'");
  }
  return cfg;
}

std::vector<double> sized(const json& g, const char* key, std::size_t n) {
  auto v = require<std::vector<double>>(g, key, "generator");
  if (v.size() != n) throw ConfigError(std::string("generator.") + key + " needs N entries");
  return v;
}

}  // namespace

double Scenario::e_max() const {
  if (!raw_units) return 1.0 - handover_cost;
  return get_or<double>(generator, "e_max", std::numeric_limits<double>::quiet_NaN());
}

EnvironmentOptions Scenario::environment_options() const {
  EnvironmentOptions o;
  o.handover_cost = handover_cost;
  o.feedback_scale = feedback_scale;
  o.delay = delay;
  o.p_miss = p_miss;
  o.availability = availability;
  return o;
}

void Scenario::validate() const {
  if (n < 1 || n > SbsSet::kMaxSbs) throw ConfigError("N must lie in [1, 64]");
  if (horizon < 1) throw ConfigError("T must be positive");
  if (!(handover_cost >= 0.0)) throw ConfigError("E_s must be >= 0");
  if (!raw_units && !(handover_cost < 1.0)) throw ConfigError("normalized E_s must be < 1");
  if (!(feedback_scale > 0.0)) throw ConfigError("feedback_scale must be positive");
  if (raw_units) {
    const double em = e_max();
    if (!(em > 0.0)) throw ConfigError("raw-unit scenarios need generator.e_max > 0");
    if ((em + handover_cost) * feedback_scale > 1.0 + kSlack) {
      throw ConfigError("feedback_scale must map E_max + E_s into [0,1]");
    }
  } else if (std::abs(feedback_scale - 1.0) > kSlack) {
    throw ConfigError("feedback_scale applies to raw-unit scenarios only");
  }
  if (!(p_miss >= 0.0 && p_miss < 1.0)) throw ConfigError("p_miss must lie in [0,1)");
  if (!generator.is_object() || !generator.contains("type")) {
    throw ConfigError("generator needs a type");
  }
  availability.validate(n);
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;
  s.name = get_or<std::string>(j, "name", "scenario");
  s.n = require<std::size_t>(j, "N", "scenario");
  s.handover_cost = get_or<double>(j, "E_s", 0.0);
  s.generator = j.contains("generator") ? j.at("generator") : json{{"type", "constant"}};
  if (!s.generator.is_object()) throw ConfigError("generator must be an object");
  if (j.contains("T")) {
    s.horizon = require<std::uint64_t>(j, "T", "scenario");
  } else if (s.generator.value("type", "") == "matrix" && s.generator.contains("rows")) {
    s.horizon = s.generator.at("rows").size();
  } else {
    throw ConfigError("scenario: missing key 'T'");
  }
  const auto units = get_or<std::string>(j, "units", "normalized");
  if (units != "normalized" && units != "raw") throw ConfigError("units must be normalized or raw");
  s.raw_units = units == "raw";
  s.feedback_scale = get_or<double>(j, "feedback_scale", 1.0);
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    s.delay = get_or<std::size_t>(c, "delay", 0);
    s.p_miss = get_or<double>(c, "p_miss", 0.0);
  }
  if (j.contains("availability")) s.availability = parse_availability(j.at("availability"), s.n);
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scenario file '" + path + "': " + e.what());
  }
  return parse_scenario(j);
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["N"] = s.n;
  j["T"] = s.horizon;
  j["E_s"] = s.handover_cost;
  j["units"] = s.raw_units ? "raw" : "normalized";
  if (s.raw_units) j["feedback_scale"] = s.feedback_scale;
  j["generator"] = s.generator;
  j["channel"] = {{"delay", s.delay}, {"p_miss", s.p_miss}};
  json a;
  a["mode"] = mode_name(s.availability.mode);
  if (s.availability.mode == AvailabilityMode::kIid) a["p_on"] = s.availability.p_on;
  if (s.availability.mode == AvailabilityMode::kScripted) {
    json sets = json::array();
    for (const auto& set : s.availability.script) sets.push_back(set.ids());
    a["sets"] = sets;
  }
  j["availability"] = a;
  return j;
}

EnergyMatrix adversarial_family(int family, std::size_t n, std::size_t horizon, double e_max,
                                std::uint64_t seed) {
  if (n < 2) throw ConfigError("adversarial families need N >= 2");
  if (!(e_max > 0.0 && e_max <= 1.0)) throw ConfigError("adversarial e_max must lie in (0,1]");
  RngStream rng(seed, stream_id_for("adversarial", static_cast<std::uint64_t>(family)));
  EnergyMatrix m(horizon, n);
  const double e = e_max;
  const double last = static_cast<double>(n - 1);
  auto clip = [e](double v) { return std::clamp(v, 0.0, e); };
  auto stair = [&](SbsId a) { return e * (0.2 + 0.6 * static_cast<double>(a) / last); };

  switch (family) {
    case 0:
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a) m.at(t, a) = stair(a);
      break;
    case 1:
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a) m.at(t, a) = clip(stair(a) + e * rng.uniform(-0.15, 0.15));
      break;
    case 2:
      for (std::size_t t = 0; t < horizon; ++t) {
        const bool late = 2 * t >= horizon;
        for (SbsId a = 0; a < n; ++a) {
          double v;
          if (a == 0) v = late ? 0.7 * e : 0.2 * e;
          else if (a == 1) v = late ? 0.1 * e : 0.6 * e;
          else v = clip(0.5 * e + e * rng.uniform(-0.1, 0.1));
          m.at(t, a) = v;
        }
      }
      break;
    case 3:
      for (std::size_t t = 0; t < horizon; ++t) {
        for (SbsId a = 0; a < n; ++a) {
          const double phase = 2.0 * std::numbers::pi *
                               (static_cast<double>(t) / 1000.0 + static_cast<double>(a) / static_cast<double>(n));
          m.at(t, a) = clip(e * (0.5 + 0.4 * std::sin(phase)) - (a == 0 ? 0.05 * e : 0.0));
        }
      }
      break;
    case 4:
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a)
          m.at(t, a) = rng.bernoulli(0.3 + 0.4 * static_cast<double>(a) / last) ? e : 0.0;
      break;
    case 5: {
      const std::size_t trap = horizon / 5;
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a)
          m.at(t, a) = (a == 0) ? (t < trap ? e : 0.0) : (t < trap ? 0.3 * e : 0.5 * e);
      break;
    }
    case 6: {
      std::vector<double> level(n);
      for (std::size_t t = 0; t < horizon; ++t) {
        if (t % 1000 == 0) {
          for (SbsId a = 0; a < n; ++a) level[a] = e * rng.uniform(0.1, 0.9) - (a == 0 ? 0.05 * e : 0.0);
        }
        for (SbsId a = 0; a < n; ++a) m.at(t, a) = clip(level[a]);
      }
      break;
    }
    case 7:
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a)
          m.at(t, a) = (a + 1 == n) ? e * rng.uniform(0.2, 0.7) : e * rng.uniform(0.25, 0.75);
      break;
    case 8:
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a) m.at(t, a) = ((t / 7 + a) % 2 == 0) ? e : 0.0;
      break;
    case 9: {
      const SbsId good = rng.uniform_index(n);
      for (std::size_t t = 0; t < horizon; ++t)
        for (SbsId a = 0; a < n; ++a) m.at(t, a) = (a == good) ? 0.1 * e : e * rng.uniform(0.7, 1.0);
      break;
    }
    default:
      throw ConfigError("adversarial family must lie in [0, 9]");
  }
  return m;
}

UdnConfig udn_config_from_json(const json& g, std::size_t n, std::uint64_t horizon,
                               double handover_cost) {
  UdnConfig c;
  c.n = n;
  c.horizon = horizon;
  c.handover_cost = handover_cost;
  auto& r = c.radio;
  r.tx_power_dbm = get_or(g, "tx_power_dbm", r.tx_power_dbm);
  r.carrier_hz = get_or(g, "carrier_hz", r.carrier_hz);
  r.bandwidth_hz = get_or(g, "bandwidth_hz", r.bandwidth_hz);
  r.noise_density_dbm_hz = get_or(g, "noise_density_dbm_hz", r.noise_density_dbm_hz);
  r.noise_figure_db = get_or(g, "noise_figure_db", r.noise_figure_db);
  r.penetration_loss_db = get_or(g, "penetration_loss_db", r.penetration_loss_db);
  r.d0_m = get_or(g, "d0_m", r.d0_m);
  r.payload_bits = get_or(g, "payload_bits", r.payload_bits);
  r.max_ue_per_sbs = get_or<std::size_t>(g, "max_ue_per_sbs", r.max_ue_per_sbs);
  const double shadow = get_or(g, "shadowing_db", 5.0);
  const auto reading = get_or<std::string>(g, "shadowing_reading", "sigma");
  if (reading == "sigma") {
    r.shadow_sigma_db = shadow;
  } else if (reading == "variance") {
    if (!(shadow >= 0.0)) throw ConfigError("shadowing variance must be >= 0");
    r.shadow_sigma_db = std::sqrt(shadow);
  } else {
    throw ConfigError("shadowing_reading must be sigma or variance");
  }
  c.shadowing = get_or(g, "shadowing", true);
  c.coherence_slots = get_or<std::size_t>(g, "coherence_slots", c.coherence_slots);
  c.interference = get_or(g, "interference", false);
  c.mean_background_ue = get_or(g, "M", c.mean_background_ue);
  c.presence_switch_prob = get_or(g, "presence_switch_prob", c.presence_switch_prob);
  c.target_best_median = get_or(g, "target_best_median", c.target_best_median);
  if (g.contains("ue_speed")) {
    const auto v = require<std::vector<double>>(g, "ue_speed", "generator");
    if (v.size() != 2) throw ConfigError("ue_speed needs [lo, hi]");
    c.ue_speed = {v[0], v[1]};
  }
  if (g.contains("background_speed")) {
    const auto v = require<std::vector<double>>(g, "background_speed", "generator");
    if (v.size() != 2) throw ConfigError("background_speed needs [lo, hi]");
    c.background_speed = {v[0], v[1]};
  }
  c.validate();
  return c;
}

Realization realize(const Scenario& s, std::uint64_t seed) {
  s.validate();
  const auto& g = s.generator;
  const auto type = require<std::string>(g, "type", "generator");
  const std::size_t n = s.n;
  const auto T = static_cast<std::size_t>(s.horizon);
  const double e_max = s.e_max();

  auto energy = std::make_shared<EnergyMatrix>(T, n);
  std::shared_ptr<EnergyMatrix> measurement;

  if (type == "constant") {
    const auto means = sized(g, "means", n);
    for (std::size_t t = 0; t < T; ++t)
      for (SbsId a = 0; a < n; ++a) energy->at(t, a) = means[a];
  } else if (type == "uniform_iid") {
    std::vector<double> lo, hi;
    if (g.contains("low")) {
      lo = sized(g, "low", n);
      hi = sized(g, "high", n);
    } else {
      lo.assign(n, 0.0);
      hi.assign(n, e_max);
    }
    for (SbsId a = 0; a < n; ++a) {
      if (!(lo[a] <= hi[a])) throw ConfigError("uniform_iid needs low <= high");
    }
    RngStream rng(seed, stream_id_for("uniform_iid"));
    for (std::size_t t = 0; t < T; ++t)
      for (SbsId a = 0; a < n; ++a) energy->at(t, a) = rng.uniform(lo[a], hi[a]);
  } else if (type == "matrix") {
    const auto rows = require<std::vector<std::vector<double>>>(g, "rows", "generator");
    if (rows.size() < T) throw ConfigError("matrix generator has fewer rows than T");
    for (std::size_t t = 0; t < T; ++t) {
      if (rows[t].size() != n) throw ConfigError("matrix generator rows need N entries");
      for (SbsId a = 0; a < n; ++a) energy->at(t, a) = rows[t][a];
    }
  } else if (type == "threshold_trap") {
    const double theta = require<double>(g, "threshold", "generator");
    const double em = get_or(g, "e_max", e_max);
    *energy = appendix_c_sequence(n, T, theta, em);
  } else if (type == "adversarial") {
    const int family = require<int>(g, "family", "generator");
    const double em = get_or(g, "e_max", e_max);
    *energy = adversarial_family(family, n, T, em, seed);
  } else if (type == "udn") {
    if (s.raw_units) throw ConfigError("udn generator emits normalized energies");
    auto out = generate_udn(udn_config_from_json(g, n, s.horizon, s.handover_cost), seed);
    *energy = std::move(out.energy);
    measurement = std::make_shared<EnergyMatrix>(std::move(out.measurement));
  } else {
    throw ConfigError("unknown generator type '" + type + "'");
  }

  if (energy->slots() > 0) {
    const double lo = energy->min_value();
    const double hi = energy->max_value();
    if (!(lo >= 0.0)) throw ConfigError("generator produced a negative energy");
    if (!(hi <= e_max + kSlack)) {
      throw ConfigError("generator produced an energy above E_max = " + std::to_string(e_max));
    }
  }
  Realization r;
  r.energy = energy;
  r.measurement = measurement ? std::shared_ptr<const EnergyMatrix>(measurement) : r.energy;
  return r;
}

Scenario theorem3_scenario(std::size_t n, std::uint64_t horizon, double handover_cost,
                           double e_max) {
  if (n < 2) throw ConfigError("the on/off adversary needs N >= 2");
  if (!(e_max > 0.0)) throw ConfigError("E_max must be positive");
  const double needed = e_max + 1.0 / static_cast<double>(n - 1);
  if (handover_cost < needed - kSlack) {
    throw ConfigError("on/off adversary needs E_s >= E_max + 1/(N-1) = " + std::to_string(needed));
  }
  Scenario s;
  s.name = "onoff_adversary";
  s.n = n;
  s.horizon = horizon;
  s.handover_cost = handover_cost;
  s.raw_units = true;
  s.feedback_scale = 1.0 / (e_max + handover_cost);
  s.generator = {{"type", "uniform_iid"}, {"e_max", e_max}};
  s.availability.mode = AvailabilityMode::kAdaptive;
  s.validate();
  return s;
}

}  // namespace udnmob

#include "udnmob/presets.hpp"

#include <cstdio>

#include "udnmob/brew.hpp"

namespace udnmob {

namespace {

constexpr std::uint64_t kDefaultHorizon = 100000;
constexpr std::size_t kDefaultReps = 20;

std::string tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

ExperimentSpec base(const std::string& id, std::size_t n, double es, const PresetOptions& o) {
  ExperimentSpec e;
  e.id = id;
  e.scenario.name = id;
  e.scenario.n = n;
  e.scenario.horizon = o.horizon.value_or(kDefaultHorizon);
  e.scenario.handover_cost = es;
  e.scenario.generator = {{"type", "udn"}};
  e.repetitions = o.repetitions.value_or(kDefaultReps);
  e.seed = o.seed;
  e.stride = o.stride;
  e.threads = o.threads;
  return e;
}

std::vector<PolicySpec> tau_sweep(std::size_t n, std::uint64_t horizon) {
  const std::size_t tau = brew_batch_length(n, horizon);
  std::vector<PolicySpec> out{parse_policy_spec("brew")};
  if (tau > 1) out.push_back(parse_policy_spec("brew:tau=" + std::to_string((tau + 1) / 2)));
  out.push_back(parse_policy_spec("brew:tau=" + std::to_string(2 * tau)));
  return out;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7"}; }

std::vector<ExperimentSpec> make_preset(const std::string& name, const PresetOptions& o) {
  std::vector<ExperimentSpec> out;
  const std::vector<double> costs{0.2, 0.4};

  if (name == "fig3" || name == "fig4") {
    const std::size_t n = name == "fig3" ? 6 : 12;
    for (double es : costs) {
      auto e = base(name + "_N" + std::to_string(n) + "_Es" + tag(es), n, es, o);
      e.policies = tau_sweep(n, e.scenario.horizon);
      e.policies.push_back(parse_policy_spec("macro"));
      e.policies.push_back(parse_policy_spec("fho"));
      out.push_back(std::move(e));
    }
  } else if (name == "fig5" || name == "fig6") {
    for (std::size_t n : {6, 12}) {
      for (double es : costs) {
        if (name == "fig5") {
          for (std::size_t d : {0, 2, 5}) {
            auto e = base("fig5_N" + std::to_string(n) + "_Es" + tag(es) + "_d" + std::to_string(d),
                          n, es, o);
            e.scenario.delay = d;
            e.policies = {parse_policy_spec("brew"), parse_policy_spec("macro"),
                          parse_policy_spec("fho")};
            out.push_back(std::move(e));
          }
        } else {
          for (double pm : {0.0, 0.1, 0.3}) {
            auto e = base("fig6_N" + std::to_string(n) + "_Es" + tag(es) + "_Pm" + tag(pm), n,
                          es, o);
            e.scenario.p_miss = pm;
            e.policies = {parse_policy_spec("brew_missing"), parse_policy_spec("macro"),
                          parse_policy_spec("fho")};
            out.push_back(std::move(e));
          }
        }
      }
    }
  } else if (name == "fig7") {
    const std::size_t n = 6;
    for (double es : costs) {
      for (double p_off : {0.1, 0.3}) {
        auto e = base("fig7_N6_Es" + tag(es) + "_Poff" + tag(p_off), n, es, o);
        e.scenario.availability.mode = AvailabilityMode::kIid;
        e.scenario.availability.p_on.assign(n, 1.0 - p_off);
        e.policies = {parse_policy_spec("cre"), parse_policy_spec("macro_ext")};
        out.push_back(std::move(e));
      }
    }
  } else {
    std::string known;
    for (const auto& p : preset_names()) known += " " + p;
    throw ConfigError("unknown preset '" + name + "'; known:" + known);
  }
  for (auto& e : out) e.scenario.validate();
  return out;
}

}  // namespace udnmob

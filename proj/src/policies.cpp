#include "udnmob/policies.hpp"

#include <charconv>
#include <set>

#include "udnmob/baselines.hpp"
#include "udnmob/brew.hpp"
#include "udnmob/experts.hpp"

namespace udnmob {

namespace {

const std::set<std::string> kHarnessKeys = {"label", "regret_pool"};

void check_keys(const PolicySpec& spec, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : spec.params) {
    if (kHarnessKeys.count(k)) continue;
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("algorithm '" + spec.algo + "' has no parameter '" + k + "'");
  }
}

double as_double(const PolicySpec& spec, const std::string& key) {
  const std::string& v = spec.params.at(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(spec.algo + ": parameter " + key + "='" + v + "' is not a number");
  }
}

std::size_t as_size(const PolicySpec& spec, const std::string& key) {
  const std::string& v = spec.params.at(key);
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(spec.algo + ": parameter " + key + "='" + v + "' is not a non-negative integer");
  }
  return x;
}

BrewConfig brew_config(const PolicySpec& spec, const Scenario& s, bool force_tau_one) {
  BrewConfig cfg = BrewConfig::with_auto_tau(s.n, s.horizon, s.handover_cost);
  if (force_tau_one) {
    cfg.tau = 1;
  } else if (spec.has("tau") && spec.params.at("tau") != "auto") {
    cfg.tau = as_size(spec, "tau");
  }
  if (spec.has("gamma")) cfg.gamma = GammaSchedule::constant(as_double(spec, "gamma"));
  cfg.validate();
  return cfg;
}

}  // namespace

std::string PolicySpec::label() const {
  if (auto it = params.find("label"); it != params.end()) return it->second;
  std::string out = algo;
  for (const auto& [k, v] : params) {
    if (k == "regret_pool") continue;
    out += "/" + k + "=" + v;
  }
  return out;
}

PolicySpec parse_policy_spec(const std::string& text) {
  PolicySpec spec;
  const auto colon = text.find(':');
  spec.algo = text.substr(0, colon);
  if (spec.algo.empty()) throw ConfigError("empty algorithm name");
  if (colon == std::string::npos) return spec;
  std::size_t pos = colon + 1;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("algorithm parameter '" + item + "' is not key=value");
    }
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
    pos = comma + 1;
  }
  return spec;
}

std::size_t policy_batch_length(const PolicySpec& spec, const Scenario& s) {
  if (spec.algo == "brew" || spec.algo == "brew_missing") return brew_config(spec, s, false).tau;
  return 1;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Scenario& s, RngStream rng) {
  const std::string& a = spec.algo;
  if (a == "brew" || a == "exp3") {
    check_keys(spec, a == "brew" ? std::initializer_list<const char*>{"tau", "gamma"}
                                 : std::initializer_list<const char*>{"gamma"});
    return std::make_unique<BrewPolicy>(brew_config(spec, s, a == "exp3"), std::nullopt, rng);
  }
  if (a == "brew_missing") {
    check_keys(spec, {"tau", "gamma", "p"});
    MissingFeedbackConfig m{spec.has("p") ? as_double(spec, "p") : s.p_miss};
    m.validate();
    return std::make_unique<BrewPolicy>(brew_config(spec, s, false), m, rng);
  }
  if (a == "re") {
    check_keys(spec, {"variant"});
    const std::string variant = spec.has("variant") ? spec.params.at("variant") : "factored";
    std::unique_ptr<ExpertMixture> mix;
    if (variant == "factored") {
      mix = std::make_unique<FactoredRankingExperts>(s.n);
    } else if (variant == "naive") {
      mix = std::make_unique<NaiveRankingExperts>(s.n);
    } else {
      throw ConfigError("re: variant must be factored or naive");
    }
    return std::make_unique<RankingExpertPolicy>("re", std::move(mix), rng);
  }
  if (a == "cre") {
    check_keys(spec, {});
    return std::make_unique<RankingExpertPolicy>(
        "cre", std::make_unique<ContextualRankingExperts>(s.n), rng);
  }
  if (a == "macro") {
    check_keys(spec, {"threshold"});
    MacroConfig cfg;
    if (spec.has("threshold")) cfg.threshold = as_double(spec, "threshold");
    return std::make_unique<MacroPolicy>(cfg);
  }
  if (a == "fho") {
    check_keys(spec, {"threshold", "window", "max_handover", "freeze"});
    FhoConfig cfg;
    if (spec.has("threshold")) cfg.macro.threshold = as_double(spec, "threshold");
    if (spec.has("window")) cfg.window = as_size(spec, "window");
    if (spec.has("max_handover")) cfg.max_handover = as_size(spec, "max_handover");
    cfg.freeze_len = spec.has("freeze") ? as_size(spec, "freeze")
                                        : brew_batch_length(s.n, s.horizon);
    return std::make_unique<FhoPolicy>(cfg);
  }
  if (a == "macro_ext") {
    check_keys(spec, {});
    return std::make_unique<ExtendedMacroPolicy>(s.handover_cost);
  }
  if (a == "fixed") {
    check_keys(spec, {"arm"});
    const SbsId arm = spec.has("arm") ? as_size(spec, "arm") : 0;
    if (arm >= s.n) throw ConfigError("fixed: arm out of range");
    return std::make_unique<FixedArmPolicy>(arm);
  }
  throw ConfigError("unknown algorithm '" + a + "'");
}

}  // namespace udnmob

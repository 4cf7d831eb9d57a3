#include "udnmob/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <ostream>
#include <sstream>

#include "udnmob/app.hpp"
#include "udnmob/brew.hpp"
#include "udnmob/experts.hpp"
#include "udnmob/harness.hpp"
#include "udnmob/udn_sim.hpp"

namespace udnmob {

namespace {

// ---- pinned tolerances ------------------------------------------------------

constexpr std::size_t kSeeds = 20;
constexpr double kBoundRuntimeLimitS = 120.0;     // criterion 1
constexpr double kDecadeShrink = 0.8;             // R/T must fall to <= 80% per decade
constexpr double kLinearFitR2 = 0.99;
constexpr double kTrapThreshold = 0.1;            // macro threshold on the trap sequence
constexpr double kTrapHandoverCost = 0.1;
constexpr std::size_t kMissingTau = 3;
constexpr double kMissingP = 0.3;
constexpr std::size_t kMissingBatches = 1000000;
constexpr double kMissingSe = 3.0;
constexpr double kDistributionTol = 1e-10;
constexpr std::size_t kScriptedSteps = 50;
constexpr std::size_t kScriptedScenarios = 20;
constexpr double kPathlossAt80 = 96.856;
constexpr double kPathlossTol = 1e-3;
constexpr double kNoisePower = -95.49;
constexpr double kNoiseTol = 1e-2;
constexpr double kSuiteLimitS = 900.0;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail_if(bool bad, const std::string& why) {
    if (bad) {
      pass = false;
      note(why);
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ExperimentSpec experiment(const nlohmann::json& scenario, std::vector<std::string> algos,
                          std::size_t threads, std::size_t stride, std::size_t reps = kSeeds) {
  ExperimentSpec e;
  e.scenario = parse_scenario(scenario);
  e.id = e.scenario.name;
  for (const auto& a : algos) e.policies.push_back(parse_policy_spec(a));
  e.repetitions = reps;
  e.stride = stride;
  e.threads = threads;
  return e;
}

nlohmann::json adversarial(int family, std::size_t delay) {
  return {{"name", "adv" + std::to_string(family)},
          {"N", 6},
          {"T", 100000},
          {"E_s", 0.2},
          {"generator", {{"type", "adversarial"}, {"family", family}}},
          {"channel", {{"delay", delay}}}};
}

// Mean BREW regret per adversarial family for one delay.
std::vector<double> family_regrets(std::size_t delay, std::size_t threads, Outcome& o,
                                   double bound) {
  std::vector<double> out;
  for (int f = 0; f < kAdversarialFamilies; ++f) {
    const auto r = run_experiment(experiment(adversarial(f, delay), {"brew"}, threads, 10000));
    const double m = r.algos.front().mean_regret;
    out.push_back(m);
    o.fail_if(!(m <= bound), "family " + std::to_string(f) + fmt(" regret %.1f > bound %.1f", m, bound));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

// R(T)/T for BREW at T = 1e3, 1e4, 1e5; each must be <= kDecadeShrink times the previous.
void check_decades(const nlohmann::json& base, std::size_t threads, const std::string& what,
                   Outcome& o) {
  std::vector<double> ratio;
  for (std::uint64_t T : {1000u, 10000u, 100000u}) {
    auto j = base;
    j["T"] = T;
    const auto r = run_experiment(experiment(j, {"brew"}, threads, T / 10));
    ratio.push_back(r.algos.front().mean_regret / static_cast<double>(T));
  }
  o.note(what + fmt(" R/T %.4g, %.4g, %.4g", ratio[0], ratio[1], ratio[2]));
  for (std::size_t i = 1; i < ratio.size(); ++i) {
    o.fail_if(!(ratio[i] <= kDecadeShrink * ratio[i - 1]),
              what + " R/T did not shrink by 20% in decade " + std::to_string(i));
  }
}

// ---- criteria -----------------------------------------------------------------

Outcome theorem1_bound(std::size_t threads) {
  Outcome o;
  const auto start = Clock::now();
  const double bound = brew_regret_bound(6, 100000);
  const auto regrets = family_regrets(0, threads, o, bound);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  o.note(fmt("max family regret %.1f vs bound %.1f", *std::max_element(regrets.begin(), regrets.end()),
             bound));
  o.note(fmt("%.1f s", secs));
  o.fail_if(!(secs < kBoundRuntimeLimitS), "runtime above 120 s");
  return o;
}

Outcome sublinearity(std::size_t threads) {
  Outcome o;
  check_decades({{"name", "two_arm_gap"},
                 {"N", 2},
                 {"E_s", 0.1},
                 {"generator", {{"type", "constant"}, {"means", {0.1, 0.9}}}}},
                threads, "brew", o);
  return o;
}

Outcome threshold_trap(std::size_t threads) {
  Outcome o;
  const nlohmann::json trap = {{"name", "threshold_trap"},
                               {"N", 2},
                               {"T", 10000},
                               {"E_s", kTrapHandoverCost},
                               {"generator", {{"type", "threshold_trap"}, {"threshold", kTrapThreshold}}}};
  const auto r = run_experiment(
      experiment(trap, {"macro:threshold=" + std::to_string(kTrapThreshold)}, threads, 10));
  const auto& a = r.algos.front();
  // Least-squares line through R(t) on the last half of the horizon.
  const double half = static_cast<double>(r.scenario.horizon) / 2.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, k = 0;
  for (std::size_t i = 0; i < a.curve_t.size(); ++i) {
    const double t = static_cast<double>(a.curve_t[i]);
    if (t <= half) continue;
    const double y = a.mean_regret_per_slot[i] * t;
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    syy += y * y;
    k += 1;
  }
  const double cov = sxy - sx * sy / k;
  const double vx = sxx - sx * sx / k;
  const double vy = syy - sy * sy / k;
  const double slope = cov / vx;
  const double r2 = vy > 0 ? cov * cov / (vx * vy) : 0.0;
  o.note(fmt("macro slope %.4f per slot, R^2 %.5f", slope, r2));
  o.fail_if(!(slope > 0.0), "macro regret slope not positive");
  o.fail_if(!(r2 > kLinearFitR2), "macro regret not linear (R^2 <= 0.99)");
  auto base = trap;
  base.erase("T");
  check_decades(base, threads, "brew", o);
  return o;
}

Outcome theorem2_delay(std::size_t threads) {
  Outcome o;
  const std::size_t tau = brew_batch_length(6, 100000);
  std::vector<double> overall;
  for (std::size_t d : {0u, 1u, 3u}) {
    o.fail_if(!(d < tau), "delay " + std::to_string(d) + " not below tau");
    const double bound = delayed_brew_regret_bound(6, 100000, d);
    const auto regrets = family_regrets(d, threads, o, bound);
    overall.push_back(mean_of(regrets));
    o.note("d=" + std::to_string(d) +
           fmt(" mean %.1f max %.1f bound %.1f", overall.back(),
               *std::max_element(regrets.begin(), regrets.end()), bound));
  }
  for (std::size_t i = 1; i < overall.size(); ++i) {
    o.fail_if(!(overall[i] >= overall[i - 1]), "mean regret decreased with delay");
  }
  return o;
}

// Increment of the chosen arm's estimated loss after one batch.
double missing_estimate(const std::vector<double>& slot_loss, unsigned observed_mask,
                        const std::vector<double>& probabilities, SbsId chosen) {
  BrewState st(probabilities.size(), GammaSchedule::anytime(probabilities.size()));
  st.probabilities = probabilities;
  BatchAccumulator acc(1, chosen, slot_loss.size());
  for (std::size_t s = 0; s < slot_loss.size(); ++s) {
    if ((observed_mask >> s) & 1U) acc.add(slot_loss[s]);
  }
  brew_missing_end_batch(acc, MissingFeedbackConfig{kMissingP}, st);
  return st.weights.cum_est_loss[chosen];
}

Outcome missing_unbiased() {
  Outcome o;
  const std::vector<double> loss{0.2, 0.5, 0.9};
  const std::vector<double> probs{0.6, 0.4};
  const SbsId chosen = 0;
  const unsigned patterns = 1U << kMissingTau;

  double exact = 0.0;
  for (unsigned m = 0; m < patterns; ++m) {
    double w = 1.0;
    for (std::size_t s = 0; s < kMissingTau; ++s) w *= ((m >> s) & 1U) ? 1.0 - kMissingP : kMissingP;
    // The arm is drawn with probability probs[chosen]; otherwise its estimate stays zero.
    exact += w * probs[chosen] * missing_estimate(loss, m, probs, chosen);
  }

  RngStream rng(20240101, stream_id_for("acceptance_missing"));
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t b = 0; b < kMissingBatches; ++b) {
    const SbsId drawn = rng.categorical(probs);
    unsigned m = 0;
    for (std::size_t s = 0; s < kMissingTau; ++s) {
      if (!rng.bernoulli(kMissingP)) m |= 1U << s;
    }
    const double x = drawn == chosen ? missing_estimate(loss, m, probs, chosen) : 0.0;
    sum += x;
    sum2 += x * x;
  }
  const double nb = static_cast<double>(kMissingBatches);
  const double mc = sum / nb;
  const double se = std::sqrt(std::max(0.0, sum2 / nb - mc * mc) / (nb - 1.0));
  double batch_mean = 0.0;
  for (double x : loss) batch_mean += x / static_cast<double>(loss.size());
  o.note(fmt("exact %.6f, Monte Carlo %.6f (se %.2e)", exact, mc, se));
  o.note(fmt("expectation is %.4f x the batch mean", exact / batch_mean));
  o.fail_if(!(std::fabs(mc - exact) <= kMissingSe * se), "Monte Carlo mean outside 3 SE");
  return o;
}

Outcome theorem3_onoff(std::size_t threads) {
  Outcome o;
  ExperimentSpec e;
  e.scenario = theorem3_scenario(4, 10000, 1.0 + 1.0 / 3.0, 1.0);
  e.id = e.scenario.name;
  for (const char* a : {"brew", "exp3", "brew_missing", "re", "cre"}) {
    e.policies.push_back(parse_policy_spec(a));
  }
  e.repetitions = kSeeds;
  e.stride = 1000;
  e.threads = threads;
  const auto r = run_experiment(e);
  const double floor = onoff_regret_floor(4, 10000, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& a : r.algos) {
    for (const auto& rep : a.reps) {
      worst = std::min(worst, rep.regret);
      o.fail_if(!(rep.regret >= floor),
                a.label + fmt(" seed %.0f regret %.1f below floor", static_cast<double>(rep.seed), rep.regret));
      o.fail_if(rep.handovers != 9999, a.label + " handover count is not T-1");
    }
  }
  o.note(fmt("min regret %.1f vs floor %.1f", worst, floor));
  return o;
}

bool distributions_match(const ExpertMixture& a, const ExpertMixture& b, std::size_t n,
                         double& max_gap) {
  for (SbsId prev = 0; prev < n; ++prev) {
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
      const auto set = SbsSet::from_bits(bits);
      const auto pa = a.action_distribution(prev, set);
      const auto pb = b.action_distribution(prev, set);
      for (std::size_t i = 0; i < n; ++i) max_gap = std::max(max_gap, std::fabs(pa[i] - pb[i]));
    }
  }
  return max_gap <= kDistributionTol;
}

Outcome re_equivalence(std::size_t threads) {
  Outcome o;
  constexpr std::size_t n = 3;
  double max_gap = 0.0;
  for (std::size_t sc = 0; sc < kScriptedScenarios; ++sc) {
    RngStream rng(sc + 1, stream_id_for("acceptance_scripted"));
    FactoredRankingExperts factored(n);
    NaiveRankingExperts naive(n);
    SbsId prev = rng.uniform_index(n);
    for (std::size_t t = 0; t < kScriptedSteps; ++t) {
      std::uint64_t bits = 0;
      while (bits == 0) bits = rng.uniform_index(std::size_t{1} << n);
      const auto avail = SbsSet::from_bits(bits);
      const auto p = factored.action_distribution(prev, avail);
      const SbsId a = rng.categorical(p);
      const SbsId executed = avail.contains(a) ? a : rng.uniform_member(avail);
      const double loss = rng.uniform();
      factored.update(prev, avail, executed, loss, p[executed]);
      naive.update(prev, avail, executed, loss, p[executed]);
      distributions_match(factored, naive, n, max_gap);
      prev = executed;
    }
  }
  o.note(fmt("max |p_factored - p_naive| %.2e", max_gap));
  o.fail_if(!(max_gap <= kDistributionTol), "factored and naive distributions differ");

  const nlohmann::json s = {
      {"name", "re_bound"},
      {"N", 3},
      {"T", 10000},
      {"E_s", 0.2},
      {"generator", {{"type", "uniform_iid"}, {"low", {0.0, 0.1, 0.2}}, {"high", {0.6, 0.7, 0.8}}}},
      {"availability", {{"mode", "iid"}, {"p_on", {0.9, 0.7, 0.5}}}}};
  const auto r = run_experiment(
      experiment(s, {"re:regret_pool=full", "re:variant=naive,regret_pool=full"}, threads, 1000));
  const double bound = ranking_expert_bound(n, 10000);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& a : r.algos) {
    for (const auto& rep : a.reps) {
      worst = std::max(worst, rep.regret);
      o.fail_if(!(rep.regret <= bound), a.label + fmt(" regret %.1f above bound", rep.regret));
    }
  }
  o.note(fmt("max expert regret %.1f vs bound %.1f", worst, bound));
  return o;
}

Outcome cre_theorem5(std::size_t threads) {
  Outcome o;
  for (std::size_t n : {3u, 4u}) {
    nlohmann::json low = nlohmann::json::array(), high = nlohmann::json::array(),
                   on = nlohmann::json::array();
    for (std::size_t a = 0; a < n; ++a) {
      low.push_back(0.1 * static_cast<double>(a));
      high.push_back(0.5 + 0.1 * static_cast<double>(a));
      on.push_back(0.9 - 0.2 * static_cast<double>(a));
    }
    const nlohmann::json s = {{"name", "cre_bound_N" + std::to_string(n)},
                              {"N", n},
                              {"T", 10000},
                              {"E_s", 0.2},
                              {"generator", {{"type", "uniform_iid"}, {"low", low}, {"high", high}}},
                              {"availability", {{"mode", "iid"}, {"p_on", on}}}};
    const auto r = run_experiment(experiment(s, {"cre"}, threads, 1000));
    const double bound = contextual_expert_bound(n, 10000);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& rep : r.algos.front().reps) {
      worst = std::max(worst, rep.regret);
      o.fail_if(!(rep.regret <= bound), "N=" + std::to_string(n) + fmt(" regret %.1f above bound", rep.regret));
    }
    o.note("N=" + std::to_string(n) + fmt(" max contextual regret %.1f vs bound %.1f", worst, bound));
  }

  // Updating one context leaves every other context bitwise untouched.
  {
    constexpr std::size_t n = 4;
    ContextualRankingExperts cre(n);
    RngStream rng(7, stream_id_for("acceptance_isolation"));
    for (int i = 0; i < 200; ++i) {
      const SbsId ctx = rng.uniform_index(n);
      const auto avail = SbsSet::all(n);
      const auto p = cre.action_distribution(ctx, avail);
      const SbsId a = rng.categorical(p);
      cre.update(ctx, avail, a, rng.uniform(), p[a]);
    }
    std::vector<std::vector<double>> before;
    std::vector<std::size_t> kappa_before;
    for (SbsId c = 0; c < n; ++c) {
      before.push_back(cre.expert_weights(c));
      kappa_before.push_back(cre.kappa(c));
    }
    const auto avail = SbsSet::from_bits(0b1011);
    const auto p = cre.action_distribution(1, avail);
    cre.update(1, avail, 3, 0.7, p[3]);
    bool isolated = true;
    for (SbsId c = 0; c < n; ++c) {
      if (c == 1) continue;
      isolated = isolated && cre.expert_weights(c) == before[c] && cre.kappa(c) == kappa_before[c];
    }
    const bool moved = cre.kappa(1) == kappa_before[1] + 1 && cre.expert_weights(1) != before[1];
    o.fail_if(!isolated, "update of context 1 changed another context");
    o.fail_if(!moved, "update of context 1 did not advance it");
  }

  // Simulated network with i.i.d. on/off SBSs: CRE's cost per slot at T versus extended macro.
  for (double p_off : {0.1, 0.3}) {
    const nlohmann::json s = {{"name", "cre_udn_Poff" + fmt("%g", p_off)},
                              {"N", 6},
                              {"T", 10000},
                              {"E_s", 0.2},
                              {"generator", {{"type", "udn"}}},
                              {"availability", {{"mode", "iid"}, {"p_off", p_off}}}};
    const auto r = run_experiment(experiment(s, {"cre", "macro_ext"}, threads, 1000));
    const double cre = r.algo("cre").mean_cost_per_slot.back();
    const double ext = r.algo("macro_ext").mean_cost_per_slot.back();
    o.note(fmt("P_off %.1f: cost/slot cre %.4f vs macro_ext %.4f", p_off, cre, ext));
    o.fail_if(!(cre < ext), fmt("P_off %.1f: CRE not below extended macro at T", p_off));
  }
  return o;
}

Outcome simulator_sanity() {
  Outcome o;
  const double pl = pathloss_db(80.0);
  const RadioParams radio;
  const double noise = noise_power_dbm(radio);
  o.note(fmt("pathloss(80 m) %.4f dB, noise %.3f dBm", pl, noise));
  o.fail_if(!(std::fabs(pl - kPathlossAt80) <= kPathlossTol), "pathloss off");
  o.fail_if(!(std::fabs(noise - kNoisePower) <= kNoiseTol), "noise power off");

  for (std::size_t n : {3u, 4u, 6u, 12u}) {
    const auto layout = Layout::ring(n);
    const std::vector<std::size_t> load(n, 1);
    std::vector<double> e(n);
    for (SbsId a = 0; a < n; ++a) e[a] = slot_energy(layout, radio, {0.0, 0.0}, load, {}, a, false);
    const bool equal = std::all_of(e.begin(), e.end(), [&](double x) { return x == e[0]; });
    o.fail_if(!equal, "N=" + std::to_string(n) + ": energies at the center differ");
  }

  UdnConfig cfg;
  cfg.horizon = 10000;
  const auto out = generate_udn(cfg, 1);
  const double lo = std::min(out.energy.min_value(), out.measurement.min_value());
  const double hi = std::max(out.energy.max_value(), out.measurement.max_value());
  o.note(fmt("emitted energies in [%.4f, %.4f]", lo, hi));
  o.fail_if(!(lo >= 0.0 && hi <= 1.0), "emitted energy outside [0,1]");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(Clock::time_point suite_start) {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() /
                        ("udnmob_determinism_" + std::to_string(Clock::now().time_since_epoch().count()));
  fs::create_directories(root);
  {
    std::ofstream sc(root / "scenario.json");
    sc << nlohmann::json{{"name", "determinism"},
                         {"N", 4},
                         {"T", 3000},
                         {"E_s", 0.2},
                         {"generator", {{"type", "udn"}}},
                         {"channel", {{"delay", 1}, {"p_miss", 0.1}}},
                         {"availability", {{"mode", "iid"}, {"p_off", 0.2}}}}
              .dump(2);
  }
  std::ostringstream log, err;
  auto run = [&](const std::string& dir, std::size_t threads) {
    RunOptions opts;
    opts.scenario = (root / "scenario.json").string();
    opts.algos = {"brew", "brew_missing", "cre", "re", "macro_ext", "fho"};
    opts.repetitions = 4;
    opts.seed = 11;
    opts.stride = 50;
    opts.threads = threads;
    opts.out = (root / dir).string();
    return cmd_run(opts, log, err);
  };
  const int c1 = run("a", 1), c2 = run("b", 1), c3 = run("c", 4);
  o.fail_if(c1 != kExitOk || c2 != kExitOk || c3 != kExitOk, "cmd_run failed: " + err.str());
  if (o.pass) {
    for (const char* f : {"trace.csv", "summary.csv"}) {
      const auto a = slurp(root / "a" / f);
      o.fail_if(a.empty(), std::string(f) + " empty");
      o.fail_if(a != slurp(root / "b" / f), std::string(f) + " differs between identical runs");
      o.fail_if(a != slurp(root / "c" / f), std::string(f) + " differs between 1 and 4 threads");
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  const double secs = std::chrono::duration<double>(Clock::now() - suite_start).count();
  o.note(fmt("identical CSVs across runs and thread counts; suite elapsed %.1f s", secs));
  o.fail_if(!(secs < kSuiteLimitS), "suite slower than 15 min");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

bool criterion_selected(const std::string& filter, int id, const std::string& name) {
  if (filter.empty()) return true;
  std::stringstream ss(filter);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (tok.empty()) continue;
    if (tok == std::to_string(id)) return true;
    if (lower(name).find(lower(tok)) != std::string::npos) return true;
  }
  return false;
}

std::vector<CriterionResult> run_acceptance(const std::string& filter, std::size_t threads,
                                            std::ostream* progress) {
  const auto suite_start = Clock::now();
  const std::vector<Criterion> all{
      {1, "theorem1_bound", [&] { return theorem1_bound(threads); }},
      {2, "sublinearity", [&] { return sublinearity(threads); }},
      {3, "threshold_trap", [&] { return threshold_trap(threads); }},
      {4, "theorem2_delay", [&] { return theorem2_delay(threads); }},
      {5, "missing_unbiased", [] { return missing_unbiased(); }},
      {6, "theorem3_onoff", [&] { return theorem3_onoff(threads); }},
      {7, "re_equivalence", [&] { return re_equivalence(threads); }},
      {8, "cre_theorem5", [&] { return cre_theorem5(threads); }},
      {9, "simulator_sanity", [] { return simulator_sanity(); }},
      {10, "determinism", [&] { return determinism(suite_start); }},
  };
  std::vector<CriterionResult> results;
  for (const auto& c : all) {
    if (!criterion_selected(filter, c.id, c.name)) continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto start = Clock::now();
    try {
      const auto o = c.run();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (progress) *progress << format_criterion(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_criterion(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-17s %7.1fs  ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
  return head + r.detail;
}

}  // namespace udnmob

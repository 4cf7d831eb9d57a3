#pragma once

// Monte-Carlo experiment runner, regret measures, bound checks and CSV output.
//
// Regret against
//   fixed actions   always-on networks: learner cost minus the best column sum
//                   (the comparator pays no handover charge);
//   experts         on/off networks: every expert of a pool is replayed on the
//                   realized availability and losses, paying its own handovers;
//   contexts        CRE: the replay is split by the learner's previous action;
//   fallback SBSs   adaptive on/off adversary: "serve a if active, else the
//                   lowest active id", minimized over a.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "udnmob/experts.hpp"
#include "udnmob/policies.hpp"
#include "udnmob/scenario.hpp"

namespace udnmob {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- bounds ---------------------------------------------------------------

/// 2/B T^(2/3) + (B + B^-2) T^(1/3) + 1 with B = (4.5 N ln N)^(-1/3).
double brew_regret_bound(std::size_t n, std::uint64_t horizon);
/// Same with the leading coefficient (delay + 1); delay counts extra slots, and
/// delay 0 gives brew_regret_bound.
double delayed_brew_regret_bound(std::size_t n, std::uint64_t horizon, std::size_t delay);
/// 2 N sqrt(T N ln N).
double ranking_expert_bound(std::size_t n, std::uint64_t horizon);
/// 2 N^2 sqrt(T ln N).
double contextual_expert_bound(std::size_t n, std::uint64_t horizon);
/// T E_max / N, a lower bound on regret under the adaptive on/off adversary.
double onoff_regret_floor(std::size_t n, std::uint64_t horizon, double e_max);

struct BoundParams {
  std::size_t n = 2;
  std::uint64_t horizon = 1;
  std::size_t delay = 0;
  double e_max = 0.0;
};

struct BoundCheck {
  int theorem = 0;          // 1, 2, 3 (lower bound), 4, 5
  double bound = kNaN;
  double measured = kNaN;
  bool lower_bound = false;  // pass iff measured >= bound
  bool pass = false;
  double margin = kNaN;      // distance to the bound in the passing direction
};

/// theorem: 1 | 2 | 3 | 4 | 5.
BoundCheck check_bound(int theorem, const BoundParams& params, double measured);

// ---- expert pools and replays ----------------------------------------------

inline constexpr std::size_t kMaxReplayPool = 5040;

struct ExpertPool {
  std::size_t n = 0;
  /// experts[e][context] = index of a ranking in RankingTable(n).
  std::vector<std::vector<std::uint16_t>> experts;
  bool include_uniform = false;

  /// N! single-ranking experts.
  static ExpertPool basic_rankings(std::size_t n, bool include_uniform = true);
  /// (N!)^N per-previous-action ranking tuples; ConfigError past kMaxReplayPool.
  static ExpertPool full_rankings(std::size_t n, bool include_uniform = true);
  /// Expert a serves a when active, otherwise the lowest active id.
  static ExpertPool fixed_arms(std::size_t n);
  static ExpertPool single(const Ranking& ranking);

  std::size_t size() const noexcept { return experts.size() + (include_uniform ? 1 : 0); }
};

/// Index of `ranking` within all_rankings(n).
std::size_t ranking_index(const Ranking& ranking);

class ExpertReplay {
 public:
  /// initial_context plays the role of a_0 for context-dependent experts.
  ExpertReplay(ExpertPool pool, double handover_cost, SbsId initial_context);

  void step(SbsSet available, std::span<const double> energy_row);
  /// Per-expert cumulative costs; the uniform expert (expected cost) last.
  const std::vector<double>& costs() const noexcept { return cost_; }
  double min_cost() const;

 private:
  ExpertPool pool_;
  std::shared_ptr<const RankingTable> table_;
  double handover_cost_;
  std::vector<SbsId> previous_;
  std::vector<double> cost_;
  SbsSet previous_available_;
  bool first_ = true;
};

/// Per-context replay for CRE: context b collects the slots whose previous
/// learner action was b; every ranking (and the uniform expert) is charged a
/// handover when its recommendation differs from b.
class ContextualReplay {
 public:
  ContextualReplay(std::size_t n, double handover_cost, bool include_uniform = true);

  void step(SbsId context, SbsSet available, std::span<const double> energy_row,
            double learner_cost);
  double learner_cost(SbsId context) const { return learner_.at(context); }
  double min_expert_cost(SbsId context) const;
  /// Sum over contexts of the minimal expert cost.
  double comparator() const;
  double regret() const;

 private:
  std::size_t n_;
  double handover_cost_;
  bool include_uniform_;
  std::shared_ptr<const RankingTable> table_;
  std::vector<std::vector<double>> cost_;  // [context][ranking (+ uniform)]
  std::vector<double> learner_;
  bool first_ = true;
};

double fixed_action_regret(std::span<const SbsId> actions, const EnergyMatrix& energy,
                           double handover_cost);
double expert_regret(std::span<const SbsId> actions, std::span<const SbsSet> available,
                     const EnergyMatrix& energy, double handover_cost, const ExpertPool& pool,
                     SbsId initial_context);
double contextual_regret(std::span<const SbsId> actions, std::span<const SbsSet> available,
                         const EnergyMatrix& energy, double handover_cost, SbsId initial_context);

// ---- experiments ------------------------------------------------------------

enum class RegretKind { kNone, kFixedAction, kExpert, kContextual, kFallback };
const char* regret_kind_name(RegretKind k);

/// Measure used for a policy in a scenario (see the header comment).
RegretKind regret_kind_for(const PolicySpec& spec, const Scenario& scenario);

struct ExperimentSpec {
  std::string id = "experiment";
  Scenario scenario;
  std::vector<PolicySpec> policies;
  std::size_t repetitions = 20;
  std::uint64_t seed = 1;
  std::size_t stride = 100;
  std::size_t threads = 0;      // 0: hardware concurrency
  bool keep_actions = false;    // store a_1..a_T per repetition
  bool auto_bounds = true;
};

struct TraceRow {
  std::uint64_t t = 0;
  SbsId action = 0;
  double service_energy = 0.0;
  bool switched = false;
  double cum_cost = 0.0;
  double e_best_prefix = kNaN;
  double per_slot_regret = kNaN;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double service_cost = 0.0;
  std::size_t handovers = 0;
  double comparator = kNaN;
  double regret = kNaN;
  std::vector<TraceRow> rows;
  std::vector<SbsId> actions;
};

struct AlgoResult {
  PolicySpec spec;
  std::string label;
  RegretKind kind = RegretKind::kNone;
  std::vector<RepetitionResult> reps;
  double mean_regret = kNaN;
  double se_regret = kNaN;
  double mean_cost = kNaN;
  std::optional<BoundCheck> bound;
  std::vector<std::uint64_t> curve_t;
  std::vector<double> mean_cost_per_slot;
  std::vector<double> mean_regret_per_slot;
};

struct ExperimentResult {
  std::string id;
  Scenario scenario;
  std::vector<AlgoResult> algos;

  const AlgoResult& algo(const std::string& label) const;
};

/// Runs every (policy, repetition) pair on a worker pool. The loss matrix is
/// realized once from `seed`; repetition r uses seed + r for the learner and
/// the channel/availability streams, so results do not depend on scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Bound applied automatically to a policy, if any.
std::optional<int> auto_theorem(const PolicySpec& spec, const Scenario& scenario, RegretKind kind);

void write_trace_csv(std::ostream& out, const ExperimentResult& result, bool header = true);
void write_summary_csv(std::ostream& out, const ExperimentResult& result, bool header = true);

/// %.12g text for a double, "nan" for NaN.
std::string format_double(double x);

}  // namespace udnmob

#include "udnmob/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "udnmob/brew.hpp"
#include "udnmob/environments.hpp"

namespace udnmob {

// ---- bounds ---------------------------------------------------------------

namespace {

double batched_bound(std::size_t n, std::uint64_t horizon, double lead) {
  const double b = brew_b_n(n);
  const double T = static_cast<double>(horizon);
  return lead / b * std::pow(T, 2.0 / 3.0) + (b + 1.0 / (b * b)) * std::cbrt(T) + 1.0;
}

}  // namespace

double brew_regret_bound(std::size_t n, std::uint64_t horizon) {
  return batched_bound(n, horizon, 2.0);
}

double delayed_brew_regret_bound(std::size_t n, std::uint64_t horizon, std::size_t delay) {
  if (delay == 0) return brew_regret_bound(n, horizon);
  return batched_bound(n, horizon, static_cast<double>(delay) + 1.0);
}

double ranking_expert_bound(std::size_t n, std::uint64_t horizon) {
  const double N = static_cast<double>(n);
  return 2.0 * N * std::sqrt(static_cast<double>(horizon) * N * std::log(N));
}

double contextual_expert_bound(std::size_t n, std::uint64_t horizon) {
  const double N = static_cast<double>(n);
  return 2.0 * N * N * std::sqrt(static_cast<double>(horizon) * std::log(N));
}

double onoff_regret_floor(std::size_t n, std::uint64_t horizon, double e_max) {
  return static_cast<double>(horizon) * e_max / static_cast<double>(n);
}

BoundCheck check_bound(int theorem, const BoundParams& p, double measured) {
  BoundCheck c;
  c.theorem = theorem;
  c.measured = measured;
  switch (theorem) {
    case 1: c.bound = brew_regret_bound(p.n, p.horizon); break;
    case 2: c.bound = delayed_brew_regret_bound(p.n, p.horizon, p.delay); break;
    case 3:
      c.bound = onoff_regret_floor(p.n, p.horizon, p.e_max);
      c.lower_bound = true;
      break;
    case 4: c.bound = ranking_expert_bound(p.n, p.horizon); break;
    case 5: c.bound = contextual_expert_bound(p.n, p.horizon); break;
    default: throw ConfigError("no bound registered for theorem " + std::to_string(theorem));
  }
  c.margin = c.lower_bound ? measured - c.bound : c.bound - measured;
  c.pass = c.margin >= 0.0;  // false for NaN
  return c;
}

// ---- pools ----------------------------------------------------------------

std::size_t ranking_index(const Ranking& ranking) {
  const auto order = ranking.order();
  const std::size_t n = order.size();
  std::vector<bool> used(n, false);
  std::size_t index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (SbsId b = 0; b < order[i]; ++b) smaller += used[b] ? 0 : 1;
    index += smaller * static_cast<std::size_t>(factorial(n - 1 - i));
    used[order[i]] = true;
  }
  return index;
}

ExpertPool ExpertPool::basic_rankings(std::size_t n, bool include_uniform) {
  if (n < 1 || n > 7) throw ConfigError("ranking replays support 1 <= N <= 7");
  ExpertPool p;
  p.n = n;
  p.include_uniform = include_uniform;
  const auto count = static_cast<std::size_t>(factorial(n));
  for (std::size_t r = 0; r < count; ++r) {
    p.experts.emplace_back(n, static_cast<std::uint16_t>(r));
  }
  return p;
}

ExpertPool ExpertPool::full_rankings(std::size_t n, bool include_uniform) {
  if (n < 1 || n > 7) throw ConfigError("ranking replays support 1 <= N <= 7");
  const auto r = static_cast<std::size_t>(factorial(n));
  std::size_t count = 1;
  for (std::size_t c = 0; c < n; ++c) {
    count *= r;
    if (count > kMaxReplayPool) {
      throw ConfigError("full ranking pool exceeds " + std::to_string(kMaxReplayPool) +
                        " experts; use the factored RE learner with the basic ranking pool");
    }
  }
  ExpertPool p;
  p.n = n;
  p.include_uniform = include_uniform;
  for (std::size_t e = 0; e < count; ++e) {
    std::vector<std::uint16_t> tuple(n);
    std::size_t rest = e;
    for (std::size_t c = n; c-- > 0;) {  // context 0 is the most significant digit
      tuple[c] = static_cast<std::uint16_t>(rest % r);
      rest /= r;
    }
    p.experts.push_back(std::move(tuple));
  }
  return p;
}

ExpertPool ExpertPool::fixed_arms(std::size_t n) {
  if (n < 1 || n > 7) throw ConfigError("ranking replays support 1 <= N <= 7");
  ExpertPool p;
  p.n = n;
  for (SbsId a = 0; a < n; ++a) {
    std::vector<SbsId> order{a};
    for (SbsId b = 0; b < n; ++b) {
      if (b != a) order.push_back(b);
    }
    p.experts.emplace_back(n, static_cast<std::uint16_t>(ranking_index(Ranking(order))));
  }
  return p;
}

ExpertPool ExpertPool::single(const Ranking& ranking) {
  ExpertPool p;
  p.n = ranking.size();
  if (p.n < 1 || p.n > 7) throw ConfigError("ranking replays support 1 <= N <= 7");
  p.experts.emplace_back(p.n, static_cast<std::uint16_t>(ranking_index(ranking)));
  return p;
}

// ---- replays --------------------------------------------------------------

namespace {

double mean_active(SbsSet available, std::span<const double> row) {
  double s = 0.0;
  for (SbsId a : available.ids()) s += row[a];
  return s / static_cast<double>(available.size());
}

}  // namespace

ExpertReplay::ExpertReplay(ExpertPool pool, double handover_cost, SbsId initial_context)
    : pool_(std::move(pool)),
      table_(std::make_shared<RankingTable>(pool_.n)),
      handover_cost_(handover_cost),
      previous_(pool_.experts.size(), initial_context),
      cost_(pool_.size(), 0.0) {
  if (initial_context >= pool_.n) throw std::domain_error("initial context out of range");
}

void ExpertReplay::step(SbsSet available, std::span<const double> row) {
  for (std::size_t e = 0; e < pool_.experts.size(); ++e) {
    const SbsId rec = table_->recommend(pool_.experts[e][previous_[e]], available);
    cost_[e] += row[rec] + ((!first_ && rec != previous_[e]) ? handover_cost_ : 0.0);
    previous_[e] = rec;
  }
  if (pool_.include_uniform) {
    double c = mean_active(available, row);
    if (!first_) {
      const double overlap = static_cast<double>(
          SbsSet::from_bits(available.bits() & previous_available_.bits()).size());
      const double stay = overlap / static_cast<double>(available.size() * previous_available_.size());
      c += handover_cost_ * (1.0 - stay);
    }
    cost_.back() += c;
    previous_available_ = available;
  }
  first_ = false;
}

double ExpertReplay::min_cost() const { return *std::min_element(cost_.begin(), cost_.end()); }

ContextualReplay::ContextualReplay(std::size_t n, double handover_cost, bool include_uniform)
    : n_(n),
      handover_cost_(handover_cost),
      include_uniform_(include_uniform),
      table_(std::make_shared<RankingTable>(n)),
      cost_(n, std::vector<double>(table_->size() + (include_uniform ? 1 : 0), 0.0)),
      learner_(n, 0.0) {}

void ContextualReplay::step(SbsId context, SbsSet available, std::span<const double> row,
                            double learner_cost) {
  if (context >= n_) throw std::domain_error("context out of range");
  learner_[context] += learner_cost;
  auto& c = cost_[context];
  for (std::size_t r = 0; r < table_->size(); ++r) {
    const SbsId rec = table_->recommend(r, available);
    c[r] += row[rec] + ((!first_ && rec != context) ? handover_cost_ : 0.0);
  }
  if (include_uniform_) {
    double u = mean_active(available, row);
    if (!first_) {
      const double stay = available.contains(context) ? 1.0 / static_cast<double>(available.size()) : 0.0;
      u += handover_cost_ * (1.0 - stay);
    }
    c.back() += u;
  }
  first_ = false;
}

double ContextualReplay::min_expert_cost(SbsId context) const {
  const auto& c = cost_.at(context);
  return *std::min_element(c.begin(), c.end());
}

double ContextualReplay::comparator() const {
  double s = 0.0;
  for (SbsId b = 0; b < n_; ++b) s += min_expert_cost(b);
  return s;
}

double ContextualReplay::regret() const {
  return std::accumulate(learner_.begin(), learner_.end(), 0.0) - comparator();
}

namespace {

double learner_total(std::span<const SbsId> actions, const EnergyMatrix& energy, double es) {
  double cost = 0.0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    cost += energy.at(t, actions[t]) + ((t > 0 && actions[t] != actions[t - 1]) ? es : 0.0);
  }
  return cost;
}

void check_lengths(std::span<const SbsId> actions, std::size_t avail, const EnergyMatrix& energy) {
  if (actions.size() != avail || actions.size() > energy.slots()) {
    throw std::domain_error("action, availability and energy lengths disagree");
  }
}

}  // namespace

double fixed_action_regret(std::span<const SbsId> actions, const EnergyMatrix& energy,
                           double handover_cost) {
  if (actions.size() > energy.slots()) throw std::domain_error("more actions than slots");
  std::vector<double> col(energy.arms(), 0.0);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    for (SbsId a = 0; a < energy.arms(); ++a) col[a] += energy.at(t, a);
  }
  return learner_total(actions, energy, handover_cost) - *std::min_element(col.begin(), col.end());
}

double expert_regret(std::span<const SbsId> actions, std::span<const SbsSet> available,
                     const EnergyMatrix& energy, double handover_cost, const ExpertPool& pool,
                     SbsId initial_context) {
  check_lengths(actions, available.size(), energy);
  ExpertReplay replay(pool, handover_cost, initial_context);
  for (std::size_t t = 0; t < actions.size(); ++t) replay.step(available[t], energy.row(t));
  return learner_total(actions, energy, handover_cost) - replay.min_cost();
}

double contextual_regret(std::span<const SbsId> actions, std::span<const SbsSet> available,
                         const EnergyMatrix& energy, double handover_cost, SbsId initial_context) {
  check_lengths(actions, available.size(), energy);
  ContextualReplay replay(energy.arms(), handover_cost);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const SbsId context = t == 0 ? initial_context : actions[t - 1];
    const double cost =
        energy.at(t, actions[t]) + ((t > 0 && actions[t] != actions[t - 1]) ? handover_cost : 0.0);
    replay.step(context, available[t], energy.row(t), cost);
  }
  return replay.regret();
}

// ---- experiments ------------------------------------------------------------

const char* regret_kind_name(RegretKind k) {
  switch (k) {
    case RegretKind::kNone: return "none";
    case RegretKind::kFixedAction: return "fixed_action";
    case RegretKind::kExpert: return "expert";
    case RegretKind::kContextual: return "contextual";
    case RegretKind::kFallback: return "fallback";
  }
  return "none";
}

RegretKind regret_kind_for(const PolicySpec& spec, const Scenario& s) {
  const bool small = s.n <= 7;
  if (s.availability.mode == AvailabilityMode::kAdaptive) {
    return small ? RegretKind::kFallback : RegretKind::kNone;
  }
  if (spec.algo == "cre") return RegretKind::kContextual;
  if (spec.algo == "re") return RegretKind::kExpert;
  if (s.availability.mode == AvailabilityMode::kAlwaysOn) return RegretKind::kFixedAction;
  return small ? RegretKind::kExpert : RegretKind::kNone;
}

namespace {

bool full_pool_fits(std::size_t n) {
  if (n > 7) return false;
  const auto r = static_cast<double>(factorial(n));
  return std::pow(r, static_cast<double>(n)) <= static_cast<double>(kMaxReplayPool);
}

/// Pool for expert regret: full tuples for RE when they fit (or when asked).
std::optional<ExpertPool> pool_for(const PolicySpec& spec, const Scenario& s, RegretKind kind) {
  if (kind == RegretKind::kFallback) return ExpertPool::fixed_arms(s.n);
  if (kind != RegretKind::kExpert) return std::nullopt;
  std::string which = spec.algo == "re" && full_pool_fits(s.n) ? "full" : "basic";
  if (auto it = spec.params.find("regret_pool"); it != spec.params.end()) which = it->second;
  if (which == "full") return ExpertPool::full_rankings(s.n);
  if (which == "basic") return ExpertPool::basic_rankings(s.n);
  throw ConfigError("regret_pool must be basic or full");
}

bool uses_full_pool(const PolicySpec& spec, const Scenario& s) {
  auto it = spec.params.find("regret_pool");
  if (it != spec.params.end()) return it->second == "full";
  return spec.algo == "re" && full_pool_fits(s.n);
}

struct Tracker {
  RegretKind kind;
  std::vector<double> columns;
  std::optional<ExpertReplay> replay;
  std::optional<ContextualReplay> contextual;

  double comparator() const {
    switch (kind) {
      case RegretKind::kFixedAction: return *std::min_element(columns.begin(), columns.end());
      case RegretKind::kExpert:
      case RegretKind::kFallback: return replay ? replay->min_cost() : kNaN;
      case RegretKind::kContextual: return contextual->comparator();
      case RegretKind::kNone: return kNaN;
    }
    return kNaN;
  }
};

RepetitionResult run_repetition(const ExperimentSpec& spec, const Realization& real,
                                const PolicySpec& pspec, RegretKind kind,
                                const std::optional<ExpertPool>& pool, std::size_t rep) {
  const Scenario& s = spec.scenario;
  const EnergyMatrix& energy = *real.energy;
  const std::uint64_t T = s.horizon;
  RepetitionResult out;
  out.seed = spec.seed + rep;

  Environment env(real.energy, real.measurement, s.environment_options(), spec.seed, rep);
  auto policy = make_policy(pspec, s, RngStream(out.seed, stream_id_for(pspec.algo)));
  const std::optional<SbsId> a0 = policy->initial_context();

  Tracker tr{kind, {}, std::nullopt, std::nullopt};
  if (kind == RegretKind::kFixedAction) tr.columns.assign(s.n, 0.0);
  if (kind == RegretKind::kContextual) tr.contextual.emplace(s.n, s.handover_cost);
  if (spec.keep_actions) out.actions.reserve(static_cast<std::size_t>(T));
  out.rows.reserve(static_cast<std::size_t>(T / spec.stride + 1));

  for (std::uint64_t t = 1; t <= T; ++t) {
    const SbsSet available = env.available();
    const std::optional<SbsId> previous = env.previous();
    const SbsId a = policy->select(SlotContext{t, available, env.measurements(), previous});
    const StepResult res = env.step(a);
    policy->observe(res.feedback);

    const auto row = energy.row(static_cast<std::size_t>(t - 1));
    const double cost = res.cost.total();
    out.total_cost += cost;
    out.service_cost += res.cost.service.value();
    out.handovers += res.cost.switched ? 1 : 0;
    if (spec.keep_actions) out.actions.push_back(a);

    switch (kind) {
      case RegretKind::kFixedAction:
        for (SbsId b = 0; b < s.n; ++b) tr.columns[b] += row[b];
        break;
      case RegretKind::kExpert:
      case RegretKind::kFallback:
        if (!tr.replay) tr.replay.emplace(*pool, s.handover_cost, a0.value_or(a));
        tr.replay->step(available, row);
        break;
      case RegretKind::kContextual:
        tr.contextual->step(previous.value_or(a0.value_or(a)), available, row, cost);
        break;
      case RegretKind::kNone:
        break;
    }

    if (t % spec.stride == 0 || t == T) {
      TraceRow r;
      r.t = t;
      r.action = a;
      r.service_energy = res.cost.service.value();
      r.switched = res.cost.switched;
      r.cum_cost = out.total_cost;
      r.e_best_prefix = tr.comparator();
      r.per_slot_regret = (out.total_cost - r.e_best_prefix) / static_cast<double>(t);
      out.rows.push_back(r);
    }
  }
  policy->finish();
  out.comparator = tr.comparator();
  out.regret = out.total_cost - out.comparator;
  return out;
}

void aggregate(AlgoResult& r) {
  const auto R = static_cast<double>(r.reps.size());
  double sum = 0.0, cost = 0.0;
  for (const auto& rep : r.reps) {
    sum += rep.regret;
    cost += rep.total_cost;
  }
  r.mean_regret = sum / R;
  r.mean_cost = cost / R;
  double ss = 0.0;
  for (const auto& rep : r.reps) ss += (rep.regret - r.mean_regret) * (rep.regret - r.mean_regret);
  r.se_regret = r.reps.size() > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;

  const auto& first = r.reps.front().rows;
  r.curve_t.resize(first.size());
  r.mean_cost_per_slot.assign(first.size(), 0.0);
  r.mean_regret_per_slot.assign(first.size(), 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    r.curve_t[i] = first[i].t;
    for (const auto& rep : r.reps) {
      r.mean_cost_per_slot[i] += rep.rows[i].cum_cost / static_cast<double>(first[i].t);
      r.mean_regret_per_slot[i] += rep.rows[i].per_slot_regret;
    }
    r.mean_cost_per_slot[i] /= R;
    r.mean_regret_per_slot[i] /= R;
  }
}

}  // namespace

std::optional<int> auto_theorem(const PolicySpec& spec, const Scenario& s, RegretKind kind) {
  if (kind == RegretKind::kFallback) return 3;
  if (s.raw_units) return std::nullopt;
  if (spec.algo == "re" && kind == RegretKind::kExpert && uses_full_pool(spec, s)) return 4;
  if (spec.algo == "cre" && kind == RegretKind::kContextual) return 5;
  if (spec.algo == "brew" && kind == RegretKind::kFixedAction && s.p_miss == 0.0 &&
      !spec.has("gamma") && (!spec.has("tau") || spec.params.at("tau") == "auto")) {
    if (s.delay == 0) return 1;
    if (s.delay < brew_batch_length(s.n, s.horizon)) return 2;
  }
  return std::nullopt;
}

const AlgoResult& ExperimentResult::algo(const std::string& label) const {
  for (const auto& a : algos) {
    if (a.label == label) return a;
  }
  throw std::out_of_range("no algorithm labelled '" + label + "'");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.scenario.validate();
  if (spec.policies.empty()) throw ConfigError("no algorithms to run");
  if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (spec.stride < 1) throw ConfigError("stride must be >= 1");

  ExperimentResult result;
  result.id = spec.id;
  result.scenario = spec.scenario;
  std::vector<std::optional<ExpertPool>> pools;
  for (const auto& p : spec.policies) {
    make_policy(p, spec.scenario, RngStream(0, 0));  // surface config errors before any work
    AlgoResult a;
    a.spec = p;
    a.label = p.label();
    for (const auto& other : result.algos) {
      if (other.label == a.label) throw ConfigError("duplicate algorithm label '" + a.label + "'");
    }
    a.kind = regret_kind_for(p, spec.scenario);
    a.reps.resize(spec.repetitions);
    pools.push_back(pool_for(p, spec.scenario, a.kind));
    result.algos.push_back(std::move(a));
  }

  const Realization real = realize(spec.scenario, spec.seed);
  const std::size_t jobs = spec.policies.size() * spec.repetitions;
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs;) {
      const std::size_t p = j / spec.repetitions;
      const std::size_t r = j % spec.repetitions;
      try {
        result.algos[p].reps[r] =
            run_repetition(spec, real, spec.policies[p], result.algos[p].kind, pools[p], r);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const BoundParams bp{spec.scenario.n, spec.scenario.horizon, spec.scenario.delay,
                       spec.scenario.e_max()};
  for (auto& a : result.algos) {
    aggregate(a);
    if (spec.auto_bounds) {
      if (auto th = auto_theorem(a.spec, spec.scenario, a.kind)) {
        a.bound = check_bound(*th, bp, a.mean_regret);
      }
    }
  }
  return result;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_trace_csv(std::ostream& out, const ExperimentResult& result, bool header) {
  if (header) {
    out << "experiment_id,algo,seed,t,action,service_energy,switched,cum_cost,e_best_prefix,"
           "per_slot_regret\n";
  }
  for (const auto& a : result.algos) {
    for (const auto& rep : a.reps) {
      for (const auto& r : rep.rows) {
        out << result.id << ',' << a.label << ',' << rep.seed << ',' << r.t << ',' << r.action
            << ',' << format_double(r.service_energy) << ',' << (r.switched ? 1 : 0) << ','
            << format_double(r.cum_cost) << ',' << format_double(r.e_best_prefix) << ','
            << format_double(r.per_slot_regret) << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result, bool header) {
  if (header) out << "experiment_id,algo,T,mean_regret,se,bound,pass\n";
  for (const auto& a : result.algos) {
    out << result.id << ',' << a.label << ',' << result.scenario.horizon << ','
        << format_double(a.mean_regret) << ',' << format_double(a.se_regret) << ','
        << format_double(a.bound ? a.bound->bound : kNaN) << ','
        << (a.bound ? (a.bound->pass ? "1" : "0") : "") << '\n';
  }
}

}  // namespace udnmob

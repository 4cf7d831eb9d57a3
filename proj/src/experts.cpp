#include "udnmob/experts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "udnmob/ew_core.hpp"

namespace udnmob {

Ranking::Ranking(std::vector<SbsId> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (SbsId a : order_) {
    if (a >= order_.size() || seen[a]) throw ConfigError("ranking is not a permutation");
    seen[a] = true;
  }
}

Ranking Ranking::identity(std::size_t n) {
  std::vector<SbsId> order(n);
  std::iota(order.begin(), order.end(), SbsId{0});
  return Ranking(std::move(order));
}

SbsId Ranking::recommend(SbsSet available) const {
  for (SbsId a : order_) {
    if (available.contains(a)) return a;
  }
  throw std::domain_error("ranking_recommend: no active SBS");
}

SbsId ranking_recommend(const Ranking& ranking, SbsSet available) {
  return ranking.recommend(available);
}

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<Ranking> all_rankings(std::size_t n) {
  std::vector<SbsId> order(n);
  std::iota(order.begin(), order.end(), SbsId{0});
  std::vector<Ranking> out;
  out.reserve(factorial(n));
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

RankingTable::RankingTable(std::size_t n)
    : n_(n), masks_(std::size_t{1} << n), rankings_(all_rankings(n)) {
  if (n < 1 || n > 7) throw ConfigError("ranking tables support 1 <= N <= 7");
  rec_.assign(rankings_.size() * masks_, 0);
  for (std::size_t r = 0; r < rankings_.size(); ++r) {
    const auto order = rankings_[r].order();
    for (std::size_t m = 1; m < masks_; ++m) {
      for (SbsId a : order) {
        if ((m >> a) & 1U) {
          rec_[r * masks_ + m] = static_cast<std::uint8_t>(a);
          break;
        }
      }
    }
  }
}

double log_one_plus_full_pool(std::size_t n) {
  const double log_fact = std::lgamma(static_cast<double>(n) + 1.0);
  const double log_ne = static_cast<double>(n) * log_fact;
  return log_ne + std::log1p(std::exp(-log_ne));
}

double gamma_ranking_experts(std::size_t t, std::size_t n) {
  return std::sqrt(log_one_plus_full_pool(n) / (static_cast<double>(t) * static_cast<double>(n)));
}

double gamma_contextual(std::size_t k, std::size_t n) {
  const double pool = static_cast<double>(factorial(n)) + 1.0;
  return std::sqrt(std::log(pool) / (static_cast<double>(k) * static_cast<double>(n)));
}

namespace {

void check_context(SbsId previous, SbsSet available, std::size_t n) {
  if (previous >= n) throw std::domain_error("previous action out of range");
  if (available.empty()) throw std::domain_error("no active SBS");
  if ((available.bits() >> n) != 0) throw std::domain_error("active set exceeds N");
}

double estimate(double observed, double p_executed) {
  if (!(p_executed > 0.0)) throw std::logic_error("executed action had zero probability");
  return observed / p_executed;
}

}  // namespace

// ---- naive --------------------------------------------------------------

NaiveRankingExperts::NaiveRankingExperts(std::size_t n) : table_(n) {
  if (n > kMaxArms) throw ConfigError("naive ranking experts require N <= 4");
  std::size_t pool = 1;
  for (std::size_t c = 0; c < n; ++c) pool *= table_.size();
  cum_loss_.assign(pool + 1, 0.0);
}

std::size_t NaiveRankingExperts::ranking_of(std::size_t expert, SbsId context) const {
  // Digits in base N!, context 0 most significant: lexicographic tuple order.
  const std::size_t r = table_.size();
  std::size_t stride = 1;
  for (std::size_t c = context + 1; c < table_.arms(); ++c) stride *= r;
  return (expert / stride) % r;
}

std::vector<double> NaiveRankingExperts::expert_weights() const {
  return softmin_probabilities(cum_loss_, gamma_);
}

std::vector<double> NaiveRankingExperts::action_distribution(SbsId previous,
                                                             SbsSet available) const {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const auto q = expert_weights();
  std::vector<double> p(n, q.back() / static_cast<double>(n));
  for (std::size_t e = 0; e + 1 < q.size(); ++e) {
    p[table_.recommend(ranking_of(e, previous), available)] += q[e];
  }
  return p;
}

void NaiveRankingExperts::update(SbsId previous, SbsSet available, SbsId executed,
                                 double observed, double p_executed) {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const double x = estimate(observed, p_executed);
  for (std::size_t e = 0; e + 1 < cum_loss_.size(); ++e) {
    if (table_.recommend(ranking_of(e, previous), available) == executed) cum_loss_[e] += x;
  }
  cum_loss_.back() += x / static_cast<double>(n);
  ++t_;
  gamma_ = gamma_ranking_experts(t_, n);
}

double NaiveRankingExperts::uniform_weight(SbsId) const { return expert_weights().back(); }

// ---- factored -----------------------------------------------------------

FactoredRankingExperts::FactoredRankingExperts(std::size_t n) : table_(n) {
  if (n > kMaxArms) throw ConfigError("factored ranking experts require N <= 7");
  ctx_loss_.assign(n, std::vector<double>(table_.size(), 0.0));
}

double FactoredRankingExperts::ranking_mass() const {
  // log of sum over expert tuples of prod_c exp(-gamma M_c[sigma_c])
  double log_rank = 0.0;
  for (const auto& m : ctx_loss_) log_rank += log_sum_exp_neg(m, gamma_);
  const double log_unif = -gamma_ * unif_loss_;
  return 1.0 / (1.0 + std::exp(log_unif - log_rank));
}

double FactoredRankingExperts::uniform_weight(SbsId) const { return 1.0 - ranking_mass(); }

std::vector<double> FactoredRankingExperts::context_table(SbsId context) const {
  return softmin_probabilities(ctx_loss_.at(context), gamma_);
}

std::vector<double> FactoredRankingExperts::action_distribution(SbsId previous,
                                                                SbsSet available) const {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const double w_rank = ranking_mass();
  const double w_unif = 1.0 - w_rank;
  const auto table = context_table(previous);
  std::vector<double> p(n, w_unif / static_cast<double>(n));
  for (std::size_t r = 0; r < table.size(); ++r) {
    p[table_.recommend(r, available)] += w_rank * table[r];
  }
  return p;
}

void FactoredRankingExperts::update(SbsId previous, SbsSet available, SbsId executed,
                                    double observed, double p_executed) {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const double x = estimate(observed, p_executed);
  auto& m = ctx_loss_[previous];
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (table_.recommend(r, available) == executed) m[r] += x;
  }
  unif_loss_ += x / static_cast<double>(n);
  ++t_;
  gamma_ = gamma_ranking_experts(t_, n);
}

// ---- contextual ---------------------------------------------------------

ContextualRankingExperts::ContextualRankingExperts(std::size_t n) : table_(n) {
  if (n > kMaxArms) throw ConfigError("contextual ranking experts require N <= 7");
  contexts_.assign(n, Context{std::vector<double>(table_.size() + 1, 0.0), 1, 0.0});
}

std::vector<double> ContextualRankingExperts::expert_weights(SbsId context) const {
  const auto& c = contexts_.at(context);
  return softmin_probabilities(c.cum_loss, c.gamma);
}

double ContextualRankingExperts::uniform_weight(SbsId previous) const {
  return expert_weights(previous).back();
}

std::vector<double> ContextualRankingExperts::action_distribution(SbsId previous,
                                                                  SbsSet available) const {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const auto q = expert_weights(previous);
  std::vector<double> p(n, q.back() / static_cast<double>(n));
  for (std::size_t r = 0; r + 1 < q.size(); ++r) {
    p[table_.recommend(r, available)] += q[r];
  }
  return p;
}

void ContextualRankingExperts::update(SbsId previous, SbsSet available, SbsId executed,
                                      double observed, double p_executed) {
  const std::size_t n = arms();
  check_context(previous, available, n);
  const double x = estimate(observed, p_executed);
  auto& c = contexts_[previous];
  for (std::size_t r = 0; r + 1 < c.cum_loss.size(); ++r) {
    if (table_.recommend(r, available) == executed) c.cum_loss[r] += x;
  }
  c.cum_loss.back() += x / static_cast<double>(n);
  c.gamma = gamma_contextual(c.kappa, n);
  ++c.kappa;
}

// ---- policy -------------------------------------------------------------

RankingExpertPolicy::RankingExpertPolicy(std::string name, std::unique_ptr<ExpertMixture> mixture,
                                         RngStream rng)
    : name_(std::move(name)), mixture_(std::move(mixture)), rng_(rng) {
  initial_ = rng_.uniform_index(mixture_->arms());
}

SbsId RankingExpertPolicy::select(const SlotContext& ctx) {
  const SbsId previous = ctx.previous.value_or(initial_);
  last_p_ = mixture_->action_distribution(previous, ctx.available);
  SbsId a = rng_.categorical(last_p_);
  if (!ctx.available.contains(a)) a = rng_.uniform_member(ctx.available);
  pending_[ctx.t] = Pending{previous, ctx.available, a, last_p_[a]};
  return a;
}

void RankingExpertPolicy::observe(std::span<const FeedbackEvent> events) {
  for (const auto& ev : events) {
    auto it = pending_.find(ev.origin_slot);
    if (it == pending_.end()) continue;
    const Pending& p = it->second;
    mixture_->update(p.previous, p.available, p.executed, ev.observed, p.p_executed);
    pending_.erase(it);
  }
  // Slots whose feedback was dropped never resolve; keep the map bounded.
  while (pending_.size() > 4096) pending_.erase(pending_.begin());
}

}  // namespace udnmob

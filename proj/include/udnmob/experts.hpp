#pragma once

// Ranking experts for SBSs that switch on and off.
//
// A ranking recommends its best-ranked active SBS. A ranking expert holds one
// ranking per previous action, so the full pool has (N!)^N members; a
// uniform expert is added that recommends every SBS with probability 1/N.
// The learner mixes expert advice with EXP4 weights.
//
// Three weight stores are provided:
//  * NaiveRankingExperts enumerates every expert tuple (N <= 4).
//  * FactoredRankingExperts exploits that an expert's estimated loss is a
//    sum of per-context terms: the product-form weights marginalize to one
//    softmax table per previous action, giving the same action distribution
//    with N * N! state (N <= 7).
//  * ContextualRankingExperts runs an independent EXP4 instance over basic
//    rankings for each previous action, clocked by that context's visit count.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "udnmob/core.hpp"
#include "udnmob/policy.hpp"

namespace udnmob {

class Ranking {
 public:
  /// order[0] is the most preferred SBS; must be a permutation of 0..n-1.
  explicit Ranking(std::vector<SbsId> order);
  static Ranking identity(std::size_t n);

  SbsId recommend(SbsSet available) const;
  std::span<const SbsId> order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }

  friend bool operator==(const Ranking&, const Ranking&) = default;

 private:
  std::vector<SbsId> order_;
};

SbsId ranking_recommend(const Ranking& ranking, SbsSet available);

std::uint64_t factorial(std::size_t n);

/// All permutations of 0..n-1 in lexicographic order.
std::vector<Ranking> all_rankings(std::size_t n);

/// Recommendation lookup for every (ranking, active-set) pair, n <= 7.
class RankingTable {
 public:
  explicit RankingTable(std::size_t n);

  std::size_t arms() const noexcept { return n_; }
  std::size_t size() const noexcept { return rankings_.size(); }
  const Ranking& ranking(std::size_t r) const { return rankings_.at(r); }
  SbsId recommend(std::size_t r, SbsSet available) const {
    return rec_[r * masks_ + static_cast<std::size_t>(available.bits())];
  }

 private:
  std::size_t n_;
  std::size_t masks_;
  std::vector<Ranking> rankings_;
  std::vector<std::uint8_t> rec_;
};

/// Expert-advice weight store driving one learner.
class ExpertMixture {
 public:
  virtual ~ExpertMixture() = default;

  virtual std::size_t arms() const = 0;
  /// p_a(t) = sum_e q_e delta^e_a for the given previous action and active set.
  virtual std::vector<double> action_distribution(SbsId previous, SbsSet available) const = 0;
  /// Importance-weighted EXP4 step; p_executed is p_a(t) of the executed action.
  virtual void update(SbsId previous, SbsSet available, SbsId executed, double observed,
                      double p_executed) = 0;
  /// Current weight of the uniform expert for the given context.
  virtual double uniform_weight(SbsId previous) const = 0;
};

/// ln(1 + (N!)^N) without overflow.
double log_one_plus_full_pool(std::size_t n);

/// gamma_t = sqrt(ln(1 + N_E) / (t N)) with N_E = (N!)^N.
double gamma_ranking_experts(std::size_t t, std::size_t n);

/// gamma_k = sqrt(ln(N! + 1) / (k N)).
double gamma_contextual(std::size_t k, std::size_t n);

class NaiveRankingExperts final : public ExpertMixture {
 public:
  static constexpr std::size_t kMaxArms = 4;

  explicit NaiveRankingExperts(std::size_t n);

  std::size_t arms() const override { return table_.arms(); }
  std::vector<double> action_distribution(SbsId previous, SbsSet available) const override;
  void update(SbsId previous, SbsSet available, SbsId executed, double observed,
              double p_executed) override;
  double uniform_weight(SbsId previous) const override;

  /// Number of experts including Unif: (N!)^N + 1.
  std::size_t pool_size() const noexcept { return cum_loss_.size(); }
  /// Current expert weights q_e; the last entry is Unif.
  std::vector<double> expert_weights() const;
  /// Ranking index used by expert e after previous action c.
  std::size_t ranking_of(std::size_t expert, SbsId context) const;

 private:
  RankingTable table_;
  std::vector<double> cum_loss_;
  std::size_t t_ = 0;
  double gamma_ = 0.0;
};

class FactoredRankingExperts final : public ExpertMixture {
 public:
  static constexpr std::size_t kMaxArms = 7;

  explicit FactoredRankingExperts(std::size_t n);

  std::size_t arms() const override { return table_.arms(); }
  std::vector<double> action_distribution(SbsId previous, SbsSet available) const override;
  void update(SbsId previous, SbsSet available, SbsId executed, double observed,
              double p_executed) override;
  double uniform_weight(SbsId previous) const override;

  /// Softmax over rankings for one context (the marginal of q over that context's ranking).
  std::vector<double> context_table(SbsId context) const;
  /// Total weight carried by ranking experts (1 - q_Unif).
  double ranking_mass() const;

 private:
  RankingTable table_;
  std::vector<std::vector<double>> ctx_loss_;  // [context][ranking]
  double unif_loss_ = 0.0;
  std::size_t t_ = 0;
  double gamma_ = 0.0;
};

class ContextualRankingExperts final : public ExpertMixture {
 public:
  static constexpr std::size_t kMaxArms = 7;

  explicit ContextualRankingExperts(std::size_t n);

  std::size_t arms() const override { return table_.arms(); }
  std::vector<double> action_distribution(SbsId previous, SbsSet available) const override;
  void update(SbsId previous, SbsSet available, SbsId executed, double observed,
              double p_executed) override;
  double uniform_weight(SbsId previous) const override;

  /// kappa(x): 1 before the first visit, k + 1 after k visits.
  std::size_t kappa(SbsId context) const { return contexts_.at(context).kappa; }
  /// q_{.,x}: weights over basic rankings followed by Unif.
  std::vector<double> expert_weights(SbsId context) const;

 private:
  struct Context {
    std::vector<double> cum_loss;  // rankings then Unif
    std::size_t kappa = 1;
    double gamma = 0.0;
  };

  RankingTable table_;
  std::vector<Context> contexts_;
};

/// RE / CRE learner on the slot protocol.
///
/// A sampled SBS that is switched off (possible only through the uniform
/// expert's mass) is replaced by a uniform draw from the active set; the
/// update credits the executed SBS.
class RankingExpertPolicy final : public Policy {
 public:
  RankingExpertPolicy(std::string name, std::unique_ptr<ExpertMixture> mixture, RngStream rng);

  std::string name() const override { return name_; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::optional<SbsId> initial_context() const override { return initial_; }

  const ExpertMixture& mixture() const noexcept { return *mixture_; }
  /// Action distribution used at the most recent slot.
  const std::vector<double>& last_distribution() const noexcept { return last_p_; }

 private:
  struct Pending {
    SbsId previous;
    SbsSet available;
    SbsId executed;
    double p_executed;
  };

  std::string name_;
  std::unique_ptr<ExpertMixture> mixture_;
  RngStream rng_;
  SbsId initial_;
  std::vector<double> last_p_;
  std::map<std::uint64_t, Pending> pending_;
};

}  // namespace udnmob

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "udnmob/experts.hpp"

using namespace udnmob;

namespace {

// Reference EXP4 over an explicit expert list. Each expert maps (previous,
// active set) to an SBS; the uniform expert is the last one and spreads 1/N.
struct ReferenceExp4 {
  std::size_t n;
  std::vector<std::vector<std::vector<SbsId>>> rankings;  // [expert][context] -> order
  std::vector<double> loss;                               // rankings then uniform
  double log_pool;
  std::size_t t = 0;

  static SbsId top(const std::vector<SbsId>& order, SbsSet avail) {
    for (SbsId a : order) {
      if (avail.contains(a)) return a;
    }
    return order.front();
  }

  double gamma() const { return t == 0 ? 0.0 : std::sqrt(log_pool / (double(t) * double(n))); }

  std::vector<double> weights() const {
    const double g = gamma();
    const double m = *std::min_element(loss.begin(), loss.end());
    std::vector<double> q(loss.size());
    double z = 0.0;
    for (std::size_t e = 0; e < loss.size(); ++e) z += q[e] = std::exp(-g * (loss[e] - m));
    for (double& x : q) x /= z;
    return q;
  }

  std::vector<double> distribution(SbsId prev, SbsSet avail) const {
    const auto q = weights();
    std::vector<double> p(n, q.back() / double(n));
    for (std::size_t e = 0; e + 1 < q.size(); ++e) p[top(rankings[e][prev], avail)] += q[e];
    return p;
  }

  void update(SbsId prev, SbsSet avail, SbsId executed, double observed, double p_exec) {
    const double x = observed / p_exec;
    for (std::size_t e = 0; e + 1 < loss.size(); ++e) {
      if (top(rankings[e][prev], avail) == executed) loss[e] += x;
    }
    loss.back() += x / double(n);
    ++t;
  }
};

std::vector<std::vector<SbsId>> permutations(std::size_t n) {
  std::vector<SbsId> p(n);
  std::iota(p.begin(), p.end(), SbsId{0});
  std::vector<std::vector<SbsId>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Every (N!)^N tuple of per-context rankings.
ReferenceExp4 full_pool(std::size_t n) {
  const auto perms = permutations(n);
  ReferenceExp4 r{n, {}, {}, 0.0};
  std::vector<std::size_t> digit(n, 0);
  while (true) {
    std::vector<std::vector<SbsId>> e;
    for (std::size_t c = 0; c < n; ++c) e.push_back(perms[digit[c]]);
    r.rankings.push_back(e);
    std::size_t c = 0;
    while (c < n && ++digit[c] == perms.size()) digit[c++] = 0;
    if (c == n) break;
  }
  r.loss.assign(r.rankings.size() + 1, 0.0);
  r.log_pool = std::log(double(r.loss.size()));
  return r;
}

SbsSet random_nonempty(RngStream& rng, std::size_t n) {
  std::uint64_t bits = 0;
  while (bits == 0) bits = rng.uniform_index(std::size_t{1} << n);
  return SbsSet::from_bits(bits);
}

}  // namespace

TEST_CASE("ranking recommends its best-ranked active SBS") {
  const Ranking r({2, 0, 1});
  CHECK(r.recommend(SbsSet::all(3)) == 2);
  CHECK(r.recommend(SbsSet::from_bits(0b011)) == 0);
  const auto id = Ranking::identity(4);
  for (SbsId k = 0; k < 4; ++k) CHECK(id.recommend(SbsSet::from_bits(1u << k)) == k);
  CHECK_THROWS(Ranking({0, 0, 1}));
  CHECK_THROWS(Ranking({0, 3}));
}

TEST_CASE("ranking enumeration and lookup table") {
  CHECK(factorial(5) == 120);
  const auto all = all_rankings(4);
  CHECK(all.size() == 24);
  CHECK(std::is_sorted(all.begin(), all.end(), [](const Ranking& a, const Ranking& b) {
    return std::lexicographical_compare(a.order().begin(), a.order().end(), b.order().begin(),
                                        b.order().end());
  }));
  RankingTable table(4);
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::uint64_t bits = 1; bits < 16; ++bits) {
      CHECK(table.recommend(r, SbsSet::from_bits(bits)) ==
            table.ranking(r).recommend(SbsSet::from_bits(bits)));
    }
  }
}

TEST_CASE("learning rates") {
  CHECK(gamma_ranking_experts(1, 3) == doctest::Approx(1.339141186674064).epsilon(1e-13));
  CHECK(gamma_contextual(2, 3) == doctest::Approx(0.5694895593212272).epsilon(1e-13));
  CHECK(log_one_plus_full_pool(4) == doctest::Approx(12.71221833546903).epsilon(1e-13));
  CHECK(log_one_plus_full_pool(7) == doctest::Approx(59.6761295274579).epsilon(1e-12));
}

TEST_CASE("untrained mixtures are symmetric") {
  FactoredRankingExperts f(2);
  NaiveRankingExperts nv(2);
  ContextualRankingExperts c(2);
  for (const ExpertMixture* m : {static_cast<const ExpertMixture*>(&f),
                                 static_cast<const ExpertMixture*>(&nv),
                                 static_cast<const ExpertMixture*>(&c)}) {
    const auto p = m->action_distribution(0, SbsSet::all(2));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("zero loss leaves expert weights unchanged") {
  NaiveRankingExperts nv(2);
  const auto before = nv.expert_weights();
  nv.update(0, SbsSet::all(2), 1, 0.0, 0.5);
  CHECK(nv.expert_weights() == before);
}

TEST_CASE("naive RE equals a reference EXP4 over all 217 experts") {
  auto ref = full_pool(3);
  NaiveRankingExperts nv(3);
  REQUIRE(nv.pool_size() == 217);
  REQUIRE(ref.loss.size() == 217);
  RngStream rng(5, 5);
  SbsId prev = 0;
  for (int t = 0; t < 5; ++t) {
    const auto avail = random_nonempty(rng, 3);
    const auto p = nv.action_distribution(prev, avail);
    const auto pr = ref.distribution(prev, avail);
    for (int a = 0; a < 3; ++a) CHECK(p[a] == doctest::Approx(pr[a]).epsilon(1e-12));
    SbsId a = rng.categorical(p);
    if (!avail.contains(a)) a = rng.uniform_member(avail);
    const double loss = rng.uniform();
    nv.update(prev, avail, a, loss, p[a]);
    ref.update(prev, avail, a, loss, p[a]);
    prev = a;
  }
}

TEST_CASE("factored RE reproduces naive expert weights for N = 2") {
  NaiveRankingExperts nv(2);
  FactoredRankingExperts f(2);
  const auto avail = SbsSet::all(2);
  const auto p = f.action_distribution(1, avail);
  nv.update(1, avail, 0, 0.8, p[0]);
  f.update(1, avail, 0, 0.8, p[0]);
  const auto q = nv.expert_weights();
  REQUIRE(q.size() == 5);
  CHECK(f.uniform_weight(0) == doctest::Approx(q.back()).epsilon(1e-14));
  // marginal over context 1's ranking
  const auto table = f.context_table(1);
  double m0 = 0.0;
  for (std::size_t e = 0; e + 1 < q.size(); ++e) {
    if (nv.ranking_of(e, 1) == 0) m0 += q[e];
  }
  CHECK(table[0] * f.ranking_mass() == doctest::Approx(m0).epsilon(1e-14));
}

TEST_CASE("factored and naive RE agree over 100 scripted steps") {
  NaiveRankingExperts nv(3);
  FactoredRankingExperts f(3);
  RngStream rng(11, 3);
  SbsId prev = 2;
  double gap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto avail = random_nonempty(rng, 3);
    const auto p = f.action_distribution(prev, avail);
    const auto pn = nv.action_distribution(prev, avail);
    for (int a = 0; a < 3; ++a) gap = std::max(gap, std::fabs(p[a] - pn[a]));
    SbsId a = rng.categorical(p);
    if (!avail.contains(a)) a = rng.uniform_member(avail);
    const double loss = rng.uniform();
    f.update(prev, avail, a, loss, p[a]);
    nv.update(prev, avail, a, loss, p[a]);
    prev = a;
  }
  CHECK(gap < 1e-10);
}

TEST_CASE("a never-visited context keeps a uniform table") {
  FactoredRankingExperts f(3);
  RngStream rng(2, 2);
  for (int t = 0; t < 30; ++t) {
    const auto avail = random_nonempty(rng, 3);
    const SbsId prev = t % 2;  // contexts 0 and 1 only
    const auto p = f.action_distribution(prev, avail);
    SbsId a = rng.categorical(p);
    if (!avail.contains(a)) a = rng.uniform_member(avail);
    f.update(prev, avail, a, rng.uniform(), p[a]);
  }
  for (double x : f.context_table(2)) CHECK(x == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("CRE contexts are independent") {
  ContextualRankingExperts c(3);
  CHECK(c.kappa(0) == 1);
  const auto fresh = c.expert_weights(1);
  RngStream rng(8, 8);
  for (int k = 0; k < 25; ++k) {
    const auto avail = random_nonempty(rng, 3);
    const auto p = c.action_distribution(0, avail);
    SbsId a = rng.categorical(p);
    if (!avail.contains(a)) a = rng.uniform_member(avail);
    c.update(0, avail, a, rng.uniform(), p[a]);
  }
  CHECK(c.kappa(0) == 26);
  CHECK(c.kappa(1) == 1);
  CHECK(c.expert_weights(1) == fresh);
  for (double x : fresh) CHECK(x == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("CRE with two contexts equals two independent EXP4 runs") {
  const auto perms = permutations(2);
  auto make = [&] {
    ReferenceExp4 r{2, {}, {}, std::log(3.0)};
    for (const auto& p : perms) r.rankings.push_back({p, p});  // context-free rankings
    r.loss.assign(3, 0.0);
    return r;
  };
  std::vector<ReferenceExp4> ref{make(), make()};
  ContextualRankingExperts c(2);
  RngStream rng(21, 1);
  SbsId prev = 0;
  for (int t = 0; t < 60; ++t) {
    const auto avail = random_nonempty(rng, 2);
    const auto p = c.action_distribution(prev, avail);
    const auto pr = ref[prev].distribution(prev, avail);
    for (int a = 0; a < 2; ++a) CHECK(p[a] == doctest::Approx(pr[a]).epsilon(1e-12));
    SbsId a = rng.categorical(p);
    if (!avail.contains(a)) a = rng.uniform_member(avail);
    const double loss = rng.uniform();
    c.update(prev, avail, a, loss, p[a]);
    ref[prev].update(prev, avail, a, loss, p[a]);
    prev = a;
  }
}

TEST_CASE("RE policy resamples a switched-off draw from the active set") {
  auto policy = RankingExpertPolicy("re", std::make_unique<FactoredRankingExperts>(4),
                                    RngStream(3, 3));
  REQUIRE(policy.initial_context().has_value());
  CHECK(*policy.initial_context() < 4);
  const auto avail = SbsSet::from_bits(0b0100);
  for (std::uint64_t t = 1; t <= 200; ++t) {
    SlotContext ctx;
    ctx.t = t;
    ctx.available = avail;
    const SbsId a = policy.select(ctx);
    CHECK(a == 2);
    const FeedbackEvent ev{t, a, 0.5};
    policy.observe(std::span<const FeedbackEvent>(&ev, 1));
  }
}

TEST_CASE("mixture guards") {
  CHECK_THROWS_AS(NaiveRankingExperts(5), ConfigError);
  CHECK_THROWS_AS(FactoredRankingExperts(8), ConfigError);
  CHECK_THROWS_AS(ContextualRankingExperts(8), ConfigError);
  FactoredRankingExperts f(3);
  CHECK_THROWS(f.action_distribution(3, SbsSet::all(3)));
  CHECK_THROWS(f.action_distribution(0, SbsSet()));
  CHECK_THROWS(f.update(0, SbsSet::all(3), 1, 0.5, 0.0));
}

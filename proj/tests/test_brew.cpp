#include <cmath>
#include <vector>

#include "doctest.h"
#include "udnmob/brew.hpp"
#include "udnmob/ew_core.hpp"

using namespace udnmob;

// ---- exponential weights ----------------------------------------------------

TEST_CASE("softmin probabilities") {
  const std::vector<double> flat(5, 3.7);
  for (double p : softmin_probabilities(flat, 0.9)) CHECK(p == doctest::Approx(0.2));
  CHECK(softmin_probabilities(std::vector<double>{12.0}, 2.0) == std::vector<double>{1.0});

  // e^0 / (e^0 + e^-1), computed offline
  const auto p = softmin_probabilities(std::vector<double>{0.0, 1.0}, 1.0);
  CHECK(p[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));
}

TEST_CASE("softmin survives losses far beyond the exp range") {
  const auto p = softmin_probabilities(std::vector<double>{1e6, 1e6 + 1.0, 1e6 + 2.0}, 1.0);
  double s = 0.0;
  for (double x : p) {
    CHECK(std::isfinite(x));
    s += x;
  }
  CHECK(s == doctest::Approx(1.0));
  CHECK(p[0] > p[1]);
}

TEST_CASE("log_sum_exp_neg matches the direct sum") {
  const std::vector<double> x{0.3, 1.2, 2.5};
  double direct = 0.0;
  for (double v : x) direct += std::exp(-0.7 * v);
  CHECK(log_sum_exp_neg(x, 0.7) == doctest::Approx(std::log(direct)).epsilon(1e-14));
}

TEST_CASE("importance estimate credits only the played arm") {
  CHECK(importance_estimate(0.5, 0.25, 1, 3) == std::vector<double>{0.0, 2.0, 0.0});
  CHECK(importance_estimate(0.0, 0.4, 2, 3) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(importance_estimate(1.0, 1.0, 0, 1) == std::vector<double>{1.0});
}

TEST_CASE("importance estimate is unbiased for the full loss vector") {
  const std::vector<double> loss{0.2, 0.7, 0.4};
  const std::vector<double> p{0.5, 0.2, 0.3};
  std::vector<double> expect(3, 0.0);
  for (SbsId a = 0; a < 3; ++a) {
    const auto est = importance_estimate(loss[a], p[a], a, 3);
    for (SbsId b = 0; b < 3; ++b) expect[b] += p[a] * est[b];
  }
  for (SbsId b = 0; b < 3; ++b) CHECK(expect[b] == doctest::Approx(loss[b]).epsilon(1e-15));
}

TEST_CASE("anytime learning rate") {
  CHECK(gamma_anytime(1, 2) == doctest::Approx(0.8325546111576977).epsilon(1e-14));
  CHECK(gamma_anytime(4, 2) == doctest::Approx(0.8325546111576977 / 2).epsilon(1e-14));
  CHECK(gamma_anytime(1, 6) == doctest::Approx(0.7728215553472558).epsilon(1e-14));
  CHECK(gamma_anytime(5, 6) == doctest::Approx(0.34561630644671604).epsilon(1e-14));
  CHECK(gamma_anytime(3, 1) == 0.0);
  const auto g = GammaSchedule::anytime(4);
  for (std::size_t l = 1; l < 100; ++l) CHECK(g(l + 1) <= g(l));
}

// ---- batch length -----------------------------------------------------------

TEST_CASE("batch length from B_N") {
  CHECK(brew_b_n(6) == doctest::Approx(0.2744430112354449).epsilon(1e-14));
  CHECK(brew_batch_length(6, 100000) == 13);
  CHECK(brew_b_n(12) == doctest::Approx(0.19532839760169304).epsilon(1e-14));
  CHECK(brew_batch_length(12, 100000) == 10);
  CHECK(brew_batch_length(2, 1) == 1);
  CHECK(brew_batch_length(2, 1000) == 6);
  CHECK_THROWS_AS(brew_batch_length(2, 0), ConfigError);
  CHECK_THROWS_AS(brew_b_n(1), ConfigError);
}

// ---- selection and updates ----------------------------------------------------

TEST_CASE("brew_select holds mid-batch and draws at boundaries") {
  BrewState st(6, GammaSchedule::anytime(6));
  RngStream a(1, 1), b(1, 1);
  CHECK(brew_select(st, false, SbsId{3}, a) == 3);
  CHECK(a.next_u64() == b.next_u64());  // no randomness consumed
  CHECK_THROWS_AS(brew_select(st, false, std::nullopt, a), ProtocolError);

  st.probabilities = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 50; ++i) CHECK(brew_select(st, true, std::nullopt, a) == 0);

  BrewState two(2, GammaSchedule::anytime(2));
  RngStream r1(77, 5), r2(77, 5);
  for (int i = 0; i < 20; ++i) {
    CHECK(brew_select(two, true, std::nullopt, r1) == brew_select(two, true, std::nullopt, r2));
  }
}

TEST_CASE("batch mean folds in a one-time handover charge") {
  BatchAccumulator plain(1, 0, 2);
  plain.add(0.2);
  plain.add(0.4);
  CHECK(plain.mean() == doctest::Approx(0.3));

  BatchAccumulator switched(1, 0, 2);
  switched.add(0.2, 0.2);
  switched.add(0.4);
  CHECK(switched.mean() == doctest::Approx(0.4));
}

TEST_CASE("two-batch hand trace with constant gamma 1") {
  BrewState st(2, GammaSchedule::constant(1.0));
  // batch 1: arm 1 played, mean 0.3 at p = 0.5 -> L = (0, 0.6)
  BatchAccumulator b1(1, 1, 2);
  b1.add(0.2);
  b1.add(0.4);
  brew_end_batch(b1, st);
  const double p0 = 1.0 / (1.0 + std::exp(-0.6));
  CHECK(st.probabilities[0] == doctest::Approx(p0).epsilon(1e-14));
  // batch 2: arm 0 played, mean 0.5 at p0 -> L = (0.5 / p0, 0.6)
  BatchAccumulator b2(2, 0, 2);
  b2.add(0.5);
  b2.add(0.5);
  brew_end_batch(b2, st);
  const double l0 = 0.5 / p0;
  const double q0 = std::exp(-l0) / (std::exp(-l0) + std::exp(-0.6));
  CHECK(st.weights.cum_est_loss[0] == doctest::Approx(l0).epsilon(1e-14));
  CHECK(st.probabilities[0] == doctest::Approx(q0).epsilon(1e-14));
  CHECK(st.batch == 3);
}

TEST_CASE("binomial pmf") {
  CHECK(binomial_pmf(2, 1, 0.5) == doctest::Approx(0.5));
  CHECK(binomial_pmf(3, 0, 0.7) == doctest::Approx(0.027));
  CHECK(binomial_pmf(3, 4, 0.7) == 0.0);
  double s = 0.0;
  for (std::size_t k = 0; k <= 9; ++k) s += binomial_pmf(9, k, 0.37);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("missing-feedback estimator") {
  SUBCASE("divides by the pattern probability") {
    BrewState st(2, GammaSchedule::anytime(2));
    BatchAccumulator acc(1, 0, 2);
    acc.add(0.6);
    brew_missing_end_batch(acc, MissingFeedbackConfig{0.5}, st);
    CHECK(st.weights.cum_est_loss[0] == doctest::Approx(0.6 / (0.5 * 0.5)));
    CHECK(st.weights.cum_est_loss[1] == 0.0);
  }
  SUBCASE("empty batch gives a zero update but advances the round") {
    BrewState st(2, GammaSchedule::anytime(2));
    BatchAccumulator acc(1, 1, 3);
    brew_missing_end_batch(acc, MissingFeedbackConfig{0.3}, st);
    CHECK(st.weights.cum_est_loss == std::vector<double>{0.0, 0.0});
    CHECK(st.batch == 2);
  }
  SUBCASE("p outside [0,1) is rejected") {
    CHECK_THROWS_AS(MissingFeedbackConfig{1.0}.validate(), ConfigError);
    CHECK_THROWS_AS(MissingFeedbackConfig{-0.1}.validate(), ConfigError);
  }
}

TEST_CASE("missing-feedback expectation equals tau times the batch mean") {
  // Enumerate the 2^tau observation patterns; E[increment] / p_a is the sum
  // over non-empty observation counts of the batch mean.
  const std::vector<double> loss{0.2, 0.5, 0.9};
  const double p = 0.3;
  const double prob_a = 0.6;
  double expect = 0.0;
  for (unsigned m = 0; m < 8; ++m) {
    BrewState st(2, GammaSchedule::anytime(2));
    st.probabilities = {prob_a, 1.0 - prob_a};
    BatchAccumulator acc(1, 0, 3);
    double w = 1.0;
    for (std::size_t s = 0; s < 3; ++s) {
      const bool seen = (m >> s) & 1U;
      w *= seen ? 1.0 - p : p;
      if (seen) acc.add(loss[s]);
    }
    brew_missing_end_batch(acc, MissingFeedbackConfig{p}, st);
    expect += w * prob_a * st.weights.cum_est_loss[0];
  }
  CHECK(expect == doctest::Approx(3.0 * (0.2 + 0.5 + 0.9) / 3.0).epsilon(1e-13));
}

TEST_CASE("BrewPolicy switches only at batch boundaries") {
  for (std::size_t tau : {1u, 4u, 13u}) {
    BrewConfig cfg;
    cfg.n = 3;
    cfg.horizon = 500;
    cfg.tau = tau;
    cfg.gamma = GammaSchedule::anytime(3);
    BrewPolicy pol(cfg, std::nullopt, RngStream(9, 9));
    const std::vector<double> loss{0.1, 0.5, 0.9};
    std::vector<SbsId> actions;
    std::optional<SbsId> prev;
    for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
      SlotContext ctx;
      ctx.t = t;
      ctx.available = SbsSet::all(3);
      ctx.previous = prev;
      const SbsId a = pol.select(ctx);
      if (prev && a != *prev) CHECK((t - 1) % tau == 0);
      const FeedbackEvent ev{t, a, loss[a]};
      pol.observe(std::span<const FeedbackEvent>(&ev, 1));
      actions.push_back(a);
      prev = a;
    }
    pol.finish();
    const std::size_t batches = (cfg.horizon + tau - 1) / tau;
    CHECK(count_handovers(actions) <= batches - 1);
  }
}

TEST_CASE("BREW with tau = 1 follows a standalone EXP3 on the same feedback") {
  const std::size_t n = 3;
  BrewConfig cfg;
  cfg.n = n;
  cfg.horizon = 200;
  cfg.tau = 1;
  cfg.gamma = GammaSchedule::anytime(n);
  BrewPolicy pol(cfg, std::nullopt, RngStream(4, 4));
  const std::vector<double> loss{0.3, 0.6, 0.1};

  std::vector<double> L(n, 0.0);
  for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
    // reference distribution: gamma_{t-1} on L, uniform at t = 1
    std::vector<double> ref(n, 1.0 / n);
    if (t > 1) {
      const double g = std::sqrt(2.0 * std::log(double(n)) / (double(t - 1) * n));
      double z = 0.0;
      for (std::size_t a = 0; a < n; ++a) z += std::exp(-g * L[a]);
      for (std::size_t a = 0; a < n; ++a) ref[a] = std::exp(-g * L[a]) / z;
    }
    SlotContext ctx;
    ctx.t = t;
    ctx.available = SbsSet::all(n);
    const SbsId a = pol.select(ctx);  // closes the previous batch, then draws
    for (std::size_t b = 0; b < n; ++b) {
      CHECK(pol.state().probabilities[b] == doctest::Approx(ref[b]).epsilon(1e-12));
    }
    L[a] += loss[a] / ref[a];
    const FeedbackEvent ev{t, a, loss[a]};
    pol.observe(std::span<const FeedbackEvent>(&ev, 1));
  }
}

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "udnmob/environments.hpp"

using namespace udnmob;

namespace {

std::shared_ptr<EnergyMatrix> ramp(std::size_t T, std::size_t n) {
  auto m = std::make_shared<EnergyMatrix>(T, n);
  for (std::size_t t = 0; t < T; ++t) {
    for (SbsId a = 0; a < n; ++a) m->at(t, a) = 0.01 * double((t + a) % 50);
  }
  return m;
}

}  // namespace

TEST_CASE("zero delay is the identity channel") {
  DelayChannel ch(0);
  ch.push({5, 1, 0.3});
  const auto out = ch.deliver(5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].origin_slot == 5);
  CHECK(ch.pending() == 0);
}

TEST_CASE("delay d delivers slot s at s + d in order") {
  DelayChannel ch(3);
  for (std::uint64_t s = 1; s <= 6; ++s) {
    ch.push({s, 0, double(s)});
    const auto out = ch.deliver(s);
    if (s <= 3) {
      CHECK(out.empty());
    } else {
      REQUIRE(out.size() == 1);
      CHECK(out[0].origin_slot == s - 3);
    }
  }
  CHECK(ch.pending() == 3);
}

TEST_CASE("delayed environment preserves feedback content") {
  const std::size_t T = 200;
  for (std::size_t d : {0u, 1u, 4u}) {
    EnvironmentOptions opts;
    opts.handover_cost = 0.1;
    opts.delay = d;
    Environment env(ramp(T, 3), nullptr, opts, 1, 0);
    std::vector<double> generated, delivered;
    RngStream rng(2, 2);
    for (std::size_t t = 0; t < T; ++t) {
      const SbsId a = rng.uniform_index(3);
      const auto r = env.step(a);
      generated.push_back(r.cost.total());
      for (const auto& ev : r.feedback) {
        CHECK(ev.origin_slot + d == t + 1);
        delivered.push_back(ev.observed);
      }
    }
    CHECK(env.pending_feedback() == d);
    generated.resize(T - d);
    CHECK(delivered == generated);
  }
}

TEST_CASE("miss channel delivery rate") {
  const double eps = 0.05;
  MissChannel ch(1.0 - eps, RngStream(9, 1));
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += ch.delivered() ? 1 : 0;
  const double se = std::sqrt(eps * (1 - eps) / n);
  CHECK(std::fabs(hits / double(n) - eps) <= 3 * se);
  CHECK_THROWS_AS(MissChannel(1.0, RngStream(1, 1)), ConfigError);
  CHECK_THROWS_AS(MissChannel(-0.5, RngStream(1, 1)), ConfigError);
}

TEST_CASE("adaptive adversary removes the last action") {
  AvailabilityConfig cfg;
  cfg.mode = AvailabilityMode::kAdaptive;
  AvailabilityProcess p(5, cfg, RngStream(1, 1));
  CHECK(p.current() == SbsSet::all(5));
  p.advance(3);
  auto expect = SbsSet::all(5);
  expect.erase(3);
  CHECK(p.current() == expect);
}

TEST_CASE("under the adaptive adversary every slot after the first is a handover") {
  EnvironmentOptions opts;
  opts.availability.mode = AvailabilityMode::kAdaptive;
  const std::size_t T = 300;
  Environment env(ramp(T, 4), nullptr, opts, 1, 0);
  RngStream rng(4, 4);
  std::vector<SbsId> actions;
  std::vector<std::size_t> served(4, 0);
  for (std::size_t t = 0; t < T; ++t) {
    const SbsId a = rng.uniform_member(env.available());
    actions.push_back(a);
    ++served[a];
    CHECK_THROWS_AS(env.step(actions.size() > 1 ? actions[actions.size() - 2] : 99),
                    ProtocolError);
    env.step(a);
  }
  CHECK(count_handovers(actions) == T - 1);
  // some SBS is active in at least T(1 - 1/N) slots
  const std::size_t least_served = *std::min_element(served.begin(), served.end());
  CHECK(T - least_served >= T - T / 4);
}

TEST_CASE("iid availability is never empty and matches p_on") {
  AvailabilityConfig cfg;
  cfg.mode = AvailabilityMode::kIid;
  cfg.p_on = {0.9, 0.5, 0.2};
  AvailabilityProcess p(3, cfg, RngStream(5, 5));
  std::vector<int> on(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    CHECK_FALSE(p.current().empty());
    for (SbsId a = 0; a < 3; ++a) on[a] += p.current().contains(a);
    p.advance(0);
  }
  // conditioned on non-empty: P(on_a) = p_a / (1 - prod(1 - p))
  const double nonempty = 1.0 - 0.1 * 0.5 * 0.8;
  for (SbsId a = 0; a < 3; ++a) {
    CHECK(on[a] / double(n) == doctest::Approx(cfg.p_on[a] / nonempty).epsilon(0.01));
  }
}

TEST_CASE("scripted availability cycles") {
  AvailabilityConfig cfg;
  cfg.mode = AvailabilityMode::kScripted;
  cfg.script = {SbsSet::from_bits(1), SbsSet::from_bits(6)};
  AvailabilityProcess p(3, cfg, RngStream(1, 1));
  CHECK(p.current().bits() == 1);
  p.advance(0);
  CHECK(p.current().bits() == 6);
  p.advance(1);
  CHECK(p.current().bits() == 1);
}

TEST_CASE("availability config validation") {
  AvailabilityConfig cfg;
  cfg.mode = AvailabilityMode::kIid;
  cfg.p_on = {0.5};
  CHECK_THROWS_AS(cfg.validate(2), ConfigError);
  cfg.p_on = {0.0, 0.0};
  CHECK_THROWS_AS(cfg.validate(2), ConfigError);
  cfg.mode = AvailabilityMode::kScripted;
  cfg.script = {SbsSet()};
  CHECK_THROWS_AS(cfg.validate(2), ConfigError);
  cfg.script = {SbsSet::from_bits(4)};
  CHECK_THROWS_AS(cfg.validate(2), ConfigError);
  cfg.mode = AvailabilityMode::kAdaptive;
  CHECK_THROWS_AS(cfg.validate(1), ConfigError);
}

TEST_CASE("environment charges handovers and enforces the protocol") {
  EnvironmentOptions opts;
  opts.handover_cost = 0.25;
  opts.feedback_scale = 0.5;
  Environment env(ramp(3, 2), nullptr, opts, 1, 0);
  CHECK(env.t() == 1);
  auto r1 = env.step(0);
  CHECK_FALSE(r1.cost.switched);
  auto r2 = env.step(1);
  CHECK(r2.cost.switched);
  CHECK(r2.cost.total() == doctest::Approx(env.energy().at(1, 1) + 0.25));
  REQUIRE(r2.feedback.size() == 1);
  CHECK(r2.feedback[0].observed == doctest::Approx(0.5 * r2.cost.total()));
  env.step(1);
  CHECK_THROWS_AS(env.step(1), ProtocolError);
}

TEST_CASE("measurements follow the delivered row") {
  EnvironmentOptions opts;
  opts.delay = 2;
  auto e = ramp(10, 2);
  Environment env(e, nullptr, opts, 1, 0);
  for (double x : env.measurements()) CHECK(x == 0.0);
  env.step(0);
  env.step(0);
  // slot 3 sees the row of slot 1
  CHECK(env.measurements()[1] == e->at(0, 1));
}

TEST_CASE("environment randomness depends only on seed and repetition") {
  EnvironmentOptions opts;
  opts.p_miss = 0.3;
  opts.availability.mode = AvailabilityMode::kIid;
  opts.availability.p_on = {0.6, 0.6, 0.6};
  auto e = ramp(100, 3);
  Environment a(e, nullptr, opts, 7, 2), b(e, nullptr, opts, 7, 2), c(e, nullptr, opts, 7, 3);
  bool differs = false;
  for (int t = 0; t < 100; ++t) {
    CHECK(a.available() == b.available());
    differs = differs || a.available() != c.available();
    const SbsId x = a.available().nth(0);
    const SbsId y = c.available().nth(0);
    CHECK(a.step(x).feedback.size() == b.step(x).feedback.size());
    c.step(y);
  }
  CHECK(differs);
}

#include <vector>

#include "doctest.h"
#include "udnmob/baselines.hpp"

using namespace udnmob;

namespace {

std::optional<SbsId> run_macro(const MacroConfig& cfg, const EnergyMatrix& m,
                               std::vector<SbsId>& actions) {
  std::optional<SbsId> serving;
  for (std::size_t t = 0; t < m.slots(); ++t) {
    serving = macro_step(cfg, m.row(t), serving, SbsSet::all(m.arms()));
    actions.push_back(*serving);
  }
  return serving;
}

}  // namespace

TEST_CASE("macro stays below the threshold and re-measures above it") {
  const MacroConfig cfg{0.10};
  const std::vector<double> m1{0.3, 0.05, 0.2, 0.4, 0.01};
  CHECK(macro_step(cfg, m1, SbsId{1}) == 1);
  const std::vector<double> m2{0.3, 0.15, 0.2, 0.4, 0.01};
  CHECK(macro_step(cfg, m2, SbsId{1}) == 4);
  CHECK(macro_step(cfg, m2, std::nullopt, SbsSet::all(5)) == 4);
  // serving SBS switched off
  CHECK(macro_step(cfg, m1, SbsId{1}, SbsSet::from_bits(0b01101)) == 2);
}

TEST_CASE("best_available ties go to the lowest id") {
  const std::vector<double> m{0.2, 0.1, 0.1};
  CHECK(best_available(m, SbsSet::all(3)) == 1);
  CHECK(best_available(m, SbsSet::from_bits(0b101)) == 2);
}

TEST_CASE("the threshold trap locks macro onto the worse SBS") {
  const auto m = appendix_c_sequence(2, 50, 0.1, 0.9);
  CHECK(m.at(0, 0) < m.at(0, 1));
  CHECK(m.at(1, 0) > 0.1);
  CHECK(m.at(1, 1) < 0.1);
  for (std::size_t t = 2; t < 50; ++t) {
    CHECK(m.at(t, 0) < m.at(t, 1));
    CHECK(m.at(t, 1) < 0.1);
  }
  std::vector<SbsId> actions;
  run_macro(MacroConfig{0.1}, m, actions);
  CHECK(actions[0] == 0);
  for (std::size_t t = 1; t < actions.size(); ++t) CHECK(actions[t] == 1);
  CHECK(genie_best_fixed(m).arm == 0);

  const auto wide = appendix_c_sequence(4, 10, 0.1, 0.9);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(wide.at(t, 2) == 0.9);
    CHECK(wide.at(t, 3) == 0.9);
  }
}

TEST_CASE("FHO without history behaves like macro") {
  const FhoConfig cfg;
  FhoHistory h;
  RngStream rng(1, 1);
  std::optional<SbsId> serving, macro_serving;
  for (std::uint64_t t = 1; t <= 3; ++t) {
    std::vector<double> m(4);
    for (double& x : m) x = rng.uniform();
    const auto a = fho_step(cfg, m, serving, h, t, SbsSet::all(4));
    const auto b = macro_step(cfg.macro, m, macro_serving, SbsSet::all(4));
    CHECK(a == b);
    serving = a;
    macro_serving = b;
  }
}

TEST_CASE("FHO freezes after 4 handovers in 20 slots") {
  FhoConfig cfg;
  cfg.freeze_len = 5;
  FhoHistory h;
  // Alternate the best SBS every slot so macro would hand over every time.
  std::optional<SbsId> serving;
  std::vector<SbsId> seq;
  for (std::uint64_t t = 1; t <= 12; ++t) {
    const std::vector<double> m = (t % 2) ? std::vector<double>{0.05, 0.5}
                                          : std::vector<double>{0.5, 0.05};
    serving = fho_step(cfg, m, serving, h, t, SbsSet::all(2));
    seq.push_back(*serving);
  }
  // t = 2..5 hand over (4 handovers), then t = 6..10 are frozen.
  CHECK(count_handovers(std::vector<SbsId>(seq.begin(), seq.begin() + 5)) == 4);
  for (std::size_t i = 5; i < 10; ++i) CHECK(seq[i] == seq[4]);
}

TEST_CASE("FHO freeze keeps an above-threshold serving SBS") {
  FhoConfig cfg;
  cfg.freeze_len = 3;
  FhoHistory h;
  h.freeze(10, 3);
  const std::vector<double> m{0.9, 0.01};
  CHECK(fho_step(cfg, m, SbsId{0}, h, 10, SbsSet::all(2)) == 0);
  CHECK(fho_step(cfg, m, SbsId{0}, h, 13, SbsSet::all(2)) == 1);
}

TEST_CASE("extended macro adds E_s to every other SBS") {
  const std::vector<double> m{0.30, 0.25, 0.5};
  CHECK(extended_macro_step(m, SbsId{0}, SbsSet::all(3), 0.1) == 0);
  CHECK(extended_macro_step(m, SbsId{0}, SbsSet::all(3), 0.01) == 1);
  CHECK(extended_macro_step(m, std::nullopt, SbsSet::all(3), 0.5) == 1);
  CHECK(extended_macro_step(m, SbsId{1}, SbsSet::from_bits(0b101), 0.1) == 0);
}

TEST_CASE("genie best fixed arm") {
  EnergyMatrix m(7, 2);
  for (std::size_t t = 0; t < 7; ++t) {
    m.at(t, 0) = 0.2;
    m.at(t, 1) = 0.5;
  }
  const auto g = genie_best_fixed(m);
  CHECK(g.arm == 0);
  CHECK(g.energy == doctest::Approx(1.4));
  CHECK(genie_best_fixed(EnergyMatrix(5, 3, 0.4)).arm == 0);

  RngStream rng(6, 6);
  EnergyMatrix r(10, 3);
  for (std::size_t t = 0; t < 10; ++t) {
    for (SbsId a = 0; a < 3; ++a) r.at(t, a) = rng.uniform();
  }
  std::vector<double> col(3, 0.0);
  for (std::size_t t = 0; t < 10; ++t) {
    for (SbsId a = 0; a < 3; ++a) col[a] += r.at(t, a);
  }
  SbsId best = 0;
  for (SbsId a = 1; a < 3; ++a) {
    if (col[a] < col[best]) best = a;
  }
  CHECK(genie_best_fixed(r).arm == best);
  CHECK(genie_best_fixed(r).energy == doctest::Approx(col[best]).epsilon(1e-14));
}

TEST_CASE("fixed-arm policy falls back to the lowest active id") {
  FixedArmPolicy p(2);
  SlotContext ctx;
  ctx.available = SbsSet::all(4);
  CHECK(p.select(ctx) == 2);
  ctx.available = SbsSet::from_bits(0b1010);
  CHECK(p.select(ctx) == 1);
}

TEST_CASE("baseline configuration guards") {
  CHECK_THROWS_AS((MacroConfig{-0.1}.validate()), ConfigError);
  FhoConfig f;
  f.window = 0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
}

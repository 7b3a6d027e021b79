#include <stdexcept>

#include "doctest.h"
#include "polreg/adversaries.hpp"
#include "polreg/errors.hpp"
#include "polreg/game.hpp"
#include "polreg/learners.hpp"
#include "support.hpp"

using namespace polreg;
using polreg::testing::ScriptedPlayer;
using polreg::testing::table;

TEST_CASE("zero losses give zero regret") {
  const auto r = realize_oblivious(Matrix::Zero(5, 2));
  UniformRandomPlayer p(2, 3);
  const auto tr = play_game(*r, p, 5, Feedback::Bandit);
  for (double v : tr.incurred_losses) CHECK(v == 0.0);
  CHECK(policy_regret(tr, *r).policy_regret == 0.0);
}

TEST_CASE("constant player never switches") {
  const auto r = realize_oblivious(table({{0, 1}, {1, 0}, {0.5, 0.5}}));
  ConstantPlayer p(2, 0);
  const auto tr = play_game(*r, p, 3, Feedback::FullInformation);
  CHECK(tr.switches == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(policy_regret(tr, *r).switch_count == 0);
}

TEST_CASE("constant player on a seeded walk sees the regenerated walk") {
  RandomWalkSpec spec;
  spec.T = 8;
  Rng rng(42);
  const auto r = realize_random_walk(spec, rng);
  ConstantPlayer p(2, 0);
  const auto tr = play_game(*r, p, 8, Feedback::Bandit);

  Rng again(42);
  (void)again();  // Z
  double w = 0.0;
  for (int t = 0; t < 8; ++t) {
    w += standard_normal(again);
    CHECK(tr.incurred_losses[t] == doctest::Approx(w).epsilon(1e-15));
  }
}

TEST_CASE("switching cost regret by hand") {
  const auto r = with_switching_cost(realize_oblivious(table({{0, 1}, {0, 1}})));
  ScriptedPlayer p(2, {1, 0});
  const auto tr = play_game(*r, p, 2, Feedback::Bandit);
  const auto ledger = policy_regret(tr, *r);
  CHECK(ledger.incurred_total == 2.0);
  CHECK(ledger.best_constant_action == 0);
  CHECK(ledger.best_constant_total == 0.0);
  CHECK(ledger.policy_regret == 2.0);
}

TEST_CASE("best constant action has zero policy regret") {
  Rng rng(5);
  IidSpec spec;
  spec.means = Vector::Constant(3, 0.5);
  spec.noise = NoiseKind::Uniform;
  spec.scale = 0.5;
  const auto r = with_switching_cost(realize_iid(spec, 20, rng));
  ConstantPlayer probe(3, 0);
  const auto best = policy_regret(play_game(*r, probe, 20, Feedback::Bandit), *r).best_constant_action;
  ConstantPlayer p(3, best);
  CHECK(policy_regret(play_game(*r, p, 20, Feedback::Bandit), *r).policy_regret == doctest::Approx(0.0));
}

TEST_CASE("walk with Z = +1 and constant play on the shifted arm") {
  Vector xi(8);
  xi << 0.3, -1.2, 0.7, 0.1, -0.4, 2.0, -0.9, 0.05;
  const RandomWalkLosses walk(xi, 1, 0.5, 1.0 / 80.0, false);
  ConstantPlayer p(2, 1);
  const auto tr = play_game(walk, p, 8, Feedback::Bandit);
  CHECK(policy_regret(tr, walk).policy_regret == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("standard regret on a pure switching process") {
  const auto r = realize_bounded_memory(
      [](Round, std::span<const Action> w) -> std::optional<double> {
        return w.size() < 2 ? 0.0 : double(w[0] != w[1]);
      },
      1, 2, 2);
  ScriptedPlayer stay(2, {0, 0});
  CHECK(standard_regret(play_game(*r, stay, 2, Feedback::Bandit), *r) == 0.0);
  ScriptedPlayer move(2, {0, 1});
  CHECK(standard_regret(play_game(*r, move, 2, Feedback::Bandit), *r) == 1.0);
}

TEST_CASE("switch_count") {
  CHECK(switch_count(std::vector<Action>{0, 0, 1, 1, 0}) == 2);
  CHECK(switch_count(std::vector<Action>{0, 0, 0}) == 0);
  CHECK(switch_count(std::vector<Action>{0, 1, 0, 1}) == 3);
  CHECK_THROWS_AS(switch_count(std::vector<Action>{}), std::domain_error);
}

TEST_CASE("horizon and action count mismatches are configuration errors") {
  const auto r = realize_oblivious(Matrix::Zero(4, 2));
  ConstantPlayer p(2, 0);
  CHECK_THROWS_AS(play_game(*r, p, 5, Feedback::Bandit), ConfigError);
  CHECK_THROWS_AS(play_game(*r, p, 0, Feedback::Bandit), ConfigError);
  ConstantPlayer q(3, 0);
  CHECK_THROWS_AS(play_game(*r, q, 4, Feedback::Bandit), ConfigError);
}

TEST_CASE("bandit feedback delivers one scalar per round") {
  RandomWalkSpec spec;
  spec.T = 50;
  spec.with_switching_cost = true;
  Rng rng(9);
  const auto r = realize_random_walk(spec, rng);
  ScriptedPlayer p(2, {0, 1, 1, 0, 1});
  const auto tr = play_game(*r, p, 50, Feedback::Bandit);
  CHECK(tr.feedback_width == 1);
  CHECK(tr.observations.size() == 50);
  CHECK(p.bandit_seen.size() == 50);
  CHECK(p.full_seen.empty());
  for (int t = 0; t < 50; ++t) CHECK(p.bandit_seen[t] == tr.incurred_losses[t]);
}

TEST_CASE("full information delivers f_t(X_{1:t-1}, x)") {
  const auto r = with_switching_cost(realize_oblivious(table({{0.2, 0.9}, {0.4, 0.1}})));
  ScriptedPlayer p(2, {0, 0}, Feedback::FullInformation);
  play_game(*r, p, 2, Feedback::FullInformation);
  REQUIRE(p.full_seen.size() == 2);
  CHECK(p.full_seen[0][0] == 0.2);
  CHECK(p.full_seen[0][1] == 0.9);
  CHECK(p.full_seen[1][0] == 0.4);
  CHECK(p.full_seen[1][1] == doctest::Approx(1.1));
}

TEST_CASE("oblivious processes: policy regret equals brute force and standard regret") {
  Rng rng(2024);
  for (int inst = 0; inst < 100; ++inst) {
    const int K = 2 + static_cast<int>(uniform_index(rng, 2));
    const Round T = 1 + static_cast<Round>(uniform_index(rng, 10));
    Matrix tab(T, K);
    for (Round t = 0; t < T; ++t)
      for (int x = 0; x < K; ++x) tab(t, x) = uniform01(rng);
    const auto r = realize_oblivious(tab);
    std::vector<Action> seq;
    for (Round t = 0; t < T; ++t) seq.push_back(static_cast<Action>(uniform_index(rng, K)));
    ScriptedPlayer p(K, seq);
    const auto tr = play_game(*r, p, T, Feedback::Bandit);
    const auto ledger = policy_regret(tr, *r);

    double incurred = 0.0;
    for (Round t = 0; t < T; ++t) incurred += tab(t, seq[t]);
    double best = 1e300;
    for (int x = 0; x < K; ++x) best = std::min(best, tab.col(x).sum());
    CHECK(ledger.policy_regret == doctest::Approx(incurred - best).epsilon(1e-12));
    CHECK(ledger.policy_regret == doctest::Approx(ledger.standard_regret).epsilon(1e-12));
  }
}

TEST_CASE("translation invariance of policy regret") {
  Rng rng(77);
  Matrix tab(6, 3);
  for (int t = 0; t < 6; ++t)
    for (int x = 0; x < 3; ++x) tab(t, x) = uniform01(rng);
  const auto a = with_switching_cost(realize_oblivious(tab));
  const auto b = with_switching_cost(realize_oblivious(tab.array() + 3.5));
  ScriptedPlayer pa(3, {0, 2, 2, 1, 0, 0});
  ScriptedPlayer pb(3, {0, 2, 2, 1, 0, 0});
  const auto la = policy_regret(play_game(*a, pa, 6, Feedback::Bandit), *a);
  const auto lb = policy_regret(play_game(*b, pb, 6, Feedback::Bandit), *b);
  CHECK(la.best_constant_action == lb.best_constant_action);
  CHECK(la.policy_regret == doctest::Approx(lb.policy_regret).epsilon(1e-12));
}

TEST_CASE("identical seeds give identical transcripts") {
  auto once = [] {
    RandomWalkSpec spec;
    spec.T = 200;
    spec.with_switching_cost = true;
    Rng rng(31);
    const auto r = realize_random_walk(spec, rng);
    UniformRandomPlayer p(2, 99);
    return play_game(*r, p, 200, Feedback::Bandit);
  };
  const auto a = once();
  const auto b = once();
  CHECK(a.actions == b.actions);
  CHECK(a.incurred_losses == b.incurred_losses);
}

TEST_CASE("player protocol order is enforced") {
  ConstantPlayer p(2, 0);
  CHECK_THROWS_AS(p.observe_bandit(0.0), std::logic_error);
  p.choose();
  CHECK_THROWS_AS(p.choose(), std::logic_error);
  p.observe_bandit(0.0);
  CHECK(p.round() == 1);
  CHECK_THROWS_AS(p.observe_full(Vector::Zero(2)), std::logic_error);
}

#include <set>

#include "doctest.h"
#include "polreg/adversaries.hpp"
#include "polreg/errors.hpp"
#include "polreg/reductions.hpp"
#include "polreg/sampler.hpp"
#include "support.hpp"

using namespace polreg;
using polreg::testing::table;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

RealizationPtr bernoulli_arms(Round T, std::uint64_t seed, bool switching) {
  IidSpec spec;
  spec.means = vec({0.4, 0.5, 0.6});
  spec.noise = NoiseKind::Bernoulli;
  Rng rng(seed);
  RealizationPtr r = realize_iid(spec, T, rng);
  return switching ? with_switching_cost(r) : r;
}

}  // namespace

TEST_CASE("bounds of a switching-cost walk") {
  RandomWalkSpec spec;
  spec.T = 1000;
  spec.with_switching_cost = true;
  Rng rng(1);
  const auto r = realize_random_walk(spec, rng);
  const auto b = BoundsConfig::of(*r, 1000);
  CHECK(b.C == doctest::Approx(1.1));
  CHECK(b.m == 1);
  CHECK(b.D == doctest::Approx(1.0 + increment_clip(1001, 1.0 / 80.0)));
  CHECK(declared_switching_cost(*r) == 1.0);
  CHECK(declared_switching_cost(*realize_oblivious(Matrix::Zero(2, 2))) == 0.0);
  BoundsConfig bad;
  bad.C = 0.0;
  CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("FLL-switching rescale") {
  BoundsConfig b{2.0, 0.0, 1, 100};
  FllSwitchingPlayer p(2, b, 1.0, 3);
  const Vector l = p.rescale(vec({0.3, 0.8}));
  CHECK(l[0] == doctest::Approx(0.0));
  CHECK(l[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(FllSwitchingPlayer(2, BoundsConfig{1.0, 0.0, 1, 100}, 1.0, 3), ConfigError);
}

TEST_CASE("FLL-switching strips the switching surcharge") {
  const Matrix tab = table({{0.1, 0.4}, {0.6, 0.2}, {0.3, 0.3}, {0.9, 0.0}});
  const auto r = with_switching_cost(realize_oblivious(tab));
  const auto b = BoundsConfig::of(*r, 4);
  CHECK(b.C == doctest::Approx(1.9));
  FllSwitchingPlayer p(2, b, 1.0, 5);
  p.fll().override_perturbation(Vector::Zero(2));
  play_game(*r, p, 4, Feedback::FullInformation);
  Vector shifted = tab.colwise().sum().transpose();
  for (int t = 0; t < 4; ++t) shifted.array() -= tab.row(t).minCoeff();
  shifted /= b.C - 1.0;
  CHECK((p.fll().cumulative() - shifted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("drift difference") {
  CHECK(drift_difference(1.4, 1.0, 1.0, 1.0) == doctest::Approx(0.6));
  CHECK(drift_difference(2.0, 2.0, 1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("Exp3P-drift feeds 1/2 first and stays in [0, 1] on a truncated walk") {
  RandomWalkSpec spec;
  spec.T = 10000;
  spec.truncated = true;
  spec.with_switching_cost = true;
  Rng rng(12);
  const auto r = realize_random_walk(spec, rng);
  Exp3pDriftPlayer q(2, BoundsConfig::of(*r, 10000), std::nullopt, 4);
  double lo = 1.0, hi = 0.0;
  bool first = true;
  class Probe : public Player {
   public:
    Probe(Exp3pDriftPlayer& inner, double& lo, double& hi, bool& first)
        : Player(2), inner_(inner), lo_(lo), hi_(hi), first_(first) {}
    std::string name() const override { return "probe"; }
    Feedback preferred_feedback() const override { return Feedback::Bandit; }

   protected:
    Action do_choose() override { return inner_.choose(); }
    void do_observe_bandit(double l) override {
      inner_.observe_bandit(l);
      if (first_) {
        CHECK(inner_.last_fed() == 0.5);
        first_ = false;
      }
      lo_ = std::min(lo_, inner_.last_fed());
      hi_ = std::max(hi_, inner_.last_fed());
    }

   private:
    Exp3pDriftPlayer& inner_;
    double& lo_;
    double& hi_;
    bool& first_;
  } probe(q, lo, hi, first);
  play_game(*r, probe, 10000, Feedback::Bandit);
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
}

TEST_CASE("doubling restarts") {
  std::vector<Round> built;
  DoublingPlayer d(2, 4, [&](Round h, int) {
    built.push_back(h);
    return std::make_unique<ConstantPlayer>(2, 0);
  });
  const auto r = realize_oblivious(Matrix::Zero(20, 2));
  play_game(*r, d, 20, Feedback::Bandit);
  REQUIRE(d.restarts().size() == 2);
  CHECK(d.restarts()[0] == std::pair<Round, Round>{5, 8});
  CHECK(d.restarts()[1] == std::pair<Round, Round>{13, 16});
  CHECK(built == std::vector<Round>{4, 8, 16});
  CHECK(d.name() == "constant+doubling");
}

TEST_CASE("doubling is the inner player when the game fits the first horizon") {
  RandomWalkSpec spec;
  spec.T = 64;
  spec.with_switching_cost = true;
  Rng rng(8);
  const auto r = realize_random_walk(spec, rng);
  const auto b = BoundsConfig::of(*r, 64);
  Exp3pDriftPlayer alone(2, b, std::nullopt, 21);
  DoublingPlayer d(2, 64, [&](Round h, int) {
    BoundsConfig bh = b;
    bh.T = h;
    return std::make_unique<Exp3pDriftPlayer>(2, bh, std::nullopt, 21);
  });
  const auto a = play_game(*r, alone, 64, Feedback::Bandit);
  const auto c = play_game(*r, d, 64, Feedback::Bandit);
  CHECK(a.actions == c.actions);
  CHECK(d.restarts().empty());
}

TEST_CASE("doubling regret adds up across restarts for a linear-regret inner player") {
  // Always playing the worse arm of a fixed table: each block contributes
  // its own length in regret, so the total is T.
  const auto r = realize_oblivious(Matrix::NullaryExpr(30, 2, [](Eigen::Index, Eigen::Index x) {
    return double(x);
  }));
  DoublingPlayer d(2, 3, [](Round, int) { return std::make_unique<ConstantPlayer>(2, 1); });
  const auto tr = play_game(*r, d, 30, Feedback::Bandit);
  double sum = 0.0;
  Round start = 1;
  std::vector<Round> ends;
  for (const auto& [first, h] : d.restarts()) ends.push_back(first - 1);
  ends.push_back(30);
  for (Round e : ends) {
    sum += static_cast<double>(e - start + 1);
    start = e + 1;
  }
  CHECK(policy_regret(tr, *r).policy_regret == sum);
  CHECK(sum == 30.0);
}

TEST_CASE("exploration estimate") {
  CHECK(exploration_estimate(0.9, 0.5, 1.0, 0.0, 0) == doctest::Approx(0.7));
  CHECK(exploration_estimate(0.5, 0.5, 1.0, 0.3, 1) == doctest::Approx(0.5));
}

TEST_CASE("epoch planning") {
  CHECK(default_epoch_count(1000000) == 10000);
  CHECK(default_epoch_count(8) == 4);
  CHECK(default_epoch_count(1) == 1);
  const auto s = plan_epochs(1000000, 10000, 2, 1);
  CHECK(s.length == 100);
  CHECK(s.full_epochs == 10000);
  CHECK(s.tail() == 0);
  const auto u = plan_epochs(1000, 30, 2, 0);
  CHECK(u.length == 33);
  CHECK(u.full_epochs == 30);
  CHECK(u.tail() == 10);
  CHECK_THROWS_WITH_AS(plan_epochs(100, 22, 2, 2), "epoch length 4 < 2K(m+1) = 12", ConfigError);
}

TEST_CASE("epoch estimates do not depend on the exploitation action") {
  const Round T = 20000;
  Matrix tab(T, 3);
  for (Round t = 0; t < T; ++t) tab.row(t) << 0.2, 0.6, 0.4;
  const auto r = with_switching_cost(realize_oblivious(tab));
  const auto b = BoundsConfig::of(*r, T);

  auto estimates = [&](std::function<Action(Round)> pick) {
    MinibatchHedgePlayer p(3, b, {}, 17);
    p.force_exploitation(std::move(pick));
    play_game(*r, p, T, Feedback::Bandit);
    return p.last_estimates();
  };
  const Vector g0 = estimates([](Round) { return 0; });
  const Vector g1 = estimates([](Round) { return 1; });
  const Vector g2 = estimates([](Round j) { return static_cast<Action>(j % 3); });
  const Vector want = vec({0.5, 0.5 + 0.4 / (2 * (b.C + 2 * b.D)), 0.5 + 0.2 / (2 * (b.C + 2 * b.D))});
  CHECK((g0 - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g1 - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g2 - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("minibatch exploration intervals are separated and in range") {
  const Round T = 20000;
  const auto r = bernoulli_arms(T, 3, true);
  MinibatchHedgePlayer p(3, BoundsConfig::of(*r, T), {}, 9);
  const auto tr = play_game(*r, p, T, Feedback::Bandit);
  const auto& sch = p.schedule();
  CHECK(sch.J == default_epoch_count(T));
  CHECK(policy_regret(tr, *r).switch_count <= sch.J * (3 * 3 + 1));
  const auto g = SamplerGeometry{sch.length, 3, 1};
  const auto& starts = p.current_starts();
  REQUIRE(starts.size() == 3);
  for (Round st : starts) CHECK((st >= 1 && st <= g.cycle()));
  CHECK(well_separated(starts, g.cycle(), 1));
}

TEST_CASE("minibatch switch bound J(2K+1) for two arms") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomWalkSpec spec;
    spec.T = 6000;
    spec.with_switching_cost = true;
    Rng rng(seed);
    const auto r = realize_random_walk(spec, rng);
    MinibatchHedgePlayer p(2, BoundsConfig::of(*r, 6000), {}, seed + 50);
    const auto tr = play_game(*r, p, 6000, Feedback::Bandit);
    REQUIRE(policy_regret(tr, *r).switch_count <= p.schedule().J * 5);
  }
}

TEST_CASE("elimination schedule") {
  const auto s = elimination_stage_lengths(1000000);
  CHECK(s.size() == 5);
  CHECK(s[0] == 1000);
  CHECK(s[1] == 31623);
  CHECK(elimination_stage_lengths(10000) == std::vector<Round>{100, 1000, 3163, 5624, 7499});
  CHECK(elimination_stage_lengths(1) == std::vector<Round>{1});
  CHECK(elimination_radius(3, 100, 4, 0.05, 0.5) == doctest::Approx(0.286722137));
}

TEST_CASE("elimination on noiseless arms keeps only the best") {
  IidSpec spec;
  spec.means = vec({0.2, 0.5, 0.8});
  Rng rng(1);
  const auto r = with_switching_cost(realize_iid(spec, 10000, rng));
  EliminationPlayer p(3, 10000, 0.05, 0.5, 1.0);
  const auto tr = play_game(*r, p, 10000, Feedback::Bandit);
  CHECK(p.active() == std::vector<Action>{0});
  for (const auto& st : p.stages()) {
    if (!st.completed) continue;
    CHECK(st.means[0] == doctest::Approx(0.2));
  }
  CHECK(policy_regret(tr, *r).switch_count <= 3 * p.total_stages());
}

TEST_CASE("elimination active sets are nested and switches bounded") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Round T = 20000;
    const auto r = bernoulli_arms(T, seed, true);
    EliminationPlayer p(3, T, 0.05, 0.5, 1.0);
    const auto tr = play_game(*r, p, T, Feedback::Bandit);
    for (std::size_t s = 1; s < p.stages().size(); ++s) {
      const auto& prev = p.stages()[s - 1].active;
      for (Action a : p.stages()[s].active) {
        REQUIRE(std::find(prev.begin(), prev.end(), a) != prev.end());
      }
    }
    REQUIRE(policy_regret(tr, *r).switch_count <= 3 * p.total_stages());
    REQUIRE(p.total_stages() <= 6);
  }
}

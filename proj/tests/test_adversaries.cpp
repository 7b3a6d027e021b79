#include <sstream>

#include "doctest.h"
#include "polreg/adversaries.hpp"
#include "polreg/errors.hpp"
#include "polreg/learners.hpp"
#include "support.hpp"

using namespace polreg;
using polreg::testing::ScriptedPlayer;
using polreg::testing::table;

namespace {

double eval(const Realization& r, Round t, std::vector<Action> w) { return r.evaluate(t, w); }

}  // namespace

TEST_CASE("oblivious table") {
  const auto r = realize_oblivious(table({{0, 1}, {1, 0}}));
  CHECK(eval(*r, 1, {0}) == 0.0);
  CHECK(eval(*r, 2, {1}) == 0.0);
  CHECK(r->range_bound() == 1.0);
  CHECK(r->memory() == 0);

  const auto flat = realize_oblivious(Matrix::Constant(5, 3, 0.25));
  CHECK(flat->range_bound() == 0.0);
  for (Round t = 1; t <= 5; ++t) CHECK(flat->drift_bound(t) == 0.0);

  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(realize_oblivious(bad), ConfigError);
}

TEST_CASE("uniform table range validated by full scan") {
  Rng rng(7);
  Matrix tab(1000, 2);
  for (int t = 0; t < 1000; ++t)
    for (int x = 0; x < 2; ++x) tab(t, x) = uniform01(rng);
  const auto r = realize_oblivious(tab);
  Rng probe(1);
  const auto rep = validate_bounds(*r, 1000, probe);
  CHECK(rep.exhaustive);
  CHECK(rep.range_ok);
  CHECK(rep.drift_ok);
  CHECK(rep.worst_gap <= 1.0);
}

TEST_CASE("i.i.d. adversaries") {
  IidSpec spec;
  spec.means = Vector(2);
  spec.means << 0.5, 0.5;
  Rng rng(1);
  const auto flat = realize_iid(spec, 10, rng);
  for (Round t = 1; t <= 10; ++t) {
    CHECK(eval(*flat, t, {0}) == 0.5);
    CHECK(eval(*flat, t, {1}) == 0.5);
  }
  CHECK(flat->best_mean() == 0.5);

  spec.means << 0.3, 0.7;
  spec.noise = NoiseKind::Bernoulli;
  Rng seeded(1);
  const auto noisy = realize_iid(spec, 10000, seeded);
  CHECK(std::abs(noisy->table().col(0).mean() - 0.3) <= 0.02);
  CHECK(noisy->best_action() == 0);

  spec.noise = NoiseKind::None;
  CHECK(realize_iid(spec, 3, rng)->best_action() == 0);

  spec.means = Vector();
  CHECK_THROWS_AS(realize_iid(spec, 3, rng), ConfigError);
}

TEST_CASE("random walk gap and epsilon") {
  RandomWalkSpec spec;
  spec.T = 1000;
  CHECK(spec.gap() == doctest::Approx(0.1).epsilon(1e-12));

  Rng rng(3);
  const auto r = realize_random_walk(spec, rng);
  const auto* walk = find_random_walk(*r);
  REQUIRE(walk != nullptr);
  for (Round t = 1; t <= 1000; ++t) {
    CHECK(walk->loss(t, 1) - walk->loss(t, 0) == doctest::Approx(walk->z() * walk->epsilon()));
  }

  spec.with_switching_cost = true;
  Rng rng2(3);
  const auto sc = realize_random_walk(spec, rng2);
  CHECK(sc->range_bound() <= 2.0);
  CHECK(sc->memory() == 1);
  for (Round t = 2; t <= 1000; t += 7) {
    double lo = 1e300, hi = -1e300;
    for (Action a : {0, 1})
      for (Action b : {0, 1}) {
        const double v = eval(*sc, t, {a, b});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    CHECK(hi - lo <= 2.0);
  }
}

TEST_CASE("Z is equiprobable") {
  int plus = 0;
  RandomWalkSpec spec;
  spec.T = 1;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    Rng rng(s);
    plus += find_random_walk(*realize_random_walk(spec, rng))->z() > 0;
  }
  CHECK(std::abs(plus - 2000) < 200);
}

TEST_CASE("truncated walk drift stays below sqrt(3 log t + 16)") {
  RandomWalkSpec spec;
  spec.T = 100000;
  spec.truncated = true;
  Rng rng(11);
  const auto r = realize_random_walk(spec, rng);
  const auto* walk = find_random_walk(*r);
  const Vector& xi = walk->increments();
  for (Round t = 1; t <= spec.T; ++t) {
    const double clip = increment_clip(t, spec.truncation_delta);
    REQUIRE(std::abs(xi[t - 1]) < clip);
    if (t >= 2) REQUIRE(std::abs(xi[t - 1]) <= std::sqrt(3.0 * std::log(double(t)) + 16.0));
  }
  Rng probe(2);
  const auto rep = validate_bounds(*r, 10000, probe);
  CHECK(rep.drift_ok);
  CHECK(rep.drift_violations == 0);
}

TEST_CASE("untruncated walk violations are detected") {
  Vector xi = Vector::Constant(50, 0.1);
  xi[20] = 10.0;
  const RandomWalkLosses walk(xi, 1, 0.5, 1.0 / 80.0, false);
  Rng probe(2);
  const auto rep = validate_bounds(walk, 1000, probe);
  CHECK_FALSE(rep.drift_ok);
  CHECK(rep.drift_violations == 2);
  CHECK(rep.worst_drift_excess == doctest::Approx(10.0 - increment_clip(21, 1.0 / 80.0)));

  xi[20] = 0.1;
  const RandomWalkLosses calm(xi, 1, 0.5, 1.0 / 80.0, false);
  CHECK(validate_bounds(calm, 1000, probe).drift_ok);
}

TEST_CASE("switching cost wrapper bounds") {
  const auto r = with_switching_cost(realize_oblivious(table({{0, 1}, {1, 0}, {0.5, 0.2}})));
  Rng probe(1);
  const auto rep = validate_bounds(*r, 1000, probe);
  CHECK(rep.range_ok);
  CHECK(rep.worst_gap <= 2.0);
  CHECK(r->range_bound() == 2.0);
  CHECK(eval(*r, 1, {1}) == 1.0);
  CHECK(eval(*r, 2, {0, 1}) == 1.0);
  CHECK(eval(*r, 2, {1, 1}) == 0.0);
  CHECK_THROWS_AS(with_switching_cost(r), ConfigError);
}

TEST_CASE("memory-two reduction") {
  MemoryTwoReductionSpec spec;
  spec.inner.T = 9;
  Rng rng(4);
  const auto r = realize_memory_two_reduction(spec, 10, rng);
  CHECK(r->memory() == 2);
  CHECK(eval(*r, 1, {0}) == 0.0);
  CHECK(eval(*r, 1, {1}) == 0.0);

  const auto& red = dynamic_cast<const MemoryTwoReduction&>(*r);
  const auto* walk = find_random_walk(red.inner());
  REQUIRE(walk != nullptr);
  for (Round t = 2; t <= 10; ++t) {
    const std::vector<Action> w(static_cast<std::size_t>(r->window_length(t)), 0);
    CHECK(r->evaluate(t, w) == walk->loss(t - 1, 0));
  }
  // f_t never depends on the current action.
  for (Round t = 1; t <= 10; ++t) {
    for (int idx = 0; idx < 8; ++idx) {
      std::vector<Action> w = {(idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
      w.erase(w.begin(), w.end() - r->window_length(t));
      auto v = w;
      v.back() = 1 - v.back();
      CHECK(r->evaluate(t, w) == r->evaluate(t, v));
    }
  }
  ScriptedPlayer p(2, {0, 1, 1, 0}, Feedback::FullInformation);
  play_game(*r, p, 10, Feedback::FullInformation);
  for (const auto& l : p.full_seen) CHECK(l[0] == l[1]);

  spec.inner.T = 5;
  CHECK_THROWS_AS(realize_memory_two_reduction(spec, 10, rng), ConfigError);
}

TEST_CASE("bounded memory kernels") {
  const auto sw = realize_bounded_memory(
      [](Round, std::span<const Action> w) -> std::optional<double> {
        return w.size() < 2 ? 0.0 : double(w[0] != w[1]);
      },
      1, 2, 5);
  const auto ref = with_switching_cost(realize_oblivious(Matrix::Zero(5, 2)));
  for (Round t = 2; t <= 5; ++t)
    for (Action a : {0, 1})
      for (Action b : {0, 1}) CHECK(eval(*sw, t, {a, b}) == eval(*ref, t, {a, b}));

  const Matrix tab = table({{0.1, 0.4}, {0.3, 0.2}, {0.9, 0.0}});
  const auto m0 = realize_bounded_memory(
      [&](Round t, std::span<const Action> w) -> std::optional<double> { return tab(t - 1, w.back()); },
      0, 2, 3);
  const auto ob = realize_oblivious(tab);
  for (Round t = 1; t <= 3; ++t)
    for (Action a : {0, 1}) CHECK(eval(*m0, t, {a}) == eval(*ob, t, {a}));
  CHECK(m0->range_bound() == ob->range_bound());

  CHECK_THROWS_AS(realize_bounded_memory(
                      [](Round t, std::span<const Action>) -> std::optional<double> {
                        if (t == 2) return std::nullopt;
                        return 0.0;
                      },
                      1, 2, 3),
                  ConfigError);
}

TEST_CASE("memory-2 kernel baseline matches brute force over all 16 sequences") {
  Rng rng(8);
  std::vector<std::vector<double>> vals(4, std::vector<double>(8));
  for (auto& row : vals)
    for (double& v : row) v = uniform01(rng);
  const auto kernel = [&](Round t, std::span<const Action> w) -> std::optional<double> {
    std::size_t idx = 0;
    for (Action a : w) idx = idx * 2 + a;
    return vals[t - 1][idx];
  };
  const auto r = realize_bounded_memory(kernel, 2, 2, 4);
  for (int seq = 0; seq < 16; ++seq) {
    std::vector<Action> xs = {(seq >> 3) & 1, (seq >> 2) & 1, (seq >> 1) & 1, seq & 1};
    ScriptedPlayer p(2, xs);
    const auto tr = play_game(*r, p, 4, Feedback::Bandit);
    double incurred = 0.0;
    for (Round t = 1; t <= 4; ++t) {
      const auto len = static_cast<std::size_t>(std::min<Round>(t, 3));
      incurred += *kernel(t, std::span<const Action>(xs.data() + t - len, len));
    }
    double best = 1e300;
    for (Action x : {0, 1}) {
      double tot = 0.0;
      for (Round t = 1; t <= 4; ++t) {
        const std::vector<Action> w(static_cast<std::size_t>(std::min<Round>(t, 3)), x);
        tot += *kernel(t, w);
      }
      best = std::min(best, tot);
    }
    CHECK(policy_regret(tr, *r).policy_regret == doctest::Approx(incurred - best).epsilon(1e-12));
  }
}

TEST_CASE("evaluation is pure") {
  RandomWalkSpec spec;
  spec.T = 500;
  spec.with_switching_cost = true;
  Rng rng(6);
  const auto r = realize_random_walk(spec, rng);
  Rng pick(1);
  for (int i = 0; i < 10000; ++i) {
    const Round t = 2 + static_cast<Round>(uniform_index(pick, 499));
    const std::vector<Action> w = {static_cast<Action>(uniform_index(pick, 2)),
                                   static_cast<Action>(uniform_index(pick, 2))};
    REQUIRE(r->evaluate(t, w) == r->evaluate(t, w));
  }
}

TEST_CASE("constant realization validates with zero gap and drift") {
  const auto r = realize_oblivious(Matrix::Constant(10, 2, 3.0));
  Rng probe(1);
  const auto rep = validate_bounds(*r, 100, probe);
  CHECK(rep.worst_gap == 0.0);
  CHECK(rep.worst_drift == 0.0);
}

TEST_CASE("loss table CSV round trip") {
  Matrix tab(3, 2);
  tab << 0.1, 1.0 / 3.0, 2.5e-17, -4.0, 1e10, 0.0;
  std::stringstream ss;
  write_loss_table_csv(ss, tab);
  CHECK(ss.str().rfind("t,a0,a1\n", 0) == 0);
  CHECK(read_loss_table_csv(ss) == tab);

  std::stringstream bad("t,a0\n1,x\n");
  CHECK_THROWS_AS(read_loss_table_csv(bad), ConfigError);
}

TEST_CASE("random walk CSV export") {
  RandomWalkSpec spec;
  spec.T = 3;
  Rng rng(1);
  const auto r = realize_random_walk(spec, rng);
  std::stringstream ss;
  write_random_walk_csv(ss, *find_random_walk(*r));
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,l1,l2,z,epsilon");
  int rows = 0;
  for (std::string line; std::getline(ss, line);) rows += !line.empty();
  CHECK(rows == 3);
}

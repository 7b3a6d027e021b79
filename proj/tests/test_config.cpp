#include "doctest.h"
#include "polreg/config.hpp"
#include "polreg/errors.hpp"
#include "polreg/output.hpp"

using namespace polreg;

TEST_CASE("minimal run config takes defaults") {
  const auto c = parse_config(R"({"command": "run", "adversary": "random-walk",
                                  "player": "exp3p-drift", "T": 1000})");
  CHECK(c.command == Command::Run);
  CHECK(c.seed == 0);
  CHECK(c.repetitions == 1);
  CHECK(c.metric == Metric::PolicyRegret);
  REQUIRE(c.T.has_value());
  CHECK(*c.T == 1000);
  CHECK(std::holds_alternative<RandomWalkLossesSpec>(*c.adversary));
  CHECK(std::holds_alternative<Exp3pDriftSpec>(*c.player));
  CHECK(*c.adversary == AdversarySpec{RandomWalkLossesSpec{}});
}

TEST_CASE("T must be positive") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "run", "adversary": "random-walk",
                                        "player": "constant", "T": 0})"),
                       "T >= 1 required", ConfigError);
}

TEST_CASE("missing keys are named") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "run", "player": "constant", "T": 5})"),
                       "missing required key 'adversary'", ConfigError);
}

TEST_CASE("infeasible minibatch is rejected before running") {
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"command": "run", "adversary": "random-walk",
                       "player": {"kind": "minibatch-hedge", "epochs": 22, "m": 2}, "T": 100})"),
      "epoch length 4 < 2K(m+1) = 12", ConfigError);
}

TEST_CASE("unknown keys report their path") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "run", "adversary": "random-walk",
                                        "player": {"kind": "hedge", "foo": 1}, "T": 10})"),
                       "unknown key 'player.foo'", ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"command": "run", "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"command": "launch"})"), ConfigError);
}

TEST_CASE("config round trips through JSON") {
  RunConfig c;
  c.command = Command::Sweep;
  c.seed = 99;
  IidLossesSpec iid;
  iid.means = {0.4, 0.5, 0.6};
  iid.with_switching_cost = true;
  c.adversary = iid;
  EliminationSpec el;
  el.switch_cost = 1.0;
  c.player = el;
  c.grid = {100, 1000, 10000};
  c.repetitions = 7;
  c.metric = Metric::PseudoRegret;
  c.threads = 2;
  const auto back = config_from_json(to_json(c));
  CHECK(back == c);
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("a manifest is accepted as a config") {
  const auto c = parse_config(R"({"command": "sweep", "adversary": "random-walk",
                                  "player": "fll-switching", "feedback": "full",
                                  "grid": [100, 200, 400], "repetitions": 3, "seed": 5})");
  const auto manifest = manifest_json(c);
  CHECK(manifest["artifact"] == "polreg");
  CHECK(manifest["seed"] == 5);
  const auto again = parse_config(manifest.dump());
  CHECK(again == c);

  const auto a = run_sweep(experiment_of(c));
  const auto b = run_sweep(experiment_of(again));
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(a.records[i].policy_regret == b.records[i].policy_regret);
}

TEST_CASE("pairings are checked") {
  CHECK_THROWS_AS(parse_config(R"({"command": "run", "adversary": "random-walk",
                                   "player": "hedge", "feedback": "bandit", "T": 10})"),
                  ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"command": "run", "adversary": {"kind": "zero", "K": 3},
                                        "player": {"kind": "constant", "action": 3}, "T": 10})"),
                       "constant action 3 >= K = 3", ConfigError);
}

TEST_CASE("probe defaults its players") {
  const auto c = parse_config(R"({"command": "probe-lower-bound", "grid": [8000]})");
  CHECK(c.players == default_probe_players());
  CHECK(c.players.size() == 4);
}

TEST_CASE("command names") {
  for (auto cmd : {Command::Run, Command::Sweep, Command::ProbeLowerBound, Command::ValidateSampler,
                   Command::ValidateBounds, Command::FitRate}) {
    CHECK(parse_command(to_string(cmd)) == cmd);
  }
  for (auto m : {Metric::PolicyRegret, Metric::StandardRegret, Metric::Switches, Metric::PseudoRegret})
    CHECK(parse_metric(to_string(m)) == m);
}

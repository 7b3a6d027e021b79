#include "polreg/specs.hpp"

#include <fstream>

#include "polreg/errors.hpp"
#include "polreg/format.hpp"
#include "polreg/json_reader.hpp"
#include "polreg/learners.hpp"
#include "polreg/reductions.hpp"
#include "polreg/sampler.hpp"

namespace polreg {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(); }
json opt(const std::optional<Round>& v) { return v ? json(*v) : json(); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(); }

std::string noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Bernoulli: return "bernoulli";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Uniform: return "uniform";
  }
  return "none";
}

NoiseKind parse_noise(const std::string& s, const std::string& path) {
  if (s == "none") return NoiseKind::None;
  if (s == "bernoulli") return NoiseKind::Bernoulli;
  if (s == "gaussian") return NoiseKind::Gaussian;
  if (s == "uniform") return NoiseKind::Uniform;
  throw ConfigError(path + ": unknown noise '" + s + "' (none, bernoulli, gaussian, uniform)");
}

Matrix load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open loss table '" + path + "'");
  try {
    return read_loss_table_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void check_epsilon(const std::optional<double>& eps, const std::string& path) {
  if (eps && !(*eps > 0.0 && *eps <= 1.0)) {
    throw ConfigError(path + ".epsilon must lie in (0, 1]");
  }
}

void check_delta(double d, const std::string& path) {
  if (!(d > 0.0 && d < 1.0)) throw ConfigError(path + ".delta must lie in (0, 1)");
}

}  // namespace

// -- Adversaries -------------------------------------------------------------

std::string kind_of(const AdversarySpec& spec) {
  return std::visit(overloaded{
                        [](const ZeroLossesSpec&) { return std::string("zero"); },
                        [](const LossTableSpec&) { return std::string("loss-table"); },
                        [](const IidLossesSpec&) { return std::string("iid"); },
                        [](const RandomWalkLossesSpec&) { return std::string("random-walk"); },
                        [](const MemoryTwoLossesSpec&) { return std::string("memory-two"); },
                    },
                    spec);
}

json to_json(const AdversarySpec& spec) {
  json j = std::visit(
      overloaded{
          [](const ZeroLossesSpec& s) { return json{{"K", s.K}}; },
          [](const LossTableSpec& s) { return json{{"path", s.path}}; },
          [](const IidLossesSpec& s) {
            return json{{"means", s.means},
                        {"noise", noise_name(s.noise)},
                        {"scale", s.scale},
                        {"with_switching_cost", s.with_switching_cost},
                        {"switching_cost", s.switching_cost}};
          },
          [](const RandomWalkLossesSpec& s) {
            return json{{"epsilon", opt(s.epsilon)},
                        {"truncated", s.truncated},
                        {"delta", s.delta},
                        {"with_switching_cost", s.with_switching_cost},
                        {"switching_cost", s.switching_cost}};
          },
          [](const MemoryTwoLossesSpec& s) {
            return json{{"epsilon", opt(s.epsilon)},
                        {"truncated", s.truncated},
                        {"delta", s.delta},
                        {"switching_cost", s.switching_cost}};
          },
      },
      spec);
  j["kind"] = kind_of(spec);
  return j;
}

AdversarySpec adversary_from_json(const json& j, const std::string& path) {
  if (j.is_string()) return adversary_from_json(json{{"kind", j.get<std::string>()}}, path);
  ObjectReader r(j, path);
  const auto kind = r.required<std::string>("kind");
  AdversarySpec out;
  if (kind == "zero") {
    ZeroLossesSpec s;
    s.K = r.get<int>("K", s.K);
    if (s.K < 1) throw ConfigError(path + ".K >= 1 required");
    out = s;
  } else if (kind == "loss-table") {
    out = LossTableSpec{r.required<std::string>("path")};
  } else if (kind == "iid") {
    IidLossesSpec s;
    s.means = r.get<std::vector<double>>("means", s.means);
    s.noise = parse_noise(r.get<std::string>("noise", noise_name(s.noise)), r.sub("noise"));
    s.scale = r.get<double>("scale", s.scale);
    s.with_switching_cost = r.get<bool>("with_switching_cost", s.with_switching_cost);
    s.switching_cost = r.get<double>("switching_cost", s.switching_cost);
    if (s.means.empty()) throw ConfigError(path + ".means must not be empty");
    if (s.scale < 0.0) throw ConfigError(path + ".scale must be >= 0");
    out = s;
  } else if (kind == "random-walk") {
    RandomWalkLossesSpec s;
    s.epsilon = r.optional<double>("epsilon");
    s.truncated = r.get<bool>("truncated", s.truncated);
    s.delta = r.get<double>("delta", s.delta);
    s.with_switching_cost = r.get<bool>("with_switching_cost", s.with_switching_cost);
    s.switching_cost = r.get<double>("switching_cost", s.switching_cost);
    check_epsilon(s.epsilon, path);
    check_delta(s.delta, path);
    out = s;
  } else if (kind == "memory-two") {
    MemoryTwoLossesSpec s;
    s.epsilon = r.optional<double>("epsilon");
    s.truncated = r.get<bool>("truncated", s.truncated);
    s.delta = r.get<double>("delta", s.delta);
    s.switching_cost = r.get<double>("switching_cost", s.switching_cost);
    check_epsilon(s.epsilon, path);
    check_delta(s.delta, path);
    out = s;
  } else {
    throw ConfigError(r.sub("kind") + ": unknown adversary '" + kind +
                      "' (zero, loss-table, iid, random-walk, memory-two)");
  }
  r.finish();
  return out;
}

AdversaryShape shape_of(const AdversarySpec& spec) {
  return std::visit(
      overloaded{
          [](const ZeroLossesSpec& s) { return AdversaryShape{s.K, 0}; },
          [](const LossTableSpec& s) {
            return AdversaryShape{static_cast<int>(load_table(s.path).cols()), 0};
          },
          [](const IidLossesSpec& s) {
            return AdversaryShape{static_cast<int>(s.means.size()), s.with_switching_cost ? 1 : 0};
          },
          [](const RandomWalkLossesSpec& s) {
            return AdversaryShape{2, s.with_switching_cost ? 1 : 0};
          },
          [](const MemoryTwoLossesSpec&) { return AdversaryShape{2, 2}; },
      },
      spec);
}

RealizationPtr realize(const AdversarySpec& spec, Round T, Rng& rng) {
  if (T < 1) throw ConfigError("T >= 1 required");
  return std::visit(
      overloaded{
          [&](const ZeroLossesSpec& s) { return realize_oblivious(Matrix::Zero(T, s.K)); },
          [&](const LossTableSpec& s) {
            const Matrix table = load_table(s.path);
            if (table.rows() < T) {
              throw ConfigError(s.path + ": table has " + std::to_string(table.rows()) +
                                " rounds, game needs " + std::to_string(T));
            }
            return realize_oblivious(table.topRows(T));
          },
          [&](const IidLossesSpec& s) -> RealizationPtr {
            IidSpec is;
            is.means = Eigen::Map<const Vector>(s.means.data(), static_cast<Eigen::Index>(s.means.size()));
            is.noise = s.noise;
            is.scale = s.scale;
            RealizationPtr r = realize_iid(is, T, rng);
            return s.with_switching_cost ? with_switching_cost(r, s.switching_cost) : r;
          },
          [&](const RandomWalkLossesSpec& s) {
            RandomWalkSpec w;
            w.T = T;
            w.epsilon = s.epsilon;
            w.truncated = s.truncated;
            w.truncation_delta = s.delta;
            w.with_switching_cost = s.with_switching_cost;
            w.switching_cost = s.switching_cost;
            return realize_random_walk(w, rng);
          },
          [&](const MemoryTwoLossesSpec& s) {
            if (T < 2) throw ConfigError("memory-two adversary needs T >= 2");
            MemoryTwoReductionSpec m;
            m.inner.T = T - 1;
            m.inner.epsilon = s.epsilon;
            m.inner.truncated = s.truncated;
            m.inner.truncation_delta = s.delta;
            m.inner.with_switching_cost = true;
            m.inner.switching_cost = s.switching_cost;
            return realize_memory_two_reduction(m, T, rng);
          },
      },
      spec);
}

// -- Players -----------------------------------------------------------------

std::string kind_of(const PlayerSpec& spec) {
  return std::visit(overloaded{
                        [](const ConstantSpec&) { return std::string("constant"); },
                        [](const UniformRandomSpec&) { return std::string("uniform-random"); },
                        [](const AlwaysSwitchSpec&) { return std::string("always-switch"); },
                        [](const HedgeSpec&) { return std::string("hedge"); },
                        [](const FllSwitchingSpec&) { return std::string("fll-switching"); },
                        [](const Exp3pDriftSpec&) { return std::string("exp3p-drift"); },
                        [](const MinibatchHedgeSpec&) { return std::string("minibatch-hedge"); },
                        [](const EliminationSpec&) { return std::string("elimination"); },
                    },
                    spec);
}

json to_json(const PlayerSpec& spec) {
  json j = std::visit(
      overloaded{
          [](const ConstantSpec& s) { return json{{"action", s.action}}; },
          [](const UniformRandomSpec&) { return json::object(); },
          [](const AlwaysSwitchSpec&) { return json::object(); },
          [](const HedgeSpec&) { return json::object(); },
          [](const FllSwitchingSpec& s) {
            return json{{"switch_cost", opt(s.switch_cost)},
                        {"doubling", s.doubling},
                        {"initial_T", s.initial_T}};
          },
          [](const Exp3pDriftSpec& s) {
            return json{{"delta_p", opt(s.delta_p)},
                        {"doubling", s.doubling},
                        {"initial_T", s.initial_T}};
          },
          [](const MinibatchHedgeSpec& s) {
            return json{{"base_action", s.base_action},
                        {"j_scale", s.j_scale},
                        {"epochs", opt(s.epochs)},
                        {"m", opt(s.m)}};
          },
          [](const EliminationSpec& s) {
            return json{{"delta", s.delta},
                        {"conf_const", s.conf_const},
                        {"switch_cost", opt(s.switch_cost)}};
          },
      },
      spec);
  j["kind"] = kind_of(spec);
  return j;
}

PlayerSpec player_from_json(const json& j, const std::string& path) {
  if (j.is_string()) return player_from_json(json{{"kind", j.get<std::string>()}}, path);
  ObjectReader r(j, path);
  const auto kind = r.required<std::string>("kind");
  PlayerSpec out;
  if (kind == "constant") {
    ConstantSpec s;
    s.action = r.get<int>("action", s.action);
    if (s.action < 0) throw ConfigError(path + ".action must be >= 0");
    out = s;
  } else if (kind == "uniform-random") {
    out = UniformRandomSpec{};
  } else if (kind == "always-switch") {
    out = AlwaysSwitchSpec{};
  } else if (kind == "hedge") {
    out = HedgeSpec{};
  } else if (kind == "fll-switching") {
    FllSwitchingSpec s;
    s.switch_cost = r.optional<double>("switch_cost");
    s.doubling = r.get<bool>("doubling", s.doubling);
    s.initial_T = r.get<Round>("initial_T", s.initial_T);
    if (s.switch_cost && *s.switch_cost < 0.0) throw ConfigError(path + ".switch_cost must be >= 0");
    if (s.initial_T < 1) throw ConfigError(path + ".initial_T >= 1 required");
    out = s;
  } else if (kind == "exp3p-drift") {
    Exp3pDriftSpec s;
    s.delta_p = r.optional<double>("delta_p");
    s.doubling = r.get<bool>("doubling", s.doubling);
    s.initial_T = r.get<Round>("initial_T", s.initial_T);
    if (s.delta_p && !(*s.delta_p > 0.0 && *s.delta_p < 1.0)) {
      throw ConfigError(path + ".delta_p must lie in (0, 1)");
    }
    if (s.initial_T < 1) throw ConfigError(path + ".initial_T >= 1 required");
    out = s;
  } else if (kind == "minibatch-hedge") {
    MinibatchHedgeSpec s;
    s.base_action = r.get<int>("base_action", s.base_action);
    s.j_scale = r.get<double>("j_scale", s.j_scale);
    s.epochs = r.optional<Round>("epochs");
    s.m = r.optional<int>("m");
    if (s.base_action < 0) throw ConfigError(path + ".base_action must be >= 0");
    if (!(s.j_scale > 0.0)) throw ConfigError(path + ".j_scale must be > 0");
    if (s.epochs && *s.epochs < 1) throw ConfigError(path + ".epochs >= 1 required");
    if (s.m && *s.m < 0) throw ConfigError(path + ".m >= 0 required");
    out = s;
  } else if (kind == "elimination") {
    EliminationSpec s;
    s.delta = r.get<double>("delta", s.delta);
    s.conf_const = r.get<double>("conf_const", s.conf_const);
    s.switch_cost = r.optional<double>("switch_cost");
    if (!(s.delta > 0.0 && s.delta < 1.0)) throw ConfigError(path + ".delta must lie in (0, 1)");
    if (!(s.conf_const > 0.0)) throw ConfigError(path + ".conf_const must be > 0");
    out = s;
  } else {
    throw ConfigError(r.sub("kind") + ": unknown player '" + kind +
                      "' (constant, uniform-random, always-switch, hedge, fll-switching, "
                      "exp3p-drift, minibatch-hedge, elimination)");
  }
  r.finish();
  return out;
}

Feedback default_feedback(const PlayerSpec& spec) {
  if (std::holds_alternative<HedgeSpec>(spec) || std::holds_alternative<FllSwitchingSpec>(spec)) {
    return Feedback::FullInformation;
  }
  return Feedback::Bandit;
}

void check_feedback(const PlayerSpec& player, Feedback feedback) {
  const bool either = std::holds_alternative<ConstantSpec>(player) ||
                      std::holds_alternative<UniformRandomSpec>(player) ||
                      std::holds_alternative<AlwaysSwitchSpec>(player);
  if (!either && feedback != default_feedback(player)) {
    throw ConfigError("player '" + kind_of(player) + "' does not accept " +
                      std::string(to_string(feedback)) + " feedback");
  }
}

void check_pairing(const AdversarySpec& adversary, const PlayerSpec& player, Round T) {
  if (T < 1) throw ConfigError("T >= 1 required");
  const AdversaryShape shape = shape_of(adversary);
  if (std::holds_alternative<MemoryTwoLossesSpec>(adversary) && T < 2) {
    throw ConfigError("memory-two adversary needs T >= 2");
  }
  if (const auto* c = std::get_if<ConstantSpec>(&player); c && c->action >= shape.K) {
    throw ConfigError("constant action " + std::to_string(c->action) + " >= K = " +
                      std::to_string(shape.K));
  }
  if (const auto* mb = std::get_if<MinibatchHedgeSpec>(&player)) {
    if (mb->base_action >= shape.K) {
      throw ConfigError("base action " + std::to_string(mb->base_action) + " >= K = " +
                        std::to_string(shape.K));
    }
    const int m = mb->m.value_or(shape.m);
    const Round J = mb->epochs.value_or(default_epoch_count(T, mb->j_scale));
    plan_epochs(T, J, shape.K, m);
  }
  if (std::holds_alternative<EliminationSpec>(player) && T < shape.K) {
    throw ConfigError("elimination needs T >= K: " + std::to_string(T) + " < " +
                      std::to_string(shape.K));
  }
}

std::unique_ptr<Player> make_player(const PlayerSpec& spec, const RealizationPtr& r,
                                    Round T, std::uint64_t seed) {
  const int K = r->num_actions();
  return std::visit(
      overloaded{
          [&](const ConstantSpec& s) -> std::unique_ptr<Player> {
            return std::make_unique<ConstantPlayer>(K, s.action);
          },
          [&](const UniformRandomSpec&) -> std::unique_ptr<Player> {
            return std::make_unique<UniformRandomPlayer>(K, seed);
          },
          [&](const AlwaysSwitchSpec&) -> std::unique_ptr<Player> {
            return std::make_unique<AlwaysSwitchPlayer>(K);
          },
          [&](const HedgeSpec&) -> std::unique_ptr<Player> {
            return std::make_unique<HedgePlayer>(K, r->range_bound(), seed);
          },
          [&](const FllSwitchingSpec& s) -> std::unique_ptr<Player> {
            const double cost = s.switch_cost.value_or(declared_switching_cost(*r));
            if (!s.doubling) {
              return std::make_unique<FllSwitchingPlayer>(K, BoundsConfig::of(*r, T), cost, seed);
            }
            return std::make_unique<DoublingPlayer>(
                K, s.initial_T, [r, K, cost, seed](Round h, int i) -> std::unique_ptr<Player> {
                  return std::make_unique<FllSwitchingPlayer>(
                      K, BoundsConfig::of(*r, h), cost,
                      derive_seed(seed, {static_cast<std::uint64_t>(i)}));
                });
          },
          [&](const Exp3pDriftSpec& s) -> std::unique_ptr<Player> {
            if (!s.doubling) {
              return std::make_unique<Exp3pDriftPlayer>(K, BoundsConfig::of(*r, T), s.delta_p, seed);
            }
            return std::make_unique<DoublingPlayer>(
                K, s.initial_T, [r, K, s, seed](Round h, int i) -> std::unique_ptr<Player> {
                  return std::make_unique<Exp3pDriftPlayer>(
                      K, BoundsConfig::of(*r, h), s.delta_p,
                      derive_seed(seed, {static_cast<std::uint64_t>(i)}));
                });
          },
          [&](const MinibatchHedgeSpec& s) -> std::unique_ptr<Player> {
            BoundsConfig b = BoundsConfig::of(*r, T);
            if (s.m) b.m = *s.m;
            MinibatchHedgePlayer::Options o;
            o.base_action = s.base_action;
            o.j_scale = s.j_scale;
            o.epochs = s.epochs;
            return std::make_unique<MinibatchHedgePlayer>(K, b, o, seed);
          },
          [&](const EliminationSpec& s) -> std::unique_ptr<Player> {
            return std::make_unique<EliminationPlayer>(
                K, T, s.delta, s.conf_const, s.switch_cost.value_or(declared_switching_cost(*r)));
          },
      },
      spec);
}

}  // namespace polreg

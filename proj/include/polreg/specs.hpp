#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "polreg/adversaries.hpp"
#include "polreg/game.hpp"

namespace polreg {

// -- Adversaries -------------------------------------------------------------

struct ZeroLossesSpec {
  int K = 2;
  bool operator==(const ZeroLossesSpec&) const = default;
};

/// CSV with header t,a0,a1,...; the first T rows are used.
struct LossTableSpec {
  std::string path;
  bool operator==(const LossTableSpec&) const = default;
};

struct IidLossesSpec {
  std::vector<double> means{0.5, 0.5};
  NoiseKind noise = NoiseKind::Uniform;
  double scale = 0.5;
  bool with_switching_cost = false;
  double switching_cost = 1.0;
  bool operator==(const IidLossesSpec&) const = default;
};

struct RandomWalkLossesSpec {
  std::optional<double> epsilon;
  bool truncated = false;
  double delta = 1.0 / 80.0;
  bool with_switching_cost = false;
  double switching_cost = 1.0;
  bool operator==(const RandomWalkLossesSpec&) const = default;
};

/// Memory-two reduction over a switching-cost random walk of T-1 rounds.
struct MemoryTwoLossesSpec {
  std::optional<double> epsilon;
  bool truncated = false;
  double delta = 1.0 / 80.0;
  double switching_cost = 1.0;
  bool operator==(const MemoryTwoLossesSpec&) const = default;
};

using AdversarySpec = std::variant<ZeroLossesSpec, LossTableSpec, IidLossesSpec,
                                   RandomWalkLossesSpec, MemoryTwoLossesSpec>;

std::string kind_of(const AdversarySpec& spec);
nlohmann::json to_json(const AdversarySpec& spec);
/// Accepts a bare kind string or an object with "kind".
AdversarySpec adversary_from_json(const nlohmann::json& j, const std::string& path = "adversary");

struct AdversaryShape {
  int K = 2;
  int m = 0;
};
/// Action count and memory without realizing (reads the table for loss-table).
AdversaryShape shape_of(const AdversarySpec& spec);

RealizationPtr realize(const AdversarySpec& spec, Round T, Rng& rng);

// -- Players -----------------------------------------------------------------

struct ConstantSpec {
  Action action = 0;
  bool operator==(const ConstantSpec&) const = default;
};
struct UniformRandomSpec {
  bool operator==(const UniformRandomSpec&) const = default;
};
struct AlwaysSwitchSpec {
  bool operator==(const AlwaysSwitchSpec&) const = default;
};
/// Anytime Hedge under full information.
struct HedgeSpec {
  bool operator==(const HedgeSpec&) const = default;
};
struct FllSwitchingSpec {
  /// Defaults to the adversary's declared switching cost (0 when it has none).
  std::optional<double> switch_cost;
  bool doubling = false;
  Round initial_T = 16;
  bool operator==(const FllSwitchingSpec&) const = default;
};
struct Exp3pDriftSpec {
  /// Defaults to 1/T.
  std::optional<double> delta_p;
  bool doubling = false;
  Round initial_T = 16;
  bool operator==(const Exp3pDriftSpec&) const = default;
};
struct MinibatchHedgeSpec {
  Action base_action = 0;
  double j_scale = 1.0;
  /// Defaults to ceil(j_scale T^{2/3}).
  std::optional<Round> epochs;
  /// Defaults to the adversary's memory.
  std::optional<int> m;
  bool operator==(const MinibatchHedgeSpec&) const = default;
};
struct EliminationSpec {
  double delta = 0.05;
  double conf_const = 0.5;
  /// Defaults to the adversary's declared switching cost.
  std::optional<double> switch_cost;
  bool operator==(const EliminationSpec&) const = default;
};

using PlayerSpec = std::variant<ConstantSpec, UniformRandomSpec, AlwaysSwitchSpec,
                                HedgeSpec, FllSwitchingSpec, Exp3pDriftSpec,
                                MinibatchHedgeSpec, EliminationSpec>;

std::string kind_of(const PlayerSpec& spec);
nlohmann::json to_json(const PlayerSpec& spec);
PlayerSpec player_from_json(const nlohmann::json& j, const std::string& path = "player");

Feedback default_feedback(const PlayerSpec& spec);

/// Throws ConfigError when the pairing cannot run at horizon T, echoing the
/// violated inequality.
/// Throws ConfigError when the player cannot learn from `feedback`.
void check_feedback(const PlayerSpec& player, Feedback feedback);
void check_pairing(const AdversarySpec& adversary, const PlayerSpec& player, Round T);

/// Builds the player for one game; reductions read (C, D, m) from `r`.
std::unique_ptr<Player> make_player(const PlayerSpec& spec, const RealizationPtr& r,
                                    Round T, std::uint64_t seed);

}  // namespace polreg

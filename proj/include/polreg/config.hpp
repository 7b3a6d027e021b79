#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "polreg/harness.hpp"
#include "polreg/specs.hpp"

namespace polreg {

enum class Command { Run, Sweep, ProbeLowerBound, ValidateSampler, ValidateBounds, FitRate };

std::string to_string(Command c);
Command parse_command(const std::string& s);

enum class SamplerMode { Auto, Exact, MonteCarlo };

/// Resolved configuration of one CLI invocation. Fields a command does not
/// use keep their defaults and are still serialized, so a config always
/// round-trips.
struct RunConfig {
  Command command = Command::Run;
  std::uint64_t seed = 0;

  std::optional<AdversarySpec> adversary;
  std::optional<PlayerSpec> player;
  /// probe-lower-bound players.
  std::vector<PlayerSpec> players;
  std::optional<Feedback> feedback;

  std::optional<Round> T;
  std::vector<Round> grid;
  int repetitions = 1;
  Metric metric = Metric::PolicyRegret;
  bool full_grid_fit = false;
  int threads = 1;

  // validate-sampler
  std::optional<Round> epoch_length;
  int K = 2;
  int m = 0;
  std::int64_t draws = 100000;
  SamplerMode sampler_mode = SamplerMode::Auto;

  // validate-bounds
  std::int64_t budget = 100000;

  // fit-rate
  std::string input;

  std::string output_dir;
  std::string trace;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON document (a bare config or an emitted manifest.json) and
/// validates it; see validate().
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Per-command required keys, ranges and pairing feasibility. Throws
/// ConfigError naming the key or the violated inequality.
void validate(const RunConfig& config);

/// The players probed by default.
std::vector<PlayerSpec> default_probe_players();

/// Sweep spec for the sweep command (and, with grid = {T}, for run).
ExperimentSpec experiment_of(const RunConfig& config);

}  // namespace polreg

#include "polreg/config.hpp"

#include "polreg/errors.hpp"
#include "polreg/json_reader.hpp"
#include "polreg/sampler.hpp"

namespace polreg {

using nlohmann::json;

namespace {

std::string mode_name(SamplerMode m) {
  switch (m) {
    case SamplerMode::Auto: return "auto";
    case SamplerMode::Exact: return "exact";
    case SamplerMode::MonteCarlo: return "monte-carlo";
  }
  return "auto";
}

SamplerMode parse_mode(const std::string& s) {
  if (s == "auto") return SamplerMode::Auto;
  if (s == "exact") return SamplerMode::Exact;
  if (s == "monte-carlo") return SamplerMode::MonteCarlo;
  throw ConfigError("sampler_mode: unknown mode '" + s + "' (auto, exact, monte-carlo)");
}

Feedback parse_feedback(const std::string& s) {
  if (s == "full") return Feedback::FullInformation;
  if (s == "bandit") return Feedback::Bandit;
  throw ConfigError("feedback: expected 'full' or 'bandit', got '" + s + "'");
}

void require_T(Round T) {
  if (T < 1) throw ConfigError("T >= 1 required");
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Run: return "run";
    case Command::Sweep: return "sweep";
    case Command::ProbeLowerBound: return "probe-lower-bound";
    case Command::ValidateSampler: return "validate-sampler";
    case Command::ValidateBounds: return "validate-bounds";
    case Command::FitRate: return "fit-rate";
  }
  return "run";
}

Command parse_command(const std::string& s) {
  if (s == "run") return Command::Run;
  if (s == "sweep") return Command::Sweep;
  if (s == "probe-lower-bound") return Command::ProbeLowerBound;
  if (s == "validate-sampler") return Command::ValidateSampler;
  if (s == "validate-bounds") return Command::ValidateBounds;
  if (s == "fit-rate") return Command::FitRate;
  throw ConfigError("command: unknown command '" + s + "'");
}

std::vector<PlayerSpec> default_probe_players() {
  MinibatchHedgeSpec mb;
  mb.m = 1;
  return {Exp3pDriftSpec{}, mb, ConstantSpec{}, UniformRandomSpec{}};
}

RunConfig config_from_json(const json& doc) {
  // An emitted manifest wraps the config.
  if (doc.is_object() && doc.contains("artifact") && doc.contains("config")) {
    ObjectReader m(doc, "");
    m.ignore("artifact");
    m.ignore("version");
    m.ignore("seed");
    const json* inner = m.raw("config");
    m.finish();
    if (!inner) throw ConfigError("manifest has no config");
    return config_from_json(*inner);
  }

  ObjectReader r(doc, "");
  RunConfig c;
  c.command = parse_command(r.required<std::string>("command"));
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  if (const json* a = r.raw("adversary")) c.adversary = adversary_from_json(*a, "adversary");
  if (const json* p = r.raw("player")) c.player = player_from_json(*p, "player");
  if (const json* ps = r.raw("players")) {
    if (!ps->is_array()) throw ConfigError("players: expected an array");
    for (std::size_t i = 0; i < ps->size(); ++i) {
      c.players.push_back(player_from_json((*ps)[i], "players[" + std::to_string(i) + "]"));
    }
  }
  if (auto fb = r.optional<std::string>("feedback")) c.feedback = parse_feedback(*fb);
  c.T = r.optional<Round>("T");
  c.grid = r.get<std::vector<Round>>("grid", c.grid);
  c.repetitions = r.get<int>("repetitions", c.repetitions);
  c.metric = parse_metric(r.get<std::string>("metric", to_string(c.metric)));
  c.full_grid_fit = r.get<bool>("full_grid_fit", c.full_grid_fit);
  c.threads = r.get<int>("threads", c.threads);
  c.epoch_length = r.optional<Round>("epoch_length");
  c.K = r.get<int>("K", c.K);
  c.m = r.get<int>("m", c.m);
  c.draws = r.get<std::int64_t>("draws", c.draws);
  c.sampler_mode = parse_mode(r.get<std::string>("sampler_mode", mode_name(c.sampler_mode)));
  c.budget = r.get<std::int64_t>("budget", c.budget);
  c.input = r.get<std::string>("input", c.input);
  c.output_dir = r.get<std::string>("output_dir", c.output_dir);
  c.trace = r.get<std::string>("trace", c.trace);
  r.finish();

  if (c.command == Command::ProbeLowerBound && c.players.empty()) {
    c.players = default_probe_players();
  }
  validate(c);
  return c;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["seed"] = c.seed;
  j["adversary"] = c.adversary ? to_json(*c.adversary) : json();
  j["player"] = c.player ? to_json(*c.player) : json();
  j["players"] = json::array();
  for (const auto& p : c.players) j["players"].push_back(to_json(p));
  j["feedback"] = c.feedback ? json(std::string(to_string(*c.feedback))) : json();
  j["T"] = c.T ? json(*c.T) : json();
  j["grid"] = c.grid;
  j["repetitions"] = c.repetitions;
  j["metric"] = to_string(c.metric);
  j["full_grid_fit"] = c.full_grid_fit;
  j["threads"] = c.threads;
  j["epoch_length"] = c.epoch_length ? json(*c.epoch_length) : json();
  j["K"] = c.K;
  j["m"] = c.m;
  j["draws"] = c.draws;
  j["sampler_mode"] = mode_name(c.sampler_mode);
  j["budget"] = c.budget;
  j["input"] = c.input;
  j["output_dir"] = c.output_dir;
  j["trace"] = c.trace;
  return j;
}

void validate(const RunConfig& c) {
  if (c.threads < 1) throw ConfigError("threads >= 1 required");
  switch (c.command) {
    case Command::Run: {
      if (!c.adversary) throw ConfigError("missing required key 'adversary'");
      if (!c.player) throw ConfigError("missing required key 'player'");
      if (!c.T) throw ConfigError("missing required key 'T'");
      require_T(*c.T);
      if (c.feedback) check_feedback(*c.player, *c.feedback);
      check_pairing(*c.adversary, *c.player, *c.T);
      break;
    }
    case Command::Sweep: {
      if (!c.adversary) throw ConfigError("missing required key 'adversary'");
      if (!c.player) throw ConfigError("missing required key 'player'");
      experiment_of(c).check();
      if (c.feedback) check_feedback(*c.player, *c.feedback);
      for (Round T : c.grid) check_pairing(*c.adversary, *c.player, T);
      break;
    }
    case Command::ProbeLowerBound: {
      if (c.grid.empty()) throw ConfigError("missing required key 'grid'");
      ExperimentSpec spec;
      spec.grid = c.grid;
      spec.repetitions = c.repetitions;
      spec.check();
      const AdversarySpec walk = RandomWalkLossesSpec{std::nullopt, false, 1.0 / 80.0, true, 1.0};
      for (const auto& p : c.players) {
        if (default_feedback(p) != Feedback::Bandit) {
          throw ConfigError("probe-lower-bound: player '" + kind_of(p) +
                            "' does not take bandit feedback");
        }
        for (Round T : c.grid) check_pairing(walk, p, T);
      }
      break;
    }
    case Command::ValidateSampler: {
      if (!c.epoch_length) throw ConfigError("missing required key 'epoch_length'");
      if (c.draws < 1) throw ConfigError("draws >= 1 required");
      SamplerGeometry{*c.epoch_length, c.K, c.m}.check();
      break;
    }
    case Command::ValidateBounds: {
      if (!c.adversary) throw ConfigError("missing required key 'adversary'");
      if (!c.T) throw ConfigError("missing required key 'T'");
      require_T(*c.T);
      if (c.budget < 1) throw ConfigError("budget >= 1 required");
      break;
    }
    case Command::FitRate: {
      if (c.input.empty()) throw ConfigError("missing required key 'input'");
      break;
    }
  }
}

ExperimentSpec experiment_of(const RunConfig& c) {
  ExperimentSpec s;
  if (c.adversary) s.adversary = *c.adversary;
  if (c.player) s.player = *c.player;
  s.feedback = c.feedback;
  s.grid = c.command == Command::Run && c.T ? std::vector<Round>{*c.T} : c.grid;
  s.repetitions = c.command == Command::Run ? 1 : c.repetitions;
  s.master_seed = c.seed;
  s.metric = c.metric;
  s.full_grid_fit = c.full_grid_fit;
  s.threads = c.threads;
  return s;
}

}  // namespace polreg

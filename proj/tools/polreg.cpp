// polreg: policy-regret experiments from the command line.

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polreg/adversaries.hpp"
#include "polreg/config.hpp"
#include "polreg/errors.hpp"
#include "polreg/format.hpp"
#include "polreg/harness.hpp"
#include "polreg/output.hpp"
#include "polreg/sampler.hpp"

using namespace polreg;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kContract = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string adversary;
  std::string player;
  std::string players;
  std::string feedback;
  std::optional<Round> T;
  std::string grid;
  std::optional<int> reps;
  std::string metric;
  bool full_fit = false;
  std::optional<int> threads;
  std::optional<Round> epoch_length;
  std::optional<Round> cycle;
  std::optional<int> K;
  std::optional<int> m;
  std::optional<std::int64_t> draws;
  std::string mode;
  std::optional<std::int64_t> budget;
  std::string input;
  std::string out;
  std::string trace;
};

json spec_arg(const std::string& s) {
  if (!s.empty() && (s.front() == '{' || s.front() == '[')) {
    try {
      return json::parse(s);
    } catch (const json::parse_error& e) {
      throw ConfigError("bad JSON argument: " + std::string(e.what()));
    }
  }
  return s;
}

std::vector<Round> parse_grid(const std::string& s) {
  std::vector<Round> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Round v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ConfigError("grid: bad horizon '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

// Document from --config, with explicit flags layered on top.
RunConfig resolve(const std::string& command, const Flags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config '" + f.config + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(f.config + ": not valid JSON: " + e.what());
    }
    if (doc.contains("artifact") && doc.contains("config")) doc = doc["config"];
    if (!doc.is_object()) throw ConfigError(f.config + ": expected a JSON object");
  }
  if (doc.contains("command") && doc["command"] != command) {
    throw ConfigError("config is for command '" + doc["command"].get<std::string>() +
                      "', not '" + command + "'");
  }
  doc["command"] = command;
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.adversary.empty()) doc["adversary"] = spec_arg(f.adversary);
  if (!f.player.empty()) doc["player"] = spec_arg(f.player);
  if (!f.players.empty()) {
    json ps = spec_arg(f.players);
    if (ps.is_string()) {
      json arr = json::array();
      std::stringstream ss(f.players);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(item);
      ps = arr;
    }
    doc["players"] = ps;
  }
  if (!f.feedback.empty()) doc["feedback"] = f.feedback;
  if (f.T) doc["T"] = *f.T;
  if (!f.grid.empty()) doc["grid"] = parse_grid(f.grid);
  if (f.reps) doc["repetitions"] = *f.reps;
  if (!f.metric.empty()) doc["metric"] = f.metric;
  if (f.full_fit) doc["full_grid_fit"] = true;
  if (f.threads) doc["threads"] = *f.threads;
  if (f.K) doc["K"] = *f.K;
  if (f.m) doc["m"] = *f.m;
  if (f.epoch_length) doc["epoch_length"] = *f.epoch_length;
  if (f.cycle) {
    const int m = doc.value("m", 0);
    doc["epoch_length"] = *f.cycle + 2 * m + 1;
  }
  if (f.draws) doc["draws"] = *f.draws;
  if (!f.mode.empty()) doc["sampler_mode"] = f.mode;
  if (f.budget) doc["budget"] = *f.budget;
  if (!f.input.empty()) doc["input"] = f.input;
  if (!f.out.empty()) doc["output_dir"] = f.out;
  if (!f.trace.empty()) doc["trace"] = f.trace;
  return config_from_json(doc);
}

int status_code(const SweepResult& res) {
  if (res.failures(CellStatus::ContractViolation) > 0) return kContract;
  if (res.failures(CellStatus::ConfigError) > 0) return kInvalid;
  return kOk;
}

void report_failures(const SweepResult& res) {
  for (const auto& r : res.records) {
    if (r.status == CellStatus::Ok) continue;
    std::cerr << "T=" << r.T << " rep=" << r.rep << ": " << r.error << '\n';
  }
}

int cmd_run(const RunConfig& c) {
  const ExperimentSpec spec = experiment_of(c);
  std::ofstream trace_out;
  TraceSink sink;
  std::mutex mu;
  if (!c.trace.empty()) {
    trace_out.open(c.trace);
    if (!trace_out) throw std::runtime_error(c.trace + ": cannot open for writing");
    sink = [&](const json& ev) {
      std::lock_guard<std::mutex> lock(mu);
      trace_out << ev.dump() << '\n';
    };
  }
  SweepResult res;
  res.spec = spec;
  res.records.push_back(run_cell(spec, *c.T, 0, {}, sink));
  res.per_T = aggregate(res.records, spec.metric);

  std::ostringstream csv;
  write_records_csv(csv, res.records);
  std::cout << csv.str();
  if (!c.output_dir.empty()) {
    write_file(c.output_dir, "results.csv", csv.str());
    write_file(c.output_dir, "manifest.json", manifest_json(c).dump(2) + "\n");
  }
  report_failures(res);
  return status_code(res);
}

int cmd_sweep(const RunConfig& c) {
  const SweepResult res = run_sweep(experiment_of(c));
  std::ostringstream csv;
  write_records_csv(csv, res.records);
  const std::string summary = summary_json(res).dump(2) + "\n";
  if (!c.output_dir.empty()) {
    write_file(c.output_dir, "results.csv", csv.str());
    write_file(c.output_dir, "summary.json", summary);
    write_file(c.output_dir, "manifest.json", manifest_json(c).dump(2) + "\n");
    std::cout << summary;
  } else {
    std::cout << csv.str();
    std::cerr << summary;
  }
  report_failures(res);
  return status_code(res);
}

int cmd_probe(const RunConfig& c) {
  const auto rows = lower_bound_probe(c.players, c.grid, c.repetitions, c.seed, c.threads);
  std::ostringstream csv;
  csv << "player,T,n,normalized_mean,se,failures\n";
  std::int64_t failures = 0;
  for (const auto& r : rows) {
    csv << r.player << ',' << r.T << ',' << r.n << ',' << format_double(r.mean) << ','
        << format_double(r.se) << ',' << r.failures << '\n';
    failures += r.failures;
  }
  std::cout << csv.str();
  if (!c.output_dir.empty()) {
    write_file(c.output_dir, "probe.csv", csv.str());
    write_file(c.output_dir, "manifest.json", manifest_json(c).dump(2) + "\n");
  }
  return failures > 0 ? kContract : kOk;
}

json marginals_json(const ExactMarginals& em) {
  return {{"mode", "exact"},
          {"cycle", em.geometry.cycle()},
          {"outcomes", em.total},
          {"counts", em.counts},
          {"uniform", em.uniform}};
}

int cmd_sampler(const RunConfig& c) {
  const SamplerGeometry g{*c.epoch_length, c.K, c.m};
  const bool exact = c.sampler_mode == SamplerMode::Exact ||
                     (c.sampler_mode == SamplerMode::Auto && g.cycle() <= 12);
  json out = {{"epoch_length", g.epoch_length}, {"K", g.K}, {"m", g.m}};
  bool pass = false;
  if (exact) {
    const auto sampler = enumerate_sampler(g);
    const auto brute = enumerate_configurations(g);
    out["sampler"] = marginals_json(sampler);
    out["configurations"] = marginals_json(brute);
    pass = sampler.uniform && brute.uniform;
  } else {
    Rng rng(c.seed);
    const auto rep = chi_square_sampler(g, c.draws, rng);
    out["mode"] = "monte-carlo";
    out["cycle"] = g.cycle();
    out["draws"] = rep.draws;
    out["dof"] = rep.dof;
    out["statistic"] = rep.statistic;
    out["p_value"] = rep.p_value;
    out["significance"] = rep.significance;
    out["histogram"] = rep.histogram;
    pass = rep.pass;
  }
  out["pass"] = pass;
  std::cout << out.dump(2) << '\n';
  if (!c.output_dir.empty()) {
    write_file(c.output_dir, "sampler.json", out.dump(2) + "\n");
    write_file(c.output_dir, "manifest.json", manifest_json(c).dump(2) + "\n");
  }
  return pass ? kOk : kInvalid;
}

int cmd_bounds(const RunConfig& c) {
  Rng rng(derive_seed(c.seed, {0}));
  const RealizationPtr r = realize(*c.adversary, *c.T, rng);
  Rng probe(derive_seed(c.seed, {1}));
  const BoundsReport rep = validate_bounds(*r, c.budget, probe);
  const json out = {{"adversary", to_json(*c.adversary)},
                    {"T", *c.T},
                    {"C", r->range_bound()},
                    {"memory", r->memory()},
                    {"exhaustive", rep.exhaustive},
                    {"range_ok", rep.range_ok},
                    {"drift_ok", rep.drift_ok},
                    {"worst_gap", rep.worst_gap},
                    {"worst_drift", rep.worst_drift},
                    {"range_violations", rep.range_violations},
                    {"drift_violations", rep.drift_violations},
                    {"windows_checked", rep.windows_checked}};
  std::cout << out.dump(2) << '\n';
  if (!c.output_dir.empty()) {
    write_file(c.output_dir, "bounds.json", out.dump(2) + "\n");
    write_file(c.output_dir, "manifest.json", manifest_json(c).dump(2) + "\n");
  }
  return rep.range_ok && rep.drift_ok ? kOk : kInvalid;
}

int cmd_fit(const RunConfig& c) {
  std::ifstream in(c.input);
  if (!in) throw ConfigError("cannot open '" + c.input + "'");
  const auto records = read_records_csv(in);
  const auto per_T = aggregate(records, c.metric);
  const auto window = fit_window(per_T, c.full_grid_fit);
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : window) pts.emplace_back(static_cast<double>(a.T), a.mean);
  const RateFit fit = fit_rate(pts);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
  json out = {{"input", c.input},
              {"metric", to_string(c.metric)},
              {"alpha", fit.alpha},
              {"alpha_ci", {fit.alpha_lo, fit.alpha_hi}},
              {"beta", fit.beta},
              {"fit_points", fit.points},
              {"per_T", json::array()}};
  for (const auto& a : per_T) {
    out["per_T"].push_back({{"T", a.T}, {"mean", a.mean}, {"se", a.se}, {"n", a.n}});
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-regret simulations: adaptive adversaries, learners and rate fits"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config or manifest.json");
    sub->add_option("--seed", f.seed, "Master seed");
    sub->add_option("--out", f.out, "Output directory");
  };
  auto pairing = [&](CLI::App* sub) {
    sub->add_option("--adversary", f.adversary, "Adversary kind or JSON spec");
    sub->add_option("--player", f.player, "Player kind or JSON spec");
    sub->add_option("--feedback", f.feedback, "full | bandit");
    sub->add_option("--metric", f.metric, "policy_regret | standard_regret | switches | pseudo_regret");
  };

  auto* run = app.add_subcommand("run", "Play one game");
  common(run);
  pairing(run);
  run->add_option("-T,--T", f.T, "Horizon");
  run->add_option("--trace", f.trace, "Write player trace events (JSON lines)");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a horizon grid");
  common(sweep);
  pairing(sweep);
  sweep->add_option("--grid", f.grid, "Comma-separated horizons");
  sweep->add_option("--reps", f.reps, "Repetitions per horizon");
  sweep->add_flag("--full-fit", f.full_fit, "Fit every grid point");
  sweep->add_option("--threads", f.threads, "Worker threads");

  auto* probe = app.add_subcommand("probe-lower-bound", "Normalized regret vs the random-walk adversary");
  common(probe);
  probe->add_option("--players", f.players, "Comma-separated kinds or JSON array");
  probe->add_option("--grid", f.grid, "Comma-separated horizons");
  probe->add_option("--reps", f.reps, "Repetitions per horizon");
  probe->add_option("--threads", f.threads, "Worker threads");

  auto* sampler = app.add_subcommand("validate-sampler", "Check exploration-start marginals");
  common(sampler);
  sampler->add_option("--epoch-length", f.epoch_length, "Epoch length L");
  sampler->add_option("--cycle", f.cycle, "Cycle size L - 2m - 1 (alternative to --epoch-length)");
  sampler->add_option("-K", f.K, "Actions");
  sampler->add_option("-m", f.m, "Adversary memory");
  sampler->add_option("--draws", f.draws, "Monte Carlo draws");
  sampler->add_option("--mode", f.mode, "auto | exact | monte-carlo");

  auto* bounds = app.add_subcommand("validate-bounds", "Check declared range and drift");
  common(bounds);
  bounds->add_option("--adversary", f.adversary, "Adversary kind or JSON spec");
  bounds->add_option("-T,--T", f.T, "Horizon");
  bounds->add_option("--budget", f.budget, "Sampled probes when not exhaustive");

  auto* fit = app.add_subcommand("fit-rate", "Fit a regret exponent to an emitted CSV");
  fit->add_option("--config", f.config, "JSON config");
  fit->add_option("input", f.input, "results.csv")->required();
  fit->add_option("--metric", f.metric, "Column to fit");
  fit->add_flag("--full-fit", f.full_fit, "Fit every grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const RunConfig c = resolve(name, f);
    switch (c.command) {
      case Command::Run: return cmd_run(c);
      case Command::Sweep: return cmd_sweep(c);
      case Command::ProbeLowerBound: return cmd_probe(c);
      case Command::ValidateSampler: return cmd_sampler(c);
      case Command::ValidateBounds: return cmd_bounds(c);
      case Command::FitRate: return cmd_fit(c);
    }
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kContract;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}

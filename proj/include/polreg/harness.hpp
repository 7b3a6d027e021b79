#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polreg/game.hpp"
#include "polreg/specs.hpp"

namespace polreg {

enum class Metric { PolicyRegret, StandardRegret, Switches, PseudoRegret };

std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

struct ExperimentSpec {
  AdversarySpec adversary = RandomWalkLossesSpec{};
  PlayerSpec player = ConstantSpec{};
  /// Defaults to what the player prefers.
  std::optional<Feedback> feedback;
  std::vector<Round> grid;
  int repetitions = 1;
  std::uint64_t master_seed = 0;
  /// Aggregated and fitted.
  Metric metric = Metric::PolicyRegret;
  /// Fit every grid point instead of the upper half.
  bool full_grid_fit = false;
  int threads = 1;

  /// Throws ConfigError on a malformed grid or repetition count.
  void check() const;
};

enum class CellStatus { Ok, ConfigError, ContractViolation };

struct CellRecord {
  Round T = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double policy_regret = 0.0;
  double standard_regret = 0.0;
  std::int64_t switches = 0;
  /// Present for i.i.d. adversaries.
  std::optional<double> pseudo_regret;
  CellStatus status = CellStatus::Ok;
  std::string error;

  std::optional<double> value(Metric m) const;
};

struct TAggregate {
  Round T = 0;
  int n = 0;
  double mean = 0.0;
  double se = 0.0;
  double mean_switches = 0.0;
};

struct RateFit {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_se = 0.0;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  int points = 0;
  std::vector<std::string> warnings;
};

struct SweepResult {
  ExperimentSpec spec;
  /// Ordered by (grid index, rep).
  std::vector<CellRecord> records;
  std::vector<TAggregate> per_T;
  std::optional<RateFit> fit;
  std::vector<std::string> warnings;

  std::int64_t failures(CellStatus status) const;
};

/// Child seed of cell (T, rep); adversary and player streams are derived
/// from it with keys 0 and 1.
std::uint64_t cell_seed(std::uint64_t master, Round T, int rep);

/// Sees every finished game (for diagnostics); must be thread-safe when the
/// sweep runs on several threads.
using CellObserver = std::function<void(const CellRecord&, const Realization&,
                                        const Player&, const GameTranscript&)>;

/// Plays one cell. Configuration errors and contract violations are caught
/// and recorded in the returned record.
CellRecord run_cell(const ExperimentSpec& spec, Round T, int rep,
                    const CellObserver& observer = {},
                    const TraceSink& trace = {});

SweepResult run_sweep(const ExperimentSpec& spec, const CellObserver& observer = {});

/// Mean and standard error per T of `metric` over the successful records,
/// in first-seen order of T.
std::vector<TAggregate> aggregate(const std::vector<CellRecord>& records, Metric metric);

/// OLS of log(mean) on log(T) with a 95% Student-t interval on the slope.
/// Non-positive means are dropped with a warning; fewer than three usable
/// points throws ConfigError.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// The upper ceil(n/2) aggregates (at least min(n, 3)), or all of them.
std::vector<TAggregate> fit_window(const std::vector<TAggregate>& per_T, bool full);

/// sum_t (mu(X_t) + 1{X_t != X_{t-1}}) - T mu*. Throws std::invalid_argument
/// when the realization carries no means.
double pseudo_regret(const GameTranscript& transcript, const Realization& realization);

struct ProbeRow {
  std::string player;
  Round T = 0;
  int n = 0;
  /// Of policy regret / T^{2/3}.
  double mean = 0.0;
  double se = 0.0;
  std::int64_t failures = 0;
};

/// Each player against the untruncated random walk with switching cost and
/// epsilon = T^{-1/3}, bandit feedback.
std::vector<ProbeRow> lower_bound_probe(const std::vector<PlayerSpec>& players,
                                        const std::vector<Round>& grid, int repetitions,
                                        std::uint64_t master_seed, int threads = 1);

}  // namespace polreg

#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "polreg/random.hpp"
#include "polreg/realization.hpp"

namespace polreg {

// -- Oblivious processes ------------------------------------------------------

/// Memory-0 process backed by a T x K table (row t-1 holds l_t).
class ObliviousTable : public Realization {
 public:
  /// Throws ConfigError on non-finite entries or an empty table.
  explicit ObliviousTable(Matrix table);

  Round horizon() const override { return table_.rows(); }
  int num_actions() const override { return static_cast<int>(table_.cols()); }
  int memory() const override { return 0; }
  double evaluate(Round t, std::span<const Action> window) const override;
  double range_bound() const override { return range_; }
  double drift_bound(Round t) const override;
  double constant_total(Action x, Round T) const override;

  const Matrix& table() const { return table_; }

 private:
  Matrix table_;
  double range_ = 0.0;
  Vector drift_;
};

enum class NoiseKind { None, Bernoulli, Gaussian, Uniform };

/// i.i.d. losses: each round draws l_t(x) = mu(x) + noise independently.
/// Bernoulli ignores `scale` and draws l_t(x) in {0, 1} with mean mu(x);
/// Gaussian uses sd `scale`; Uniform draws on [mu - scale, mu + scale].
struct IidSpec {
  Vector means;
  NoiseKind noise = NoiseKind::None;
  double scale = 0.0;
};

class IidRealization : public ObliviousTable {
 public:
  IidRealization(Matrix table, Vector means);
  const Vector* iid_means() const override { return &means_; }
  double best_mean() const { return means_.minCoeff(); }
  Action best_action() const;

 private:
  Vector means_;
};

/// Clip level sqrt(3 ln(2t/delta)).
double increment_clip(Round t, double delta);

/// Randomized two-action lower-bound process:
///   l_t(0) = sum_{s<=t} xi_s,  l_t(1) = l_t(0) + Z * epsilon.
struct RandomWalkSpec {
  Round T = 1;
  /// Defaults to T^{-1/3}.
  std::optional<double> epsilon;
  bool truncated = false;
  /// Clip confidence; also sets the declared drift schedule of either variant.
  double truncation_delta = 1.0 / 80.0;
  bool with_switching_cost = false;
  double switching_cost = 1.0;

  double gap() const;
};

class RandomWalkLosses : public Realization {
 public:
  RandomWalkLosses(Vector increments, int z, double epsilon, double delta,
                   bool truncated);

  Round horizon() const override { return walk_.size(); }
  int num_actions() const override { return 2; }
  int memory() const override { return 0; }
  double evaluate(Round t, std::span<const Action> window) const override;
  double range_bound() const override { return epsilon_; }
  /// clip(t+1): bounds |l_t(x) - l_{t+1}(x)| = |xi_{t+1}|.
  double drift_bound(Round t) const override;
  double constant_total(Action x, Round T) const override;

  double loss(Round t, Action x) const {
    return walk_[t - 1] + (x == 1 ? z_ * epsilon_ : 0.0);
  }
  int z() const { return z_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  bool truncated() const { return truncated_; }
  const Vector& increments() const { return increments_; }
  const Vector& walk() const { return walk_; }
  /// The action with the smaller loss on every round.
  Action better_action() const { return z_ > 0 ? 0 : 1; }

 private:
  Vector increments_;
  Vector walk_;
  Vector prefix_;  // prefix_[t] = sum_{s<=t} walk_s, for O(1) constant totals
  int z_;
  double epsilon_;
  double delta_;
  bool truncated_;
};

// -- History-dependent wrappers ----------------------------------------------

/// f_1(x) = l_1(x); f_t = l_t(x_t) + cost * 1{x_t != x_{t-1}} for t >= 2.
class SwitchingCost : public Realization {
 public:
  SwitchingCost(RealizationPtr inner, double cost);

  Round horizon() const override { return inner_->horizon(); }
  int num_actions() const override { return inner_->num_actions(); }
  int memory() const override { return 1; }
  double evaluate(Round t, std::span<const Action> window) const override;
  double range_bound() const override;
  double drift_bound(Round t) const override;
  double constant_total(Action x, Round T) const override;
  const Vector* iid_means() const override { return inner_->iid_means(); }

  const Realization& inner() const { return *inner_; }
  double cost() const { return cost_; }

 private:
  RealizationPtr inner_;
  double cost_;
};

/// Full-information hardness reduction over a memory-1 process g:
///   f_1 = 0, f_2(x_1, x_2) = g_1(x_1), f_t(x_{t-2}, x_{t-1}, x_t) = g_{t-1}(x_{t-2}, x_{t-1}).
/// The current action never affects f_t.
class MemoryTwoReduction : public Realization {
 public:
  /// `inner` must have memory <= 1; the game may last inner.horizon() + 1 rounds.
  explicit MemoryTwoReduction(RealizationPtr inner);

  Round horizon() const override { return inner_->horizon() + 1; }
  int num_actions() const override { return inner_->num_actions(); }
  int memory() const override { return 2; }
  double evaluate(Round t, std::span<const Action> window) const override;
  double range_bound() const override { return inner_->range_bound(); }
  /// D_1 = max_x |g_1(x)|; D_t = D^g_{t-1} + C^g for t >= 2.
  double drift_bound(Round t) const override;
  double constant_total(Action x, Round T) const override;

  const Realization& inner() const { return *inner_; }

 private:
  RealizationPtr inner_;
  double first_drift_;
};

struct MemoryTwoReductionSpec {
  /// The inner process for T-1 rounds; forced to carry a switching cost.
  RandomWalkSpec inner;
};

/// Kernel for a memory-m process; nullopt marks an undefined window.
using MemoryKernel =
    std::function<std::optional<double>(Round t, std::span<const Action> window)>;

/// Memory-m process from an arbitrary kernel. Materialized (and validated
/// exhaustively) when K^{m+1} * T <= 1e6; otherwise the kernel is kept and
/// definedness plus the range/drift constants come from sampling.
class BoundedMemoryRealization : public Realization {
 public:
  BoundedMemoryRealization(MemoryKernel kernel, int memory, int num_actions,
                           Round T, std::uint64_t sample_seed = 0);

  Round horizon() const override { return horizon_; }
  int num_actions() const override { return num_actions_; }
  int memory() const override { return memory_; }
  double evaluate(Round t, std::span<const Action> window) const override;
  double range_bound() const override { return range_; }
  double drift_bound(Round t) const override { return drift_[t - 1]; }
  bool materialized() const { return !values_.empty(); }

 private:
  std::size_t index_of(std::span<const Action> window) const;

  MemoryKernel kernel_;
  int memory_;
  int num_actions_;
  Round horizon_;
  std::vector<std::vector<double>> values_;  // per round, base-K window index
  double range_ = 0.0;
  std::vector<double> drift_;
};

// -- Construction ------------------------------------------------------------

RealizationPtr realize_oblivious(Matrix loss_table);
/// Row-major draws: round 1 action 0, round 1 action 1, ...
std::shared_ptr<const IidRealization> realize_iid(const IidSpec& spec, Round T,
                                                  Rng& rng);
/// Draw order: Z from one 64-bit word (top bit), then xi_1..xi_T, each a
/// standard_normal() draw; the truncated variant redraws xi_t while
/// |xi_t| >= clip(t).
RealizationPtr realize_random_walk(const RandomWalkSpec& spec, Rng& rng);
/// Game of T rounds over an inner walk of T-1 rounds with switching cost.
RealizationPtr realize_memory_two_reduction(const MemoryTwoReductionSpec& spec,
                                            Round T, Rng& rng);
RealizationPtr realize_bounded_memory(MemoryKernel kernel, int memory,
                                      int num_actions, Round T);
RealizationPtr with_switching_cost(RealizationPtr inner, double cost = 1.0);

/// The random walk underneath a (possibly wrapped) realization, or null.
const RandomWalkLosses* find_random_walk(const Realization& r);

// -- Validation --------------------------------------------------------------

struct BoundsReport {
  bool exhaustive = false;
  bool range_ok = true;
  bool drift_ok = true;
  double worst_gap = 0.0;
  double worst_drift = 0.0;
  /// max over checks of (observed drift - D_t); <= 0 when drift_ok.
  double worst_drift_excess = -std::numeric_limits<double>::infinity();
  std::int64_t range_violations = 0;
  std::int64_t drift_violations = 0;
  std::int64_t windows_checked = 0;
};

inline constexpr double kExhaustiveLimit = 1e6;

/// Checks the declared C and D_t. Exhaustive when K^{m+1} * T <= 1e6,
/// otherwise `sample_budget` random (t, window) probes.
BoundsReport validate_bounds(const Realization& r, std::int64_t sample_budget,
                             Rng& rng);

// -- CSV interchange ---------------------------------------------------------

/// Header `t,a0,a1,...`, one row per round.
Matrix read_loss_table_csv(std::istream& in);
void write_loss_table_csv(std::ostream& out, const Matrix& table);
/// Columns `t,l1,l2,z,epsilon`.
void write_random_walk_csv(std::ostream& out, const RandomWalkLosses& walk);

}  // namespace polreg

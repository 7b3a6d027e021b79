#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "polreg/learners.hpp"
#include "polreg/realization.hpp"

namespace polreg {

/// Constants the reductions are tuned with. D is max_{t<=T} D_t from the
/// adversary's declared schedule.
struct BoundsConfig {
  double C = 1.0;
  double D = 0.0;
  int m = 0;
  Round T = 1;

  static BoundsConfig of(const Realization& r, Round T);
  /// Throws ConfigError unless C > 0, D >= 0, m >= 0, T >= 1.
  void check() const;
};

/// Switching cost carried by a SwitchingCost wrapper at the top of r, else 0.
double declared_switching_cost(const Realization& r);

// -- Full information: rescaled FLL ------------------------------------------

/// Subtracts the known switching surcharge from the full-information vector
/// to recover l_t, rescales l'_t = (l_t - min l_t) / (C - cost) and feeds
/// FLL tuned for horizon T.
class FllSwitchingPlayer : public Player {
 public:
  FllSwitchingPlayer(int num_actions, const BoundsConfig& bounds,
                     double switch_cost, std::uint64_t seed);
  std::string name() const override { return "fll-switching"; }
  Feedback preferred_feedback() const override { return Feedback::FullInformation; }

  /// l' for one received vector (exposed for tests).
  Vector rescale(const Vector& oblivious) const;
  FollowLazyLeader& fll() { return fll_; }

 protected:
  Action do_choose() override { return fll_.leader(); }
  void do_observe_full(const Vector& losses) override;

 private:
  Rng rng_;
  FollowLazyLeader fll_;
  double cost_;
  double width_;
  Action previous_ = -1;
};

// -- Bandit: drift-differenced Exp3.P ----------------------------------------

/// f'_t = (l_t(X_t) - l_{t-1}(X_{t-1})) / (2(C + D)) + 1/2, with f'_1 = 1/2.
double drift_difference(double current, double previous, double C, double D);

class Exp3pDriftPlayer : public Player {
 public:
  /// delta_p defaults to 1/T.
  Exp3pDriftPlayer(int num_actions, const BoundsConfig& bounds,
                   std::optional<double> delta_p, std::uint64_t seed);
  std::string name() const override { return "exp3p-drift"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

  const Exp3P& exp3p() const { return exp3p_; }
  double last_fed() const { return last_fed_; }

 protected:
  Action do_choose() override;
  void do_observe_bandit(double loss) override;

 private:
  BoundsConfig bounds_;
  Exp3P exp3p_;
  Rng rng_;
  Action chosen_ = 0;
  std::optional<double> previous_;
  double last_fed_ = 0.5;
};

// -- Doubling trick ----------------------------------------------------------

/// Builds a fixed-horizon player; `restart` counts previous restarts.
using HorizonFactory =
    std::function<std::unique_ptr<Player>(Round horizon, int restart)>;

/// Runs inner players for horizons T0, 2 T0, 4 T0, ..., starting a fresh one
/// whenever the current horizon is used up.
class DoublingPlayer : public Player {
 public:
  DoublingPlayer(int num_actions, Round initial_T, HorizonFactory factory);
  std::string name() const override;
  Feedback preferred_feedback() const override { return inner_->preferred_feedback(); }

  /// (first round, horizon) of every restart.
  const std::vector<std::pair<Round, Round>>& restarts() const { return restarts_; }
  Round current_horizon() const { return horizon_; }

 protected:
  Action do_choose() override;
  void do_observe_full(const Vector& losses) override { inner_->observe_full(losses); }
  void do_observe_bandit(double loss) override { inner_->observe_bandit(loss); }

 private:
  HorizonFactory factory_;
  std::unique_ptr<Player> inner_;
  Round horizon_;
  Round used_ = 0;
  std::vector<std::pair<Round, Round>> restarts_;
};

// -- Bandit: mini-batch Hedge with exploration intervals ---------------------

/// Epoch geometry for T rounds split into J epochs.
struct EpochSchedule {
  Round T = 0;
  Round J = 0;
  /// floor(T / J).
  Round length = 0;
  /// Epochs of full length; a trailing partial epoch of T - full * length
  /// rounds follows when that is positive.
  Round full_epochs = 0;

  Round tail() const { return T - full_epochs * length; }
};

/// ceil(scale * T^{2/3}); exact integer arithmetic for scale 1.
Round default_epoch_count(Round T, double scale = 1.0);
/// Throws ConfigError echoing the violated inequality when the epoch length
/// cannot host K exploration intervals.
EpochSchedule plan_epochs(Round T, Round J, int K, int m);

/// f_hat = (arm - base) / (2(C + (m+1) D)) + 1/2.
double exploration_estimate(double arm, double base, double C, double D, int m);

class MinibatchHedgePlayer : public Player {
 public:
  struct Options {
    Action base_action = 0;
    double j_scale = 1.0;
    /// Overrides ceil(j_scale T^{2/3}).
    std::optional<Round> epochs;
  };

  MinibatchHedgePlayer(int num_actions, const BoundsConfig& bounds,
                       const Options& options, std::uint64_t seed);
  std::string name() const override { return "minibatch-hedge"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

  const EpochSchedule& schedule() const { return schedule_; }
  const Hedge& hedge() const { return hedge_; }
  /// g_j of the last completed full epoch.
  const Vector& last_estimates() const { return last_g_; }
  /// Starts (1-based, within the epoch) of the current epoch's intervals.
  const std::vector<Round>& current_starts() const { return starts_; }

  /// Test hook: replaces Hedge's draw of the exploitation action.
  void force_exploitation(std::function<Action(Round epoch)> pick) {
    forced_ = std::move(pick);
  }

 protected:
  Action do_choose() override;
  void do_observe_bandit(double loss) override;

 private:
  void begin_epoch();

  BoundsConfig bounds_;
  Options options_;
  EpochSchedule schedule_;
  Hedge hedge_;
  Rng hedge_rng_;
  Rng explore_rng_;
  std::function<Action(Round)> forced_;

  Round epoch_ = 0;
  Round offset_ = 0;  // rounds already played in the current epoch
  bool in_tail_ = false;
  Action exploit_ = 0;
  std::vector<Round> starts_;
  std::vector<Action> plan_;
  Vector arm_obs_;
  Vector base_obs_;
  Vector last_g_;
};

// -- Bandit: successive elimination ------------------------------------------

/// T_s = ceil(T^{1 - 2^{-s}}) for s = 1..S, S = min{j : sum_{s<=j} T_s >= T}.
std::vector<Round> elimination_stage_lengths(Round T);
/// C_s = sqrt(conf_const (K / T_s) ln(K S / delta)).
double elimination_radius(int K, Round stage_length, int S, double delta,
                          double conf_const);

class EliminationPlayer : public Player {
 public:
  struct Stage {
    Round first_round = 0;
    std::vector<Action> active;
    Vector means;  // per action; NaN for actions not played this stage
    Action best = 0;
    double radius = 0.0;
    bool completed = false;
  };

  /// `switch_cost` is subtracted from losses observed right after a switch.
  EliminationPlayer(int num_actions, Round T, double delta, double conf_const,
                    double switch_cost = 0.0);
  std::string name() const override { return "elimination"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

  const std::vector<Round>& stage_lengths() const { return lengths_; }
  int total_stages() const { return static_cast<int>(lengths_.size()); }
  const std::vector<Stage>& stages() const { return stages_; }
  const std::vector<Action>& active() const { return active_; }

 protected:
  Action do_choose() override;
  void do_observe_bandit(double loss) override;

 private:
  void begin_stage(Round first_round);
  void finish_stage();

  int K_;
  Round T_;
  double delta_;
  double conf_const_;
  double cost_;
  std::vector<Round> lengths_;
  std::vector<Action> active_;
  std::vector<Stage> stages_;

  std::vector<Action> block_arm_;
  std::vector<Round> block_end_;  // cumulative play count at each block end
  std::size_t block_ = 0;
  Round played_ = 0;
  Action chosen_ = 0;
  Action previous_ = -1;
  Vector sums_;
  Eigen::VectorXi counts_;
};

}  // namespace polreg

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include "polreg/game.hpp"
#include "polreg/random.hpp"
#include "polreg/types.hpp"

namespace polreg {

/// Softmin of cumulative losses at rate eta.
template <typename Derived>
Vector softmin(const Eigen::MatrixBase<Derived>& cumulative, double eta) {
  const double lo = cumulative.minCoeff();
  Vector w = (-(eta) * (cumulative.array() - lo)).exp().matrix();
  return w / w.sum();
}

/// Throws ContractViolation unless every entry lies in [0, 1].
void require_unit_interval(const Vector& losses, const char* who);

/// Exponential weights over K experts.
///
/// Stored as cumulative losses so the anytime schedule eta_t = sqrt(8 ln K / t)
/// and a fixed rate share one representation.
class Hedge {
 public:
  /// Fixed learning rate.
  Hedge(int num_actions, double eta);
  /// eta = sqrt(8 ln K / N) for N known feedback events.
  static Hedge for_feedbacks(int num_actions, std::int64_t feedbacks);
  /// eta_t = sqrt(8 ln K / t) after t updates.
  static Hedge anytime(int num_actions);

  Vector distribution() const;
  Action sample(Rng& rng) const;
  /// Losses must lie in [0, 1]^K.
  void update(const Vector& losses);

  double eta() const;
  std::int64_t updates() const { return updates_; }
  int num_actions() const { return static_cast<int>(cumulative_.size()); }

 private:
  Hedge(int num_actions, std::optional<double> eta);

  Vector cumulative_;
  std::optional<double> eta_;
  std::int64_t updates_ = 0;
};

/// Samples from a probability vector by inversion.
Action sample_from(const Vector& p, Rng& rng);

/// Follow the Lazy Leader on the lattice p + (1/eps) Z^K.
///
/// One offset p ~ U[0, 1/eps)^K is drawn at construction. The played point
/// is the unique lattice point in the cube s + [0, 1/eps)^K around the
/// cumulative loss s, and the action is its argmin; the point (and hence the
/// action) only moves when s leaves the current cell.
class FollowLazyLeader {
 public:
  FollowLazyLeader(int num_actions, double grid_eps, Rng& rng);
  /// grid_eps = 1/sqrt(T).
  static FollowLazyLeader for_horizon(int num_actions, std::int64_t T, Rng& rng);

  Action leader() const { return leader_; }
  /// Losses must lie in [0, 1]^K.
  void update(const Vector& losses);

  /// Test hook: fixes the lattice offset (zero gives the plain leader on the
  /// eps-rounded cumulative losses).
  void override_perturbation(const Vector& offset);

  const Vector& cumulative() const { return cumulative_; }
  const Vector& offset() const { return offset_; }
  /// The lattice point currently followed.
  Vector perturbed_point() const;
  double grid_eps() const { return eps_; }

 private:
  void refresh_leader();

  Vector cumulative_;
  Vector offset_;
  double eps_;
  Action leader_ = 0;
};

/// Exp3.P in loss form with the Bubeck & Cesa-Bianchi tuning
///   eta = 0.95 sqrt(ln K / (T K)), gamma = 1.05 sqrt(K ln K / T),
///   beta = sqrt(ln(K / delta) / (T K)).
/// Gain estimates are (1{chosen} (1 - loss) + beta) / p.
class Exp3P {
 public:
  struct Params {
    double eta;
    double gamma;
    double beta;
    static Params tuned(int num_actions, std::int64_t T, double delta);
  };

  Exp3P(int num_actions, Params params);

  Vector distribution() const;
  /// Draws an action; returns it with the probability it had.
  std::pair<Action, double> choose(Rng& rng);
  /// Loss of the last chosen action, in [0, 1].
  void update(Action chosen, double loss);

  const Params& params() const { return params_; }

  /// Importance-weighted loss estimate: loss / p[chosen] at the chosen arm.
  static Vector raw_loss_estimate(const Vector& p, Action chosen, double loss);

 private:
  Params params_;
  Vector log_weights_;  // eta * cumulative gain estimates
  Vector last_p_;
};

// -- Players without learning ------------------------------------------------

class ConstantPlayer : public Player {
 public:
  ConstantPlayer(int num_actions, Action action);
  std::string name() const override { return "constant"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

 protected:
  Action do_choose() override { return action_; }
  void do_observe_full(const Vector&) override {}
  void do_observe_bandit(double) override {}

 private:
  Action action_;
};

class UniformRandomPlayer : public Player {
 public:
  UniformRandomPlayer(int num_actions, std::uint64_t seed);
  std::string name() const override { return "uniform-random"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

 protected:
  Action do_choose() override;
  void do_observe_full(const Vector&) override {}
  void do_observe_bandit(double) override {}

 private:
  Rng rng_;
};

/// Cycles 0, 1, ..., K-1, 0, ... so it switches every round.
class AlwaysSwitchPlayer : public Player {
 public:
  explicit AlwaysSwitchPlayer(int num_actions) : Player(num_actions) {}
  std::string name() const override { return "always-switch"; }
  Feedback preferred_feedback() const override { return Feedback::Bandit; }

 protected:
  Action do_choose() override {
    return static_cast<Action>(round() % num_actions());
  }
  void do_observe_full(const Vector&) override {}
  void do_observe_bandit(double) override {}
};

/// Full-information anytime Hedge, sampling a fresh action each round.
/// Incoming vectors are shifted by their minimum and divided by the declared
/// range C before the update.
class HedgePlayer : public Player {
 public:
  HedgePlayer(int num_actions, double range_bound, std::uint64_t seed);
  std::string name() const override { return "hedge"; }
  Feedback preferred_feedback() const override { return Feedback::FullInformation; }

  const Hedge& hedge() const { return hedge_; }

 protected:
  Action do_choose() override { return hedge_.sample(rng_); }
  void do_observe_full(const Vector& losses) override;

 private:
  Hedge hedge_;
  double range_;
  Rng rng_;
  Vector scratch_;
};

}  // namespace polreg

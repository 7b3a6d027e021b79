#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polreg/realization.hpp"
#include "polreg/types.hpp"

namespace polreg {

/// A learner in the repeated game.
///
/// The engine drives one (choose, observe) cycle per round. Subclasses
/// implement do_choose() and whichever observe hook matches the feedback
/// they accept; the defaults reject the other kind.
class Player {
 public:
  explicit Player(int num_actions);
  virtual ~Player() = default;

  Player(const Player&) = delete;
  Player& operator=(const Player&) = delete;

  virtual std::string name() const = 0;
  virtual Feedback preferred_feedback() const = 0;

  Action choose();
  /// Full information: f_t(X_{1:t-1}, x) for every x.
  void observe_full(const Vector& losses);
  /// Bandit: f_t(X_{1:t}) only.
  void observe_bandit(double loss);

  int num_actions() const { return num_actions_; }
  /// Completed (choose, observe) cycles.
  Round round() const { return round_; }
  /// Action returned by the latest choose().
  Action last_choice() const { return last_choice_; }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

 protected:
  virtual Action do_choose() = 0;
  virtual void do_observe_full(const Vector& losses);
  virtual void do_observe_bandit(double loss);

  void emit(const nlohmann::json& event) const {
    if (trace_) trace_(event);
  }

 private:
  int num_actions_;
  Round round_ = 0;
  bool awaiting_feedback_ = false;
  Action last_choice_ = 0;
  TraceSink trace_;
};

struct GameTranscript {
  Round horizon = 0;
  Feedback feedback = Feedback::Bandit;
  std::vector<Action> actions;
  std::vector<double> incurred_losses;
  /// Row-major, feedback_width values per round: K under full information,
  /// 1 under bandit feedback.
  std::vector<double> observations;
  int feedback_width = 0;
  /// switches[0] = 0; switches[t] = 1 iff actions[t] != actions[t-1].
  std::vector<std::uint8_t> switches;

  std::span<const double> observed(Round t) const {
    return {observations.data() + (t - 1) * feedback_width,
            static_cast<std::size_t>(feedback_width)};
  }
};

struct RegretLedger {
  double policy_regret = 0.0;
  double standard_regret = 0.0;
  std::int64_t switch_count = 0;
  Action best_constant_action = 0;
  double incurred_total = 0.0;
  double best_constant_total = 0.0;
};

/// Plays T rounds. Throws ConfigError when the realization does not cover
/// 1..T or the player's action count differs.
GameTranscript play_game(const Realization& realization, Player& player,
                         Round T, Feedback feedback);

/// Policy regret: sum_t f_t(X_{1:t}) - min_x sum_t f_t(x...x), ties toward
/// the lowest action. Also fills standard_regret and switch_count.
RegretLedger policy_regret(const GameTranscript& transcript,
                           const Realization& realization);

/// Standard regret: the counterfactual keeps the realized prefix and swaps
/// only the current action, min_x sum_t f_t(X_{1:t-1}, x).
double standard_regret(const GameTranscript& transcript,
                       const Realization& realization);

/// Number of t >= 1 with actions[t] != actions[t-1]; throws std::domain_error
/// on an empty sequence.
std::int64_t switch_count(std::span<const Action> actions);

}  // namespace polreg

#include "polreg/game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "polreg/errors.hpp"

namespace polreg {

double Realization::constant_total(Action x, Round T) const {
  const int len = memory() + 1;
  std::vector<Action> window(static_cast<std::size_t>(len), x);
  double total = 0.0;
  for (Round t = 1; t <= T; ++t) {
    total += evaluate(t, std::span<const Action>(window).first(
                            static_cast<std::size_t>(window_length(t))));
  }
  return total;
}

double Realization::max_drift_bound(Round T) const {
  double d = 0.0;
  for (Round t = 1; t <= T; ++t) d = std::max(d, drift_bound(t));
  return d;
}

Player::Player(int num_actions) : num_actions_(num_actions) {
  if (num_actions < 1) throw ConfigError("player needs K >= 1 actions");
}

Action Player::choose() {
  if (awaiting_feedback_) {
    throw std::logic_error("choose() called twice without feedback");
  }
  last_choice_ = do_choose();
  if (last_choice_ < 0 || last_choice_ >= num_actions_) {
    throw std::logic_error(name() + " chose an action outside [0, K)");
  }
  awaiting_feedback_ = true;
  return last_choice_;
}

void Player::observe_full(const Vector& losses) {
  if (!awaiting_feedback_) throw std::logic_error("feedback before choose()");
  do_observe_full(losses);
  awaiting_feedback_ = false;
  ++round_;
}

void Player::observe_bandit(double loss) {
  if (!awaiting_feedback_) throw std::logic_error("feedback before choose()");
  do_observe_bandit(loss);
  awaiting_feedback_ = false;
  ++round_;
}

void Player::do_observe_full(const Vector&) {
  throw ConfigError(name() + " does not accept full-information feedback");
}

void Player::do_observe_bandit(double) {
  throw ConfigError(name() + " does not accept bandit feedback");
}

GameTranscript play_game(const Realization& realization, Player& player,
                         Round T, Feedback feedback) {
  if (T < 1) throw ConfigError("T >= 1 required");
  if (T > realization.horizon()) {
    throw ConfigError("horizon mismatch: realization covers " +
                      std::to_string(realization.horizon()) +
                      " rounds, game needs " + std::to_string(T));
  }
  const int K = realization.num_actions();
  if (player.num_actions() != K) {
    throw ConfigError("player configured for " +
                      std::to_string(player.num_actions()) +
                      " actions, realization has " + std::to_string(K));
  }

  GameTranscript tr;
  tr.horizon = T;
  tr.feedback = feedback;
  tr.feedback_width = feedback == Feedback::FullInformation ? K : 1;
  tr.actions.reserve(static_cast<std::size_t>(T));
  tr.incurred_losses.reserve(static_cast<std::size_t>(T));
  tr.switches.reserve(static_cast<std::size_t>(T));
  tr.observations.reserve(static_cast<std::size_t>(T * tr.feedback_width));

  Vector full(K);
  std::vector<Action> counterfactual;
  for (Round t = 1; t <= T; ++t) {
    const Action a = player.choose();
    tr.actions.push_back(a);
    tr.switches.push_back(t > 1 && a != tr.actions[tr.actions.size() - 2]);

    const auto len = static_cast<std::size_t>(realization.window_length(t));
    const std::span<const Action> window(tr.actions.data() + t - len, len);
    const double loss = realization.evaluate(t, window);
    tr.incurred_losses.push_back(loss);

    if (feedback == Feedback::Bandit) {
      tr.observations.push_back(loss);
      player.observe_bandit(loss);
    } else {
      counterfactual.assign(window.begin(), window.end());
      for (Action x = 0; x < K; ++x) {
        counterfactual.back() = x;
        full[x] = x == a ? loss : realization.evaluate(t, counterfactual);
        tr.observations.push_back(full[x]);
      }
      player.observe_full(full);
    }
  }
  return tr;
}

RegretLedger policy_regret(const GameTranscript& transcript,
                           const Realization& realization) {
  RegretLedger ledger;
  for (double v : transcript.incurred_losses) ledger.incurred_total += v;

  ledger.best_constant_total = std::numeric_limits<double>::infinity();
  for (Action x = 0; x < realization.num_actions(); ++x) {
    const double total = realization.constant_total(x, transcript.horizon);
    if (total < ledger.best_constant_total) {
      ledger.best_constant_total = total;
      ledger.best_constant_action = x;
    }
  }
  ledger.policy_regret = ledger.incurred_total - ledger.best_constant_total;
  ledger.standard_regret = standard_regret(transcript, realization);
  ledger.switch_count = switch_count(transcript.actions);
  return ledger;
}

double standard_regret(const GameTranscript& transcript,
                       const Realization& realization) {
  const int K = realization.num_actions();
  std::vector<double> totals(static_cast<std::size_t>(K), 0.0);
  double incurred = 0.0;
  std::vector<Action> window;
  for (Round t = 1; t <= transcript.horizon; ++t) {
    incurred += transcript.incurred_losses[t - 1];
    const auto len = static_cast<std::size_t>(realization.window_length(t));
    window.assign(transcript.actions.begin() + (t - len),
                  transcript.actions.begin() + t);
    for (Action x = 0; x < K; ++x) {
      window.back() = x;
      totals[x] += realization.evaluate(t, window);
    }
  }
  double best = totals[0];
  for (double v : totals) best = std::min(best, v);
  return incurred - best;
}

std::int64_t switch_count(std::span<const Action> actions) {
  if (actions.empty()) throw std::domain_error("switch_count of empty sequence");
  std::int64_t n = 0;
  for (std::size_t i = 1; i < actions.size(); ++i) n += actions[i] != actions[i - 1];
  return n;
}

}  // namespace polreg

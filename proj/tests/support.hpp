#pragma once

#include <vector>

#include "polreg/game.hpp"

namespace polreg::testing {

/// Plays a fixed action sequence and keeps whatever it was shown.
class ScriptedPlayer : public Player {
 public:
  ScriptedPlayer(int K, std::vector<Action> script, Feedback preferred = Feedback::Bandit)
      : Player(K), script_(std::move(script)), preferred_(preferred) {}
  std::string name() const override { return "scripted"; }
  Feedback preferred_feedback() const override { return preferred_; }

  std::vector<Vector> full_seen;
  std::vector<double> bandit_seen;

 protected:
  Action do_choose() override { return script_[round() % script_.size()]; }
  void do_observe_full(const Vector& l) override { full_seen.push_back(l); }
  void do_observe_bandit(double l) override { bandit_seen.push_back(l); }

 private:
  std::vector<Action> script_;
  Feedback preferred_;
};

inline Matrix table(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace polreg::testing

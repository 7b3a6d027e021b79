#include "polreg/learners.hpp"

#include <string>

#include "polreg/errors.hpp"
#include "polreg/format.hpp"

namespace polreg {

void require_unit_interval(const Vector& losses, const char* who) {
  for (Eigen::Index i = 0; i < losses.size(); ++i) {
    const double v = losses[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractViolation(std::string(who) + ": loss " + format_double(v) +
                              " for action " + std::to_string(i) +
                              " outside [0, 1]");
    }
  }
}

Action sample_from(const Vector& p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<Action>(i);
  }
  // Rounding left u above the running sum; take the last positive entry.
  for (Eigen::Index i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return static_cast<Action>(i);
  }
  return 0;
}

// -- Hedge -------------------------------------------------------------------

Hedge::Hedge(int num_actions, std::optional<double> eta)
    : cumulative_(Vector::Zero(num_actions)), eta_(eta) {
  if (num_actions < 1) throw ConfigError("Hedge needs K >= 1");
  if (eta_ && !(*eta_ > 0.0)) throw ConfigError("Hedge learning rate must be > 0");
}

Hedge::Hedge(int num_actions, double eta)
    : Hedge(num_actions, std::optional<double>(eta)) {}

Hedge Hedge::for_feedbacks(int num_actions, std::int64_t feedbacks) {
  if (feedbacks < 1) throw ConfigError("Hedge needs N >= 1 feedback events");
  const double lnk = std::log(static_cast<double>(std::max(num_actions, 2)));
  return Hedge(num_actions,
               std::optional<double>(std::sqrt(8.0 * lnk / static_cast<double>(feedbacks))));
}

Hedge Hedge::anytime(int num_actions) {
  return Hedge(num_actions, std::optional<double>());
}

double Hedge::eta() const {
  if (eta_) return *eta_;
  const double lnk = std::log(static_cast<double>(std::max(num_actions(), 2)));
  return std::sqrt(8.0 * lnk / static_cast<double>(std::max<std::int64_t>(updates_, 1)));
}

Vector Hedge::distribution() const { return softmin(cumulative_, eta()); }

Action Hedge::sample(Rng& rng) const { return sample_from(distribution(), rng); }

void Hedge::update(const Vector& losses) {
  if (losses.size() != cumulative_.size()) {
    throw ContractViolation("Hedge: loss vector has wrong length");
  }
  require_unit_interval(losses, "Hedge");
  cumulative_ += losses;
  ++updates_;
}

// -- FollowLazyLeader --------------------------------------------------------

FollowLazyLeader::FollowLazyLeader(int num_actions, double grid_eps, Rng& rng)
    : cumulative_(Vector::Zero(num_actions)),
      offset_(num_actions),
      eps_(grid_eps) {
  if (num_actions < 1) throw ConfigError("FLL needs K >= 1");
  if (!(grid_eps > 0.0)) throw ConfigError("FLL grid parameter must be > 0");
  for (Eigen::Index i = 0; i < offset_.size(); ++i) offset_[i] = uniform01(rng) / eps_;
  refresh_leader();
}

FollowLazyLeader FollowLazyLeader::for_horizon(int num_actions, std::int64_t T,
                                               Rng& rng) {
  if (T < 1) throw ConfigError("FLL horizon T >= 1 required");
  return FollowLazyLeader(num_actions, 1.0 / std::sqrt(static_cast<double>(T)), rng);
}

void FollowLazyLeader::update(const Vector& losses) {
  if (losses.size() != cumulative_.size()) {
    throw ContractViolation("FLL: loss vector has wrong length");
  }
  require_unit_interval(losses, "FLL");
  cumulative_ += losses;
  refresh_leader();
}

void FollowLazyLeader::override_perturbation(const Vector& offset) {
  if (offset.size() != offset_.size()) {
    throw ConfigError("FLL: perturbation override has wrong length");
  }
  offset_ = offset;
  refresh_leader();
}

Vector FollowLazyLeader::perturbed_point() const {
  const double cell = 1.0 / eps_;
  Vector g(cumulative_.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    // Smallest lattice value >= s_i in coordinate i.
    g[i] = offset_[i] + cell * std::ceil((cumulative_[i] - offset_[i]) / cell);
  }
  return g;
}

void FollowLazyLeader::refresh_leader() {
  const Vector g = perturbed_point();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    if (g[i] < g[best]) best = i;
  }
  leader_ = static_cast<Action>(best);
}

// -- Exp3P -------------------------------------------------------------------

Exp3P::Params Exp3P::Params::tuned(int num_actions, std::int64_t T, double delta) {
  if (T < 1) throw ConfigError("Exp3.P horizon T >= 1 required");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("Exp3.P delta must lie in (0, 1)");
  const double K = num_actions;
  const double n = static_cast<double>(T);
  const double lnk = std::log(std::max(K, 2.0));
  Params p;
  p.eta = 0.95 * std::sqrt(lnk / (n * K));
  p.gamma = std::min(1.0, 1.05 * std::sqrt(K * lnk / n));
  p.beta = std::min(1.0, std::sqrt(std::log(K / delta) / (n * K)));
  return p;
}

Exp3P::Exp3P(int num_actions, Params params)
    : params_(params),
      log_weights_(Vector::Zero(num_actions)),
      last_p_(Vector::Constant(num_actions, 1.0 / num_actions)) {
  if (num_actions < 1) throw ConfigError("Exp3.P needs K >= 1");
}

Vector Exp3P::distribution() const {
  const auto K = static_cast<double>(log_weights_.size());
  const Vector w = softmin(-log_weights_, 1.0);
  return ((1.0 - params_.gamma) * w.array() + params_.gamma / K).matrix();
}

std::pair<Action, double> Exp3P::choose(Rng& rng) {
  last_p_ = distribution();
  const Action a = sample_from(last_p_, rng);
  return {a, last_p_[a]};
}

void Exp3P::update(Action chosen, double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) {
    throw ContractViolation("Exp3.P: loss " + format_double(loss) + " outside [0, 1]");
  }
  const Vector raw = raw_loss_estimate(last_p_, chosen, loss);
  for (Eigen::Index i = 0; i < log_weights_.size(); ++i) {
    const double p = last_p_[i];
    // (1{chosen} (1 - loss) + beta) / p, written via the raw loss estimate.
    const double gain = (i == chosen ? 1.0 / p : 0.0) - raw[i] + params_.beta / p;
    log_weights_[i] += params_.eta * gain;
  }
}

Vector Exp3P::raw_loss_estimate(const Vector& p, Action chosen, double loss) {
  Vector est = Vector::Zero(p.size());
  est[chosen] = loss / p[chosen];
  return est;
}

// -- Simple players ----------------------------------------------------------

ConstantPlayer::ConstantPlayer(int num_actions, Action action)
    : Player(num_actions), action_(action) {
  if (action < 0 || action >= num_actions) {
    throw ConfigError("constant action must lie in [0, K)");
  }
}

UniformRandomPlayer::UniformRandomPlayer(int num_actions, std::uint64_t seed)
    : Player(num_actions), rng_(seed) {}

Action UniformRandomPlayer::do_choose() {
  return static_cast<Action>(uniform_index(rng_, static_cast<std::uint64_t>(num_actions())));
}

HedgePlayer::HedgePlayer(int num_actions, double range_bound, std::uint64_t seed)
    : Player(num_actions),
      hedge_(Hedge::anytime(num_actions)),
      range_(range_bound),
      rng_(seed) {
  if (!(range_bound > 0.0)) throw ConfigError("hedge player needs range C > 0");
}

void HedgePlayer::do_observe_full(const Vector& losses) {
  scratch_ = (losses.array() - losses.minCoeff()) / range_;
  hedge_.update(scratch_);
}

}  // namespace polreg

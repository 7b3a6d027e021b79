#include "polreg/reductions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "polreg/adversaries.hpp"
#include "polreg/errors.hpp"
#include "polreg/format.hpp"
#include "polreg/sampler.hpp"

namespace polreg {

namespace {

std::string num(double v) { return format_double(v); }

void require_fed(double v, const char* who) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ContractViolation(std::string(who) + ": normalized loss " + num(v) +
                            " outside [0, 1]; the adversary broke its declared bounds");
  }
}

// ceil(x) that treats values within a hair of an integer as that integer.
Round ceil_guarded(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<Round>(r);
  return static_cast<Round>(std::ceil(x));
}

}  // namespace

BoundsConfig BoundsConfig::of(const Realization& r, Round T) {
  BoundsConfig b;
  b.C = r.range_bound();
  b.D = r.max_drift_bound(std::min(T, r.horizon()));
  b.m = r.memory();
  b.T = T;
  return b;
}

void BoundsConfig::check() const {
  if (!(C > 0.0)) throw ConfigError("bounds: C > 0 required, got " + num(C));
  if (!(D >= 0.0)) throw ConfigError("bounds: D >= 0 required, got " + num(D));
  if (m < 0) throw ConfigError("bounds: m >= 0 required");
  if (T < 1) throw ConfigError("T >= 1 required");
}

double declared_switching_cost(const Realization& r) {
  if (const auto* sc = dynamic_cast<const SwitchingCost*>(&r)) return sc->cost();
  return 0.0;
}

// -- FllSwitchingPlayer ------------------------------------------------------

FllSwitchingPlayer::FllSwitchingPlayer(int num_actions, const BoundsConfig& bounds,
                                       double switch_cost, std::uint64_t seed)
    : Player(num_actions),
      rng_(seed),
      fll_(FollowLazyLeader::for_horizon(num_actions, bounds.T, rng_)),
      cost_(switch_cost),
      width_(bounds.C - switch_cost) {
  bounds.check();
  if (switch_cost < 0.0) throw ConfigError("fll-switching: switching cost must be >= 0");
  if (!(width_ > 0.0)) {
    throw ConfigError("fll-switching: C = " + num(bounds.C) +
                      " must exceed the switching cost " + num(switch_cost));
  }
}

Vector FllSwitchingPlayer::rescale(const Vector& oblivious) const {
  const double lo = oblivious.minCoeff();
  const double spread = oblivious.maxCoeff() - lo;
  if (spread > width_ * (1.0 + 1e-12)) {
    throw ContractViolation("fll-switching: loss spread " + num(spread) +
                            " exceeds C - cost = " + num(width_));
  }
  return ((oblivious.array() - lo) / width_).min(1.0).matrix();
}

void FllSwitchingPlayer::do_observe_full(const Vector& losses) {
  Vector l = losses;
  if (previous_ >= 0 && cost_ != 0.0) {
    for (Eigen::Index x = 0; x < l.size(); ++x) {
      if (x != previous_) l[x] -= cost_;
    }
  }
  fll_.update(rescale(l));
  previous_ = last_choice();
}

// -- Exp3pDriftPlayer --------------------------------------------------------

double drift_difference(double current, double previous, double C, double D) {
  return (current - previous) / (2.0 * (C + D)) + 0.5;
}

Exp3pDriftPlayer::Exp3pDriftPlayer(int num_actions, const BoundsConfig& bounds,
                                   std::optional<double> delta_p, std::uint64_t seed)
    : Player(num_actions),
      bounds_(bounds),
      exp3p_(num_actions,
             Exp3P::Params::tuned(num_actions, bounds.T,
                                  delta_p.value_or(std::min(0.5, 1.0 / static_cast<double>(bounds.T))))),
      rng_(seed) {
  bounds.check();
}

Action Exp3pDriftPlayer::do_choose() {
  chosen_ = exp3p_.choose(rng_).first;
  return chosen_;
}

void Exp3pDriftPlayer::do_observe_bandit(double loss) {
  last_fed_ = previous_ ? drift_difference(loss, *previous_, bounds_.C, bounds_.D) : 0.5;
  require_fed(last_fed_, "exp3p-drift");
  exp3p_.update(chosen_, last_fed_);
  previous_ = loss;
}

// -- DoublingPlayer ----------------------------------------------------------

DoublingPlayer::DoublingPlayer(int num_actions, Round initial_T, HorizonFactory factory)
    : Player(num_actions), factory_(std::move(factory)), horizon_(initial_T) {
  if (initial_T < 1) throw ConfigError("doubling: initial_T >= 1 required");
  inner_ = factory_(horizon_, 0);
  if (!inner_ || inner_->num_actions() != num_actions) {
    throw ConfigError("doubling: factory built a player for the wrong action count");
  }
}

std::string DoublingPlayer::name() const { return inner_->name() + "+doubling"; }

Action DoublingPlayer::do_choose() {
  if (used_ == horizon_) {
    horizon_ *= 2;
    inner_ = factory_(horizon_, static_cast<int>(restarts_.size()) + 1);
    restarts_.emplace_back(round() + 1, horizon_);
    used_ = 0;
    emit({{"type", "restart"}, {"round", round() + 1}, {"horizon", horizon_}});
  }
  ++used_;
  return inner_->choose();
}

// -- MinibatchHedgePlayer ----------------------------------------------------

Round default_epoch_count(Round T, double scale) {
  if (T < 1) throw ConfigError("T >= 1 required");
  if (!(scale > 0.0)) throw ConfigError("minibatch-hedge: j_scale must be > 0");
  if (scale == 1.0) {
    // Smallest j with j^3 >= T^2.
    const auto t2 = static_cast<__int128>(T) * T;
    auto j = static_cast<Round>(std::cbrt(static_cast<double>(T) * static_cast<double>(T)));
    j = std::max<Round>(j - 2, 1);
    while (static_cast<__int128>(j) * j * j < t2) ++j;
    return j;
  }
  return std::max<Round>(1, ceil_guarded(scale * std::pow(static_cast<double>(T), 2.0 / 3.0)));
}

EpochSchedule plan_epochs(Round T, Round J, int K, int m) {
  if (T < 1) throw ConfigError("T >= 1 required");
  if (J < 1) throw ConfigError("minibatch-hedge: J >= 1 required");
  if (J > T) {
    throw ConfigError("minibatch-hedge: J = " + std::to_string(J) + " > T = " +
                      std::to_string(T));
  }
  EpochSchedule s;
  s.T = T;
  s.J = J;
  s.length = T / J;
  s.full_epochs = T / s.length;
  SamplerGeometry{s.length, K, m}.check();
  return s;
}

double exploration_estimate(double arm, double base, double C, double D, int m) {
  return (arm - base) / (2.0 * (C + (m + 1) * D)) + 0.5;
}

MinibatchHedgePlayer::MinibatchHedgePlayer(int num_actions, const BoundsConfig& bounds,
                                           const Options& options, std::uint64_t seed)
    : Player(num_actions),
      bounds_(bounds),
      options_(options),
      schedule_(plan_epochs(bounds.T,
                            options.epochs.value_or(default_epoch_count(bounds.T, options.j_scale)),
                            num_actions, bounds.m)),
      hedge_(Hedge::for_feedbacks(num_actions, schedule_.full_epochs)),
      hedge_rng_(derive_seed(seed, {0})),
      explore_rng_(derive_seed(seed, {1})),
      arm_obs_(Vector::Zero(num_actions)),
      base_obs_(Vector::Zero(num_actions)) {
  bounds.check();
  if (options.base_action < 0 || options.base_action >= num_actions) {
    throw ConfigError("minibatch-hedge: base action must lie in [0, K)");
  }
}

void MinibatchHedgePlayer::begin_epoch() {
  exploit_ = forced_ ? forced_(epoch_) : hedge_.sample(hedge_rng_);
  if (epoch_ >= schedule_.full_epochs) {
    in_tail_ = true;
    emit({{"type", "epoch_plan"}, {"round", round() + 1}, {"epoch", epoch_ + 1},
          {"exploit", exploit_}, {"tail", true}});
    return;
  }
  const int m = bounds_.m;
  const Action x0 = options_.base_action;
  starts_ = sample_exploration_starts({schedule_.length, num_actions(), m}, explore_rng_);
  plan_.assign(static_cast<std::size_t>(schedule_.length), exploit_);
  for (int x = 0; x < num_actions(); ++x) {
    const Round p = starts_[x] - 1;
    for (int i = 0; i <= m; ++i) {
      plan_[p + i] = x0;
      plan_[p + m + 1 + i] = x;
    }
  }
  emit({{"type", "epoch_plan"}, {"round", round() + 1}, {"epoch", epoch_ + 1},
        {"exploit", exploit_}, {"starts", starts_}});
}

Action MinibatchHedgePlayer::do_choose() {
  if (!in_tail_ && offset_ == 0) begin_epoch();
  return in_tail_ ? exploit_ : plan_[offset_];
}

void MinibatchHedgePlayer::do_observe_bandit(double loss) {
  ++offset_;
  if (in_tail_) return;
  const int m = bounds_.m;
  for (int x = 0; x < num_actions(); ++x) {
    if (offset_ == starts_[x] + m) base_obs_[x] = loss;
    if (offset_ == starts_[x] + 2 * m + 1) arm_obs_[x] = loss;
  }
  if (offset_ < schedule_.length) return;

  last_g_.resize(num_actions());
  for (int x = 0; x < num_actions(); ++x) {
    last_g_[x] = exploration_estimate(arm_obs_[x], base_obs_[x], bounds_.C, bounds_.D, m);
    require_fed(last_g_[x], "minibatch-hedge");
  }
  hedge_.update(last_g_);
  offset_ = 0;
  ++epoch_;
}

// -- EliminationPlayer -------------------------------------------------------

std::vector<Round> elimination_stage_lengths(Round T) {
  if (T < 1) throw ConfigError("T >= 1 required");
  std::vector<Round> out;
  Round total = 0;
  for (int s = 1; total < T; ++s) {
    const double e = 1.0 - std::ldexp(1.0, -s);
    const Round len = std::max<Round>(1, ceil_guarded(std::pow(static_cast<double>(T), e)));
    out.push_back(len);
    total += len;
  }
  return out;
}

double elimination_radius(int K, Round stage_length, int S, double delta,
                          double conf_const) {
  return std::sqrt(conf_const * (static_cast<double>(K) / static_cast<double>(stage_length)) *
                   std::log(static_cast<double>(K) * S / delta));
}

EliminationPlayer::EliminationPlayer(int num_actions, Round T, double delta,
                                     double conf_const, double switch_cost)
    : Player(num_actions),
      K_(num_actions),
      T_(T),
      delta_(delta),
      conf_const_(conf_const),
      cost_(switch_cost) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("elimination: delta must lie in (0, 1), got " + num(delta));
  }
  if (!(conf_const > 0.0)) throw ConfigError("elimination: conf_const must be > 0");
  if (T < num_actions) throw ConfigError("elimination: T >= K required");
  lengths_ = elimination_stage_lengths(T);
  active_.resize(static_cast<std::size_t>(num_actions));
  for (int x = 0; x < num_actions; ++x) active_[x] = x;
  begin_stage(1);
}

void EliminationPlayer::begin_stage(Round first_round) {
  const std::size_t s = stages_.size();
  Stage st;
  st.first_round = first_round;
  st.active = active_;
  stages_.push_back(st);

  block_arm_.clear();
  block_end_.clear();
  block_ = 0;
  played_ = 0;
  sums_ = Vector::Zero(K_);
  counts_ = Eigen::VectorXi::Zero(K_);
  if (s >= lengths_.size()) return;  // schedule exhausted; keep the leader

  const Round len = lengths_[s];
  const auto a = static_cast<Round>(active_.size());
  Round end = 0;
  for (Round i = 0; i < a; ++i) {
    const Round n = len / a + (i < len % a ? 1 : 0);
    if (n == 0) continue;
    end += n;
    block_arm_.push_back(active_[i]);
    block_end_.push_back(end);
  }
  emit({{"type", "stage"}, {"round", first_round}, {"stage", s + 1},
        {"length", len}, {"active", active_}});
}

Action EliminationPlayer::do_choose() {
  if (block_arm_.empty()) {
    chosen_ = stages_.size() >= 2 ? stages_[stages_.size() - 2].best : active_.front();
  } else {
    while (played_ >= block_end_[block_]) ++block_;
    chosen_ = block_arm_[block_];
  }
  return chosen_;
}

void EliminationPlayer::do_observe_bandit(double loss) {
  const double l = (previous_ >= 0 && chosen_ != previous_) ? loss - cost_ : loss;
  previous_ = chosen_;
  if (block_arm_.empty()) return;
  sums_[chosen_] += l;
  ++counts_[chosen_];
  ++played_;
  if (played_ == block_end_.back()) {
    finish_stage();
    begin_stage(round() + 2);
  }
}

void EliminationPlayer::finish_stage() {
  Stage& st = stages_.back();
  const std::size_t s = stages_.size() - 1;
  st.means = Vector::Constant(K_, std::numeric_limits<double>::quiet_NaN());
  bool have = false;
  for (Action x : active_) {
    if (counts_[x] == 0) continue;
    st.means[x] = sums_[x] / counts_[x];
    if (!have || st.means[x] < st.means[st.best]) st.best = x;
    have = true;
  }
  st.radius = elimination_radius(K_, lengths_[s], total_stages(), delta_, conf_const_);
  st.completed = true;

  std::vector<Action> next;
  for (Action x : active_) {
    if (counts_[x] == 0 || st.means[x] <= st.means[st.best] + 2.0 * st.radius) {
      next.push_back(x);
    }
  }
  active_ = std::move(next);

  nlohmann::json means = nlohmann::json::array();
  for (Action x : st.active) means.push_back(counts_[x] ? nlohmann::json(st.means[x]) : nlohmann::json());
  emit({{"type", "stage_end"}, {"round", round() + 1}, {"stage", s + 1},
        {"best", st.best}, {"radius", st.radius}, {"means", means},
        {"survivors", active_}});
}

}  // namespace polreg

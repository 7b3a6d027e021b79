#pragma once

#include <algorithm>
#include <memory>
#include <span>

#include "polreg/types.hpp"

namespace polreg {

/// A fully materialized history-dependent loss process f_1..f_T.
///
/// f_t with memory m depends only on the last m+1 actions, so it is
/// evaluated on a window of exactly min(t, m+1) actions, most recent last.
/// Implementations are immutable after construction; evaluate() is pure and
/// safe to call concurrently.
class Realization {
 public:
  virtual ~Realization() = default;

  virtual Round horizon() const = 0;
  virtual int num_actions() const = 0;
  /// 0 means oblivious.
  virtual int memory() const = 0;

  virtual double evaluate(Round t, std::span<const Action> window) const = 0;

  /// Declared range bound C: |f_t(x) - f_t(x')| <= C over all histories.
  virtual double range_bound() const = 0;
  /// Declared drift bound D_t: |f_t(x_{1:t}) - f_{t+1}(x_{1:t}, x_t)| <= D_t.
  virtual double drift_bound(Round t) const = 0;

  /// Sum over t <= T of f_t on the constant history (x, ..., x).
  virtual double constant_total(Action x, Round T) const;

  /// Per-action means when the process is i.i.d. (null otherwise).
  virtual const Vector* iid_means() const { return nullptr; }

  /// max_{t <= T} D_t.
  double max_drift_bound(Round T) const;

  /// Window length f_t expects.
  int window_length(Round t) const {
    return static_cast<int>(std::min<Round>(t, memory() + 1));
  }
};

using RealizationPtr = std::shared_ptr<const Realization>;

}  // namespace polreg

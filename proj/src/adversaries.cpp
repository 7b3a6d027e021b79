#include "polreg/adversaries.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "polreg/errors.hpp"
#include "polreg/format.hpp"

namespace polreg {
namespace {

constexpr double kBoundSlack = 1e-9;

bool exceeds(double observed, double bound) {
  return observed > bound + kBoundSlack * std::max(1.0, std::abs(bound));
}

double window_count(int K, int len) { return std::pow(static_cast<double>(K), len); }

/// Decodes base-K index into a window, most recent action last.
void decode_window(std::size_t index, int K, std::vector<Action>& window) {
  for (std::size_t i = window.size(); i-- > 0;) {
    window[i] = static_cast<Action>(index % static_cast<std::size_t>(K));
    index /= static_cast<std::size_t>(K);
  }
}

/// Window f_{t+1} sees after the history ending in `window` repeats its last action.
void successor_window(const std::vector<Action>& window, int next_len,
                      std::vector<Action>& out) {
  out.clear();
  const std::size_t drop = window.size() + 1 - static_cast<std::size_t>(next_len);
  for (std::size_t i = drop; i < window.size(); ++i) out.push_back(window[i]);
  out.push_back(window.back());
}

using Evaluator = std::function<double(Round, std::span<const Action>)>;

struct ScanResult {
  std::vector<double> spread;     // per round
  std::vector<double> max_drift;  // per round; last entry 0
};

ScanResult exhaustive_scan(const Evaluator& f, int K, int memory, Round T) {
  ScanResult out;
  out.spread.assign(static_cast<std::size_t>(T), 0.0);
  out.max_drift.assign(static_cast<std::size_t>(T), 0.0);
  std::vector<Action> window;
  std::vector<Action> next;
  for (Round t = 1; t <= T; ++t) {
    const int len = static_cast<int>(std::min<Round>(t, memory + 1));
    const int next_len = static_cast<int>(std::min<Round>(t + 1, memory + 1));
    const auto n = static_cast<std::size_t>(window_count(K, len));
    window.assign(static_cast<std::size_t>(len), 0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double drift = 0.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
      decode_window(idx, K, window);
      const double v = f(t, window);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (t < T) {
        successor_window(window, next_len, next);
        drift = std::max(drift, std::abs(v - f(t + 1, next)));
      }
    }
    out.spread[t - 1] = hi - lo;
    out.max_drift[t - 1] = drift;
  }
  return out;
}

}  // namespace

// -- ObliviousTable ----------------------------------------------------------

ObliviousTable::ObliviousTable(Matrix table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < 1) {
    throw ConfigError("loss table must have at least one round and action");
  }
  if (!table_.allFinite()) throw ConfigError("loss table has non-finite entries");
  range_ = (table_.rowwise().maxCoeff() - table_.rowwise().minCoeff()).maxCoeff();
  drift_ = Vector::Zero(table_.rows());
  for (Eigen::Index t = 0; t + 1 < table_.rows(); ++t) {
    drift_[t] = (table_.row(t) - table_.row(t + 1)).cwiseAbs().maxCoeff();
  }
}

double ObliviousTable::evaluate(Round t, std::span<const Action> window) const {
  return table_(t - 1, window.back());
}

double ObliviousTable::drift_bound(Round t) const { return drift_[t - 1]; }

double ObliviousTable::constant_total(Action x, Round T) const {
  return table_.col(x).head(T).sum();
}

IidRealization::IidRealization(Matrix table, Vector means)
    : ObliviousTable(std::move(table)), means_(std::move(means)) {}

Action IidRealization::best_action() const {
  Eigen::Index best = 0;
  means_.minCoeff(&best);
  return static_cast<Action>(best);
}

// -- Random walk -------------------------------------------------------------

double increment_clip(Round t, double delta) {
  return std::sqrt(3.0 * std::log(2.0 * static_cast<double>(t) / delta));
}

double RandomWalkSpec::gap() const {
  return epsilon.value_or(1.0 / std::cbrt(static_cast<double>(T)));
}

RandomWalkLosses::RandomWalkLosses(Vector increments, int z, double epsilon,
                                   double delta, bool truncated)
    : increments_(std::move(increments)),
      z_(z),
      epsilon_(epsilon),
      delta_(delta),
      truncated_(truncated) {
  const Eigen::Index T = increments_.size();
  walk_.resize(T);
  prefix_.resize(T + 1);
  prefix_[0] = 0.0;
  double w = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    w += increments_[t];
    walk_[t] = w;
    prefix_[t + 1] = prefix_[t] + w;
  }
}

double RandomWalkLosses::evaluate(Round t, std::span<const Action> window) const {
  return loss(t, window.back());
}

double RandomWalkLosses::drift_bound(Round t) const {
  return increment_clip(t + 1, delta_);
}

double RandomWalkLosses::constant_total(Action x, Round T) const {
  return prefix_[T] + (x == 1 ? static_cast<double>(T) * z_ * epsilon_ : 0.0);
}

// -- SwitchingCost -----------------------------------------------------------

SwitchingCost::SwitchingCost(RealizationPtr inner, double cost)
    : inner_(std::move(inner)), cost_(cost) {
  if (!inner_) throw ConfigError("switching cost needs an inner process");
  if (inner_->memory() != 0) {
    throw ConfigError("switching cost wraps oblivious processes only");
  }
  if (!(cost_ >= 0.0) || !std::isfinite(cost_)) {
    throw ConfigError("switching cost must be finite and >= 0");
  }
}

double SwitchingCost::evaluate(Round t, std::span<const Action> window) const {
  const Action x = window.back();
  const double base = inner_->evaluate(t, window.last(1));
  if (t == 1) return base;
  return base + (window[0] != x ? cost_ : 0.0);
}

double SwitchingCost::range_bound() const { return inner_->range_bound() + cost_; }

double SwitchingCost::drift_bound(Round t) const {
  return inner_->drift_bound(t) + cost_;
}

double SwitchingCost::constant_total(Action x, Round T) const {
  return inner_->constant_total(x, T);
}

// -- MemoryTwoReduction ------------------------------------------------------

MemoryTwoReduction::MemoryTwoReduction(RealizationPtr inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("memory-two reduction needs an inner process");
  if (inner_->memory() > 1) {
    throw ConfigError("memory-two reduction needs an inner process of memory <= 1");
  }
  first_drift_ = 0.0;
  for (Action x = 0; x < inner_->num_actions(); ++x) {
    const Action w[1] = {x};
    first_drift_ = std::max(first_drift_, std::abs(inner_->evaluate(1, w)));
  }
}

double MemoryTwoReduction::evaluate(Round t, std::span<const Action> window) const {
  if (t == 1) return 0.0;
  // Drop the current action; the inner process sees the previous one or two.
  const auto prev = window.first(window.size() - 1);
  const auto len = static_cast<std::size_t>(inner_->window_length(t - 1));
  return inner_->evaluate(t - 1, prev.last(len));
}

double MemoryTwoReduction::drift_bound(Round t) const {
  if (t == 1) return first_drift_;
  return inner_->drift_bound(t - 1) + inner_->range_bound();
}

double MemoryTwoReduction::constant_total(Action x, Round T) const {
  if (T <= 1) return 0.0;
  return inner_->constant_total(x, T - 1);
}

// -- BoundedMemoryRealization ------------------------------------------------

BoundedMemoryRealization::BoundedMemoryRealization(MemoryKernel kernel,
                                                   int memory, int num_actions,
                                                   Round T,
                                                   std::uint64_t sample_seed)
    : kernel_(std::move(kernel)),
      memory_(memory),
      num_actions_(num_actions),
      horizon_(T) {
  if (!kernel_) throw ConfigError("bounded-memory process needs a kernel");
  if (memory_ < 0) throw ConfigError("memory m >= 0 required");
  if (num_actions_ < 1) throw ConfigError("K >= 1 required");
  if (horizon_ < 1) throw ConfigError("T >= 1 required");

  const double domain = window_count(num_actions_, memory_ + 1) * static_cast<double>(T);
  if (domain <= kExhaustiveLimit) {
    values_.resize(static_cast<std::size_t>(T));
    std::vector<Action> window;
    for (Round t = 1; t <= T; ++t) {
      const int len = window_length(t);
      const auto n = static_cast<std::size_t>(window_count(num_actions_, len));
      auto& row = values_[t - 1];
      row.resize(n);
      window.assign(static_cast<std::size_t>(len), 0);
      for (std::size_t idx = 0; idx < n; ++idx) {
        decode_window(idx, num_actions_, window);
        const auto v = kernel_(t, window);
        if (!v || !std::isfinite(*v)) {
          std::ostringstream msg;
          msg << "kernel undefined at t=" << t << " window=(";
          for (std::size_t i = 0; i < window.size(); ++i) {
            msg << (i ? "," : "") << window[i];
          }
          msg << ")";
          throw ConfigError(msg.str());
        }
        row[idx] = *v;
      }
    }
    const auto scan = exhaustive_scan(
        [this](Round t, std::span<const Action> w) { return evaluate(t, w); },
        num_actions_, memory_, T);
    for (double s : scan.spread) range_ = std::max(range_, s);
    drift_ = scan.max_drift;
  } else {
    drift_.assign(static_cast<std::size_t>(T), 0.0);
    Rng rng(sample_seed);
    const auto report = validate_bounds(*this, 100000, rng);
    range_ = report.worst_gap;
    drift_.assign(static_cast<std::size_t>(T), report.worst_drift);
  }
}

std::size_t BoundedMemoryRealization::index_of(std::span<const Action> window) const {
  std::size_t idx = 0;
  for (Action a : window) idx = idx * static_cast<std::size_t>(num_actions_) + a;
  return idx;
}

double BoundedMemoryRealization::evaluate(Round t, std::span<const Action> window) const {
  if (!values_.empty()) return values_[t - 1][index_of(window)];
  const auto v = kernel_(t, window);
  if (!v || !std::isfinite(*v)) {
    throw ContractViolation("kernel undefined at t=" + std::to_string(t));
  }
  return *v;
}

// -- Construction ------------------------------------------------------------

RealizationPtr realize_oblivious(Matrix loss_table) {
  return std::make_shared<ObliviousTable>(std::move(loss_table));
}

std::shared_ptr<const IidRealization> realize_iid(const IidSpec& spec, Round T,
                                                  Rng& rng) {
  const auto K = spec.means.size();
  if (K == 0) throw ConfigError("i.i.d. adversary needs a non-empty mean vector");
  if (K < 2) throw ConfigError("i.i.d. adversary needs K >= 2 means");
  if (T < 1) throw ConfigError("T >= 1 required");
  if (!spec.means.allFinite()) throw ConfigError("means must be finite");
  if (spec.noise == NoiseKind::Bernoulli &&
      (spec.means.minCoeff() < 0.0 || spec.means.maxCoeff() > 1.0)) {
    throw ConfigError("Bernoulli means must lie in [0, 1]");
  }
  if (spec.scale < 0.0) throw ConfigError("noise scale must be >= 0");

  Matrix table(T, K);
  for (Round t = 0; t < T; ++t) {
    for (Eigen::Index x = 0; x < K; ++x) {
      const double mu = spec.means[x];
      switch (spec.noise) {
        case NoiseKind::None: table(t, x) = mu; break;
        case NoiseKind::Bernoulli: table(t, x) = bernoulli(rng, mu) ? 1.0 : 0.0; break;
        case NoiseKind::Gaussian: table(t, x) = mu + spec.scale * standard_normal(rng); break;
        case NoiseKind::Uniform:
          table(t, x) = mu + spec.scale * (2.0 * uniform01(rng) - 1.0);
          break;
      }
    }
  }
  return std::make_shared<IidRealization>(std::move(table), spec.means);
}

RealizationPtr realize_random_walk(const RandomWalkSpec& spec, Rng& rng) {
  if (spec.T < 1) throw ConfigError("T >= 1 required");
  const double eps = spec.gap();
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
  if (!(spec.truncation_delta > 0.0 && spec.truncation_delta < 1.0)) {
    throw ConfigError("truncation delta must lie in (0, 1)");
  }

  const int z = random_sign(rng);
  Vector xi(spec.T);
  for (Round t = 1; t <= spec.T; ++t) {
    double v = standard_normal(rng);
    if (spec.truncated) {
      const double clip = increment_clip(t, spec.truncation_delta);
      while (std::abs(v) >= clip) v = standard_normal(rng);
    }
    xi[t - 1] = v;
  }
  RealizationPtr walk = std::make_shared<RandomWalkLosses>(
      std::move(xi), z, eps, spec.truncation_delta, spec.truncated);
  if (spec.with_switching_cost) return with_switching_cost(walk, spec.switching_cost);
  return walk;
}

RealizationPtr realize_memory_two_reduction(const MemoryTwoReductionSpec& spec,
                                            Round T, Rng& rng) {
  if (T < 2) throw ConfigError("memory-two reduction needs T >= 2");
  if (spec.inner.T < T - 1) {
    throw ConfigError("inner horizon must be >= T - 1");
  }
  RandomWalkSpec inner = spec.inner;
  inner.with_switching_cost = true;
  return std::make_shared<MemoryTwoReduction>(realize_random_walk(inner, rng));
}

RealizationPtr realize_bounded_memory(MemoryKernel kernel, int memory,
                                      int num_actions, Round T) {
  return std::make_shared<BoundedMemoryRealization>(std::move(kernel), memory,
                                                    num_actions, T);
}

RealizationPtr with_switching_cost(RealizationPtr inner, double cost) {
  return std::make_shared<SwitchingCost>(std::move(inner), cost);
}

const RandomWalkLosses* find_random_walk(const Realization& r) {
  if (const auto* w = dynamic_cast<const RandomWalkLosses*>(&r)) return w;
  if (const auto* s = dynamic_cast<const SwitchingCost*>(&r)) {
    return find_random_walk(s->inner());
  }
  if (const auto* m = dynamic_cast<const MemoryTwoReduction*>(&r)) {
    return find_random_walk(m->inner());
  }
  return nullptr;
}

// -- Validation --------------------------------------------------------------

BoundsReport validate_bounds(const Realization& r, std::int64_t sample_budget,
                             Rng& rng) {
  BoundsReport report;
  const int K = r.num_actions();
  const int m = r.memory();
  const Round T = r.horizon();
  const double C = r.range_bound();

  auto check_drift = [&](Round t, double observed) {
    report.worst_drift = std::max(report.worst_drift, observed);
    const double bound = r.drift_bound(t);
    report.worst_drift_excess = std::max(report.worst_drift_excess, observed - bound);
    if (exceeds(observed, bound)) {
      ++report.drift_violations;
      report.drift_ok = false;
    }
  };
  auto check_range = [&](double spread) {
    report.worst_gap = std::max(report.worst_gap, spread);
    if (exceeds(spread, C)) {
      ++report.range_violations;
      report.range_ok = false;
    }
  };

  if (window_count(K, m + 1) * static_cast<double>(T) <= kExhaustiveLimit) {
    report.exhaustive = true;
    std::vector<Action> window;
    std::vector<Action> next;
    for (Round t = 1; t <= T; ++t) {
      const int len = r.window_length(t);
      const int next_len = static_cast<int>(std::min<Round>(t + 1, m + 1));
      const auto n = static_cast<std::size_t>(window_count(K, len));
      window.assign(static_cast<std::size_t>(len), 0);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t idx = 0; idx < n; ++idx) {
        decode_window(idx, K, window);
        const double v = r.evaluate(t, window);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++report.windows_checked;
        if (t < T) {
          successor_window(window, next_len, next);
          check_drift(t, std::abs(v - r.evaluate(t + 1, next)));
        }
      }
      check_range(hi - lo);
    }
    return report;
  }

  // Monte Carlo: batches of windows on a uniformly drawn round.
  constexpr int kBatch = 8;
  std::vector<Action> window;
  std::vector<Action> next;
  for (std::int64_t probe = 0; probe < sample_budget; probe += kBatch) {
    const Round t = 1 + static_cast<Round>(uniform_index(rng, static_cast<std::uint64_t>(T)));
    const int len = r.window_length(t);
    const int next_len = static_cast<int>(std::min<Round>(t + 1, m + 1));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int b = 0; b < kBatch; ++b) {
      window.resize(static_cast<std::size_t>(len));
      for (auto& a : window) a = static_cast<Action>(uniform_index(rng, static_cast<std::uint64_t>(K)));
      const double v = r.evaluate(t, window);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++report.windows_checked;
      if (t < T) {
        successor_window(window, next_len, next);
        check_drift(t, std::abs(v - r.evaluate(t + 1, next)));
      }
    }
    check_range(hi - lo);
  }
  return report;
}

// -- CSV ---------------------------------------------------------------------

Matrix read_loss_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("loss table CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t") {
    throw ConfigError("loss table CSV header must be t,a0,a1,...");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "a" + std::to_string(i - 1)) {
      throw ConfigError("loss table CSV column " + std::to_string(i) +
                        " must be named a" + std::to_string(i - 1));
    }
  }
  const auto K = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<double> values;
  Round row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw ConfigError("loss table CSV row " + std::to_string(row) + " has " +
                        std::to_string(cells.size()) + " fields, expected " +
                        std::to_string(header.size()));
    }
    double t = 0.0;
    if (!parse_double(cells[0], t) || t != static_cast<double>(row)) {
      throw ConfigError("loss table CSV row " + std::to_string(row) +
                        " must have t=" + std::to_string(row));
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      if (!parse_double(cells[i], v)) {
        throw ConfigError("loss table CSV row " + std::to_string(row) +
                          ": cannot parse '" + cells[i] + "'");
      }
      values.push_back(v);
    }
  }
  if (row == 0) throw ConfigError("loss table CSV has no rows");
  Matrix table(row, K);
  for (Round t = 0; t < row; ++t) {
    for (Eigen::Index x = 0; x < K; ++x) table(t, x) = values[t * K + x];
  }
  return table;
}

void write_loss_table_csv(std::ostream& out, const Matrix& table) {
  out << "t";
  for (Eigen::Index x = 0; x < table.cols(); ++x) out << ",a" << x;
  out << '\n';
  for (Eigen::Index t = 0; t < table.rows(); ++t) {
    out << (t + 1);
    for (Eigen::Index x = 0; x < table.cols(); ++x) out << ',' << format_double(table(t, x));
    out << '\n';
  }
}

void write_random_walk_csv(std::ostream& out, const RandomWalkLosses& walk) {
  out << "t,l1,l2,z,epsilon\n";
  for (Round t = 1; t <= walk.horizon(); ++t) {
    out << t << ',' << format_double(walk.loss(t, 0)) << ','
        << format_double(walk.loss(t, 1)) << ',' << walk.z() << ','
        << format_double(walk.epsilon()) << '\n';
  }
}

}  // namespace polreg

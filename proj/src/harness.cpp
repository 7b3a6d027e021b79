#include "polreg/harness.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "polreg/errors.hpp"

namespace polreg {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::PolicyRegret: return "policy_regret";
    case Metric::StandardRegret: return "standard_regret";
    case Metric::Switches: return "switches";
    case Metric::PseudoRegret: return "pseudo_regret";
  }
  return "policy_regret";
}

Metric parse_metric(const std::string& s) {
  if (s == "policy_regret") return Metric::PolicyRegret;
  if (s == "standard_regret") return Metric::StandardRegret;
  if (s == "switches") return Metric::Switches;
  if (s == "pseudo_regret") return Metric::PseudoRegret;
  throw ConfigError("unknown metric '" + s +
                    "' (policy_regret, standard_regret, switches, pseudo_regret)");
}

void ExperimentSpec::check() const {
  if (grid.empty()) throw ConfigError("horizon grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ConfigError("T >= 1 required");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw ConfigError("horizon grid must be strictly increasing");
    }
  }
  if (repetitions < 1) throw ConfigError("repetitions >= 1 required");
  if (threads < 1) throw ConfigError("threads >= 1 required");
}

std::optional<double> CellRecord::value(Metric m) const {
  if (status != CellStatus::Ok) return std::nullopt;
  switch (m) {
    case Metric::PolicyRegret: return policy_regret;
    case Metric::StandardRegret: return standard_regret;
    case Metric::Switches: return static_cast<double>(switches);
    case Metric::PseudoRegret: return pseudo_regret;
  }
  return std::nullopt;
}

std::int64_t SweepResult::failures(CellStatus status) const {
  std::int64_t n = 0;
  for (const auto& r : records) n += r.status == status;
  return n;
}

std::uint64_t cell_seed(std::uint64_t master, Round T, int rep) {
  return derive_seed(master, {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(rep)});
}

CellRecord run_cell(const ExperimentSpec& spec, Round T, int rep,
                    const CellObserver& observer, const TraceSink& trace) {
  CellRecord rec;
  rec.T = T;
  rec.rep = rep;
  rec.seed = cell_seed(spec.master_seed, T, rep);
  try {
    check_pairing(spec.adversary, spec.player, T);
    Rng adversary_rng(derive_seed(rec.seed, {0}));
    const RealizationPtr r = realize(spec.adversary, T, adversary_rng);
    auto player = make_player(spec.player, r, T, derive_seed(rec.seed, {1}));
    if (trace) player->set_trace(trace);
    const Feedback fb = spec.feedback.value_or(default_feedback(spec.player));
    const GameTranscript tr = play_game(*r, *player, T, fb);
    const RegretLedger ledger = policy_regret(tr, *r);
    rec.policy_regret = ledger.policy_regret;
    rec.standard_regret = ledger.standard_regret;
    rec.switches = ledger.switch_count;
    if (r->iid_means()) rec.pseudo_regret = pseudo_regret(tr, *r);
    if (observer) observer(rec, *r, *player, tr);
  } catch (const ContractViolation& e) {
    rec.status = CellStatus::ContractViolation;
    rec.error = e.what();
  } catch (const ConfigError& e) {
    rec.status = CellStatus::ConfigError;
    rec.error = e.what();
  }
  return rec;
}

SweepResult run_sweep(const ExperimentSpec& spec, const CellObserver& observer) {
  spec.check();
  SweepResult out;
  out.spec = spec;
  const auto R = static_cast<std::size_t>(spec.repetitions);
  const std::size_t cells = spec.grid.size() * R;
  out.records.resize(cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      out.records[i] = run_cell(spec, spec.grid[i / R], static_cast<int>(i % R), observer);
    }
  };
  if (spec.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < spec.threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : out.records) {
    if (r.status != CellStatus::Ok) {
      out.warnings.push_back("T=" + std::to_string(r.T) + " rep=" + std::to_string(r.rep) +
                             ": " + r.error);
    }
  }
  out.per_T = aggregate(out.records, spec.metric);
  const auto window = fit_window(out.per_T, spec.full_grid_fit);
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : window) pts.emplace_back(static_cast<double>(a.T), a.mean);
  try {
    out.fit = fit_rate(pts);
  } catch (const ConfigError& e) {
    out.warnings.push_back(std::string("no rate fit: ") + e.what());
  }
  return out;
}

std::vector<TAggregate> aggregate(const std::vector<CellRecord>& records, Metric metric) {
  std::vector<TAggregate> out;
  std::map<Round, std::size_t> slot;
  std::vector<std::vector<double>> values;
  std::vector<double> switches;
  for (const auto& r : records) {
    auto [it, fresh] = slot.try_emplace(r.T, out.size());
    if (fresh) {
      out.push_back({r.T});
      values.emplace_back();
      switches.push_back(0.0);
    }
    const auto v = r.value(metric);
    if (!v) continue;
    values[it->second].push_back(*v);
    switches[it->second] += static_cast<double>(r.switches);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = values[i];
    const auto n = static_cast<double>(xs.size());
    out[i].n = static_cast<int>(xs.size());
    if (xs.empty()) {
      out[i].mean = out[i].se = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    out[i].mean_switches = switches[i] / n;
  }
  return out;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  RateFit fit;
  std::vector<double> xs, ys;
  for (const auto& [T, mean] : points) {
    if (!(mean > 0.0) || !(T > 0.0)) {
      fit.warnings.push_back("dropped point T=" + std::to_string(T) +
                             " with non-positive mean");
      continue;
    }
    xs.push_back(std::log(T));
    ys.push_back(std::log(mean));
  }
  const auto n = xs.size();
  if (n < 3) {
    throw ConfigError("rate fit needs at least 3 usable points, got " + std::to_string(n));
  }
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = xs[i];
    X(i, 1) = 1.0;
    y[i] = ys[i];
  }
  const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
  fit.alpha = coef[0];
  fit.beta = coef[1];
  fit.points = static_cast<int>(n);

  const Eigen::VectorXd resid = y - X * coef;
  const double dof = static_cast<double>(n) - 2.0;
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::VectorXd centered = X.col(0).array() - X.col(0).mean();
  const double sxx = centered.squaredNorm();
  fit.alpha_se = std::sqrt(sigma2 / sxx);
  const boost::math::students_t dist(dof);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.alpha_lo = fit.alpha - q * fit.alpha_se;
  fit.alpha_hi = fit.alpha + q * fit.alpha_se;
  return fit;
}

std::vector<TAggregate> fit_window(const std::vector<TAggregate>& per_T, bool full) {
  if (full) return per_T;
  const std::size_t n = per_T.size();
  const std::size_t keep = std::max((n + 1) / 2, std::min<std::size_t>(n, 3));
  return {per_T.end() - static_cast<std::ptrdiff_t>(keep), per_T.end()};
}

double pseudo_regret(const GameTranscript& transcript, const Realization& realization) {
  const Vector* mu = realization.iid_means();
  if (!mu) throw std::invalid_argument("pseudo_regret needs an i.i.d. realization");
  double total = 0.0;
  for (std::size_t t = 0; t < transcript.actions.size(); ++t) {
    total += (*mu)[transcript.actions[t]];
    if (t > 0 && transcript.actions[t] != transcript.actions[t - 1]) total += 1.0;
  }
  return total - static_cast<double>(transcript.horizon) * mu->minCoeff();
}

std::vector<ProbeRow> lower_bound_probe(const std::vector<PlayerSpec>& players,
                                        const std::vector<Round>& grid, int repetitions,
                                        std::uint64_t master_seed, int threads) {
  std::vector<ProbeRow> rows;
  for (const auto& p : players) {
    ExperimentSpec spec;
    RandomWalkLossesSpec walk;
    walk.with_switching_cost = true;
    spec.adversary = walk;
    spec.player = p;
    spec.feedback = Feedback::Bandit;
    spec.grid = grid;
    spec.repetitions = repetitions;
    spec.master_seed = master_seed;
    spec.threads = threads;
    spec.check();
    const SweepResult res = run_sweep(spec);

    for (std::size_t g = 0; g < grid.size(); ++g) {
      ProbeRow row;
      row.player = kind_of(p);
      row.T = grid[g];
      const double scale = std::pow(static_cast<double>(grid[g]), 2.0 / 3.0);
      std::vector<double> xs;
      for (const auto& r : res.records) {
        if (r.T != grid[g]) continue;
        if (r.status != CellStatus::Ok) {
          ++row.failures;
          continue;
        }
        xs.push_back(r.policy_regret / scale);
      }
      row.n = static_cast<int>(xs.size());
      if (!xs.empty()) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        row.mean = sum / row.n;
        double ss = 0.0;
        for (double x : xs) ss += (x - row.mean) * (x - row.mean);
        row.se = row.n > 1 ? std::sqrt(ss / (row.n - 1) / row.n) : 0.0;
      } else {
        row.mean = row.se = std::nan("");
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace polreg

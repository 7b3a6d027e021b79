// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>
#include <vector>

#include "polreg/adversaries.hpp"
#include "polreg/errors.hpp"
#include "polreg/harness.hpp"
#include "polreg/reductions.hpp"
#include "polreg/sampler.hpp"

using namespace polreg;

namespace {

struct Tally {
  std::int64_t cells = 0;
  std::int64_t violations = 0;
  std::vector<std::string> where;

  void add(const SweepResult& r, const std::string& label) {
    cells += static_cast<std::int64_t>(r.records.size());
    const auto v = r.failures(CellStatus::ContractViolation);
    violations += v;
    if (v) where.push_back(label + ": " + std::to_string(v));
  }
  void add(const std::vector<ProbeRow>& rows, const std::string& label) {
    for (const auto& row : rows) {
      cells += row.n + row.failures;
      violations += row.failures;
      if (row.failures) where.push_back(label + "/" + row.player + ": " + std::to_string(row.failures));
    }
  }
};

Tally tally;
int failed = 0;

void report(int n, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failed;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<Round> pow2_grid() {
  std::vector<Round> g;
  for (int e = 10; e <= 15; ++e) g.push_back(Round{1} << e);
  return g;
}

AdversarySpec walk_with_switching() {
  RandomWalkLossesSpec w;
  w.with_switching_cost = true;
  return w;
}

MinibatchHedgeSpec minibatch_m1() {
  MinibatchHedgeSpec mb;
  mb.m = 1;
  mb.j_scale = 0.5;
  return mb;
}

void criterion1() {
  const Round T = 8000;
  const std::vector<PlayerSpec> players = {Exp3pDriftSpec{}, minibatch_m1(), ConstantSpec{},
                                           UniformRandomSpec{}};
  const auto rows = lower_bound_probe(players, {T}, 300, 101);
  tally.add(rows, "probe");
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    const bool ok = r.failures == 0 && r.mean >= 0.1 - 2 * r.se;
    pass = pass && ok;
    detail += r.player + "=" + fmt("%.3f", r.mean) + "(se " + fmt("%.3f", r.se) + ") ";
  }
  report(1, pass, "regret/T^(2/3) at T=8000, R=300: " + detail);
}

ExperimentSpec sweep_spec(AdversarySpec adv, PlayerSpec player, std::vector<Round> grid,
                          int reps, std::uint64_t seed) {
  ExperimentSpec s;
  s.adversary = std::move(adv);
  s.player = std::move(player);
  s.grid = std::move(grid);
  s.repetitions = reps;
  s.master_seed = seed;
  return s;
}

void criteria2and3() {
  IidLossesSpec iid;  // uniform on [0, 1] around 1/2 for both arms
  iid.with_switching_cost = true;
  const auto fll = run_sweep(sweep_spec(iid, FllSwitchingSpec{}, pow2_grid(), 50, 202));
  tally.add(fll, "2a");

  const auto exp3 = run_sweep(sweep_spec(walk_with_switching(), Exp3pDriftSpec{}, pow2_grid(), 50, 203));
  tally.add(exp3, "2b/exp3p-drift");
  const auto mb = run_sweep(sweep_spec(walk_with_switching(), minibatch_m1(), pow2_grid(), 50, 204));
  tally.add(mb, "2b/minibatch-hedge");

  const double a_fll = fll.fit ? fll.fit->alpha : std::nan("");
  const double a_exp = exp3.fit ? exp3.fit->alpha : std::nan("");
  const double a_mb = mb.fit ? mb.fit->alpha : std::nan("");
  const bool a_ok = a_fll >= 0.40 && a_fll <= 0.65;
  const bool b_ok = a_exp >= 0.60 && a_mb >= 0.60;
  report(2, a_ok && b_ok,
         "(a) fll-switching alpha=" + fmt("%.3f", a_fll) + " in [0.40,0.65]; (b) exp3p-drift alpha=" +
             fmt("%.3f", a_exp) + ", minibatch-hedge alpha=" + fmt("%.3f", a_mb) + " >= 0.60");

  bool sw_ok = !fll.per_T.empty();
  double worst = 0.0;
  for (const auto& a : fll.per_T) {
    const double ratio = a.mean_switches / std::sqrt(double(a.T));
    worst = std::max(worst, ratio);
    sw_ok = sw_ok && a.mean_switches <= 8 * std::sqrt(double(a.T));
  }
  report(3, sw_ok, "max mean switches / sqrt(T) = " + fmt("%.3f", worst) + " <= 8");
}

void criterion4() {
  const Round T = 8000;
  const double scale = std::pow(double(T - 1), 2.0 / 3.0);
  bool pass = true;
  std::string detail;
  for (const PlayerSpec& p : {PlayerSpec{HedgeSpec{}}, PlayerSpec{FllSwitchingSpec{}}}) {
    const auto res = run_sweep(sweep_spec(MemoryTwoLossesSpec{}, p, {T}, 300, 404));
    tally.add(res, "4/" + kind_of(p));
    const auto& a = res.per_T.at(0);
    const double mean = a.mean / scale, se = a.se / scale;
    pass = pass && a.n == 300 && mean >= 0.1 - 2 * se;
    detail += kind_of(p) + "=" + fmt("%.3f", mean) + "(se " + fmt("%.3f", se) + ") ";
  }
  report(4, pass, "regret/(T-1)^(2/3) at T=8000, R=300: " + detail);
}

void criterion5() {
  const Round L = 100;
  const int K = 3;
  Rng table_rng(505);
  Matrix tab(L, K);
  for (Round t = 0; t < L; ++t)
    for (int x = 0; x < K; ++x) tab(t, x) = uniform01(table_rng);
  const auto r = with_switching_cost(realize_oblivious(tab));
  const auto b = BoundsConfig::of(*r, L);
  const int m = b.m;

  MinibatchHedgePlayer::Options opt;
  opt.epochs = 1;
  const SamplerGeometry g{L, K, m};
  const Round n = g.cycle();
  Vector truth = Vector::Zero(K);
  for (int x = 0; x < K; ++x) {
    for (Round p = 1; p <= n; ++p) {
      const std::vector<Action> arm(2, x), base(2, opt.base_action);
      truth[x] += exploration_estimate(r->evaluate(p + 2 * m + 1, arm), r->evaluate(p + m, base),
                                       b.C, b.D, m);
    }
    truth[x] /= double(n);
  }

  const std::int64_t draws = 100000;
  Vector sum = Vector::Zero(K), sq = Vector::Zero(K);
  std::int64_t violations = 0;
  for (std::int64_t i = 0; i < draws; ++i) {
    try {
      MinibatchHedgePlayer player(K, b, opt, derive_seed(5005, {static_cast<std::uint64_t>(i)}));
      play_game(*r, player, L, Feedback::Bandit);
      const Vector& est = player.last_estimates();
      sum += est;
      sq += est.cwiseProduct(est);
    } catch (const ContractViolation&) {
      ++violations;
    }
  }
  tally.cells += draws;
  tally.violations += violations;
  if (violations) tally.where.push_back("5: " + std::to_string(violations));

  bool pass = violations == 0;
  std::string detail;
  const double N = double(draws - violations);
  for (int x = 0; x < K; ++x) {
    const double mean = sum[x] / N;
    const double var = (sq[x] - N * mean * mean) / (N - 1);
    const double se = std::sqrt(var / N);
    const double z = se > 0 ? std::abs(mean - truth[x]) / se : (mean == truth[x] ? 0.0 : INFINITY);
    pass = pass && z <= 3.0;
    detail += "arm " + std::to_string(x) + " |dev|/se=" + fmt("%.2f", z) + " ";
  }
  report(5, pass, "epoch length 100, m=1, 1e5 draws: " + detail);
}

void criterion6() {
  int cases = 0;
  bool exact = true;
  for (int K = 1; K <= 3; ++K)
    for (int m = 0; m <= 1; ++m)
      for (Round n = 1; n <= 12; ++n) {
        const auto g = SamplerGeometry::from_cycle(n, K, m);
        if (!g.feasible()) continue;
        ++cases;
        exact = exact && enumerate_sampler(g).uniform && enumerate_configurations(g).uniform;
      }
  Rng rng(606);
  const auto chi = chi_square_sampler(SamplerGeometry{103, 3, 1}, 100000, rng);
  double min_p = 1.0;
  for (double p : chi.p_value) min_p = std::min(min_p, p);
  report(6, exact && cases > 0 && chi.pass,
         "exact uniform on " + std::to_string(cases) + " feasible geometries; chi-square (n=100,K=3,m=1) min p=" +
             fmt("%.4f", min_p) + " vs 1e-3");
}

void criterion7() {
  IidLossesSpec iid;
  iid.means = {0.4, 0.5, 0.6};
  iid.noise = NoiseKind::Bernoulli;
  iid.with_switching_cost = true;
  EliminationSpec el;
  el.delta = 0.05;
  el.conf_const = 0.5;
  auto spec = sweep_spec(iid, el, {10000, 100000, 1000000}, 30, 707);
  spec.metric = Metric::PseudoRegret;

  std::mutex mu;
  int runs = 0, survived = 0, bad_switch = 0, max_S = 0;
  const auto res = run_sweep(spec, [&](const CellRecord& rec, const Realization&, const Player& p,
                                       const GameTranscript&) {
    const auto& e = dynamic_cast<const EliminationPlayer&>(p);
    std::lock_guard lock(mu);
    ++runs;
    max_S = std::max(max_S, e.total_stages());
    if (rec.switches > std::int64_t{3} * e.total_stages()) ++bad_switch;
    const auto& last = e.stages().back().active;
    if (std::find(last.begin(), last.end(), 0) != last.end()) ++survived;
  });
  tally.add(res, "7");
  const double alpha = res.fit ? res.fit->alpha : std::nan("");
  const double rate = runs ? double(survived) / runs : 0.0;
  const bool i_ok = runs == 90 && bad_switch == 0 && max_S <= 6;
  const bool ii_ok = alpha <= 0.6;
  const bool iii_ok = rate >= 0.95;
  report(7, i_ok && ii_ok && iii_ok,
         "(i) switch > K*S in " + std::to_string(bad_switch) + " of " + std::to_string(runs) +
             " runs, max S=" + std::to_string(max_S) + "; (ii) pseudo-regret alpha=" + fmt("%.3f", alpha) +
             " <= 0.6; (iii) best arm survived " + fmt("%.3f", rate));
}

void criterion8() {
  Rng rng(808);
  int mismatches = 0, oblivious = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int K = 1 + static_cast<int>(uniform_index(rng, 3));
    const Round T = 1 + static_cast<Round>(uniform_index(rng, 10));
    const int m = static_cast<int>(uniform_index(rng, 3));
    std::size_t windows = 1;
    for (int i = 0; i <= m; ++i) windows *= static_cast<std::size_t>(K);
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(T), std::vector<double>(windows));
    for (auto& row : vals)
      for (double& v : row) v = uniform01(rng);
    // A window shorter than m+1 is read as if padded with leading zeros.
    const auto kernel = [&vals, K](Round t, std::span<const Action> w) -> std::optional<double> {
      std::size_t idx = 0;
      for (Action a : w) idx = idx * static_cast<std::size_t>(K) + static_cast<std::size_t>(a);
      return vals[static_cast<std::size_t>(t - 1)][idx];
    };
    const auto r = realize_bounded_memory(kernel, m, K, T);

    class Script : public Player {
     public:
      Script(int K, std::vector<Action> xs) : Player(K), xs_(std::move(xs)) {}
      std::string name() const override { return "script"; }
      Feedback preferred_feedback() const override { return Feedback::Bandit; }

     protected:
      Action do_choose() override { return xs_[static_cast<std::size_t>(round())]; }
      void do_observe_bandit(double) override {}
      void do_observe_full(const Vector&) override {}

     private:
      std::vector<Action> xs_;
    };
    std::vector<Action> xs;
    for (Round t = 0; t < T; ++t) xs.push_back(static_cast<Action>(uniform_index(rng, K)));
    Script player(K, xs);
    const auto tr = play_game(*r, player, T, m == 0 ? Feedback::FullInformation : Feedback::Bandit);
    const auto ledger = policy_regret(tr, *r);

    double incurred = 0.0;
    for (Round t = 1; t <= T; ++t) {
      const auto len = static_cast<std::size_t>(std::min<Round>(t, m + 1));
      incurred += *kernel(t, std::span<const Action>(xs.data() + t - len, len));
    }
    double best = INFINITY;
    for (Action x = 0; x < K; ++x) {
      double total = 0.0;
      for (Round t = 1; t <= T; ++t) {
        const std::vector<Action> w(static_cast<std::size_t>(std::min<Round>(t, m + 1)), x);
        total += *kernel(t, w);
      }
      best = std::min(best, total);
    }
    if (ledger.policy_regret != incurred - best) ++mismatches;
    if (m == 0) {
      ++oblivious;
      if (ledger.policy_regret != ledger.standard_regret) ++mismatches;
    }
  }
  report(8, mismatches == 0,
         "200 instances (" + std::to_string(oblivious) + " oblivious), exact mismatches=" +
             std::to_string(mismatches));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion1();
  criteria2and3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::string where;
  for (const auto& w : tally.where) where += " [" + w + "]";
  report(9, tally.violations == 0,
         std::to_string(tally.violations) + " contract violations over " + std::to_string(tally.cells) +
             " games" + where);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 9 criteria failed (%.0f s)\n", failed, secs);
  return failed ? 1 : 0;
}

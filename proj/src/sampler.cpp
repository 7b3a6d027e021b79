#include "polreg/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include <boost/math/distributions/chi_squared.hpp>

#include "polreg/errors.hpp"

namespace polreg {

namespace {

std::string str(Round v) { return std::to_string(v); }

// Uniform (K-1)-subset of {0..n-1}, sorted (Floyd).
std::vector<Round> floyd_subset(Round n, int k, Rng& rng) {
  std::unordered_set<Round> chosen;
  for (Round j = n - k; j < n; ++j) {
    const auto t = static_cast<Round>(uniform_index(rng, static_cast<std::uint64_t>(j + 1)));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<Round> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Slot positions (0-based) for rotation r and extra gaps.
void place(const std::vector<Round>& gaps, Round r, Round spacing, Round n,
           std::vector<Round>& slots) {
  slots.resize(gaps.size());
  Round pos = r;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    slots[i] = pos % n;
    pos += spacing + gaps[i];
  }
}

template <typename F>
void for_each_composition(Round total, int parts, std::vector<Round>& cur, F&& f) {
  if (parts == 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (Round v = 0; v <= total; ++v) {
    cur.push_back(v);
    for_each_composition(total - v, parts - 1, cur, f);
    cur.pop_back();
  }
}

void finish(ExactMarginals& out) {
  const Round n = out.geometry.cycle();
  out.uniform = out.total > 0;
  for (const auto& row : out.counts) {
    for (std::uint64_t c : row) {
      if (c * static_cast<std::uint64_t>(n) != out.total) out.uniform = false;
    }
  }
}

}  // namespace

bool SamplerGeometry::feasible() const {
  if (K < 1 || m < 0 || epoch_length < 1) return false;
  if (epoch_length < 2 * K * (m + 1)) return false;
  const Round n = cycle();
  if (n < 1) return false;
  return K == 1 || n >= K * spacing();
}

void SamplerGeometry::check() const {
  if (K < 1) throw ConfigError("sampler: K >= 1 required");
  if (m < 0) throw ConfigError("sampler: m >= 0 required");
  if (epoch_length < 2 * K * (m + 1)) {
    throw ConfigError("epoch length " + str(epoch_length) + " < 2K(m+1) = " +
                      str(2 * K * (m + 1)));
  }
  const Round n = cycle();
  if (n < 1) {
    throw ConfigError("exploration cycle L - 2m - 1 = " + str(n) + " < 1");
  }
  if (K > 1 && n < K * spacing()) {
    throw ConfigError("exploration cycle L - 2m - 1 = " + str(n) +
                      " < K(4m+3) = " + str(K * spacing()));
  }
}

std::vector<Round> sample_exploration_starts(const SamplerGeometry& g, Rng& rng,
                                             bool rotate) {
  g.check();
  const Round n = g.cycle();
  const int K = g.K;
  const Round spacing = K == 1 ? 0 : g.spacing();
  const Round spare = K == 1 ? 0 : n - K * spacing;

  // Stars and bars: K-1 bars among spare + K - 1 cells.
  std::vector<Round> gaps(static_cast<std::size_t>(K), 0);
  if (K > 1) {
    const auto bars = floyd_subset(spare + K - 1, K - 1, rng);
    Round prev = -1;
    for (int i = 0; i < K - 1; ++i) {
      gaps[i] = bars[i] - prev - 1;
      prev = bars[i];
    }
    gaps[K - 1] = spare + K - 1 - prev - 1;
  }
  const Round r = rotate ? static_cast<Round>(uniform_index(rng, static_cast<std::uint64_t>(n))) : 0;

  std::vector<Round> slots;
  place(gaps, r, spacing, n, slots);

  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = K - 1; i > 0; --i) {
    const auto j = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  std::vector<Round> starts(static_cast<std::size_t>(K));
  for (int x = 0; x < K; ++x) starts[x] = slots[perm[x]] + 1;
  return starts;
}

bool well_separated(const std::vector<Round>& starts, Round cycle, int m) {
  const Round need = 4 * m + 3;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (std::size_t j = i + 1; j < starts.size(); ++j) {
      const Round d = (starts[j] - starts[i] + cycle) % cycle;
      if (std::min(d, cycle - d) < need) return false;
    }
  }
  return true;
}

ExactMarginals enumerate_sampler(const SamplerGeometry& g) {
  g.check();
  ExactMarginals out;
  out.geometry = g;
  const Round n = g.cycle();
  const int K = g.K;
  out.counts.assign(K, std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
  const Round spacing = K == 1 ? 0 : g.spacing();
  const Round spare = K == 1 ? 0 : n - K * spacing;

  std::vector<int> perm(static_cast<std::size_t>(K));
  std::vector<Round> slots;
  std::vector<Round> cur;
  for_each_composition(spare, K, cur, [&](const std::vector<Round>& gaps) {
    for (Round r = 0; r < n; ++r) {
      place(gaps, r, spacing, n, slots);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        for (int x = 0; x < K; ++x) ++out.counts[x][slots[perm[x]]];
        ++out.total;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  });
  finish(out);
  return out;
}

ExactMarginals enumerate_configurations(const SamplerGeometry& g) {
  g.check();
  ExactMarginals out;
  out.geometry = g;
  const Round n = g.cycle();
  const int K = g.K;
  out.counts.assign(K, std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));

  std::vector<Round> starts(static_cast<std::size_t>(K), 1);
  for (;;) {
    bool distinct = true;
    for (int i = 0; i < K && distinct; ++i) {
      for (int j = i + 1; j < K; ++j) {
        if (starts[i] == starts[j]) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct && well_separated(starts, n, g.m)) {
      for (int x = 0; x < K; ++x) ++out.counts[x][starts[x] - 1];
      ++out.total;
    }
    int i = 0;
    while (i < K && starts[i] == n) starts[i++] = 1;
    if (i == K) break;
    ++starts[i];
  }
  finish(out);
  return out;
}

ChiSquareReport chi_square_sampler(const SamplerGeometry& g, std::int64_t draws,
                                   Rng& rng, bool rotate, double significance) {
  g.check();
  if (draws < 1) throw ConfigError("chi-square check needs draws >= 1");
  const Round n = g.cycle();
  ChiSquareReport rep;
  rep.geometry = g;
  rep.draws = draws;
  rep.significance = significance;
  rep.histogram.assign(g.K, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  for (std::int64_t d = 0; d < draws; ++d) {
    const auto starts = sample_exploration_starts(g, rng, rotate);
    for (int x = 0; x < g.K; ++x) ++rep.histogram[x][starts[x] - 1];
  }
  rep.dof = static_cast<int>(n - 1);
  rep.pass = true;
  const double expected = static_cast<double>(draws) / static_cast<double>(n);
  for (int x = 0; x < g.K; ++x) {
    double stat = 0.0;
    for (std::int64_t c : rep.histogram[x]) {
      const double diff = static_cast<double>(c) - expected;
      stat += diff * diff / expected;
    }
    double p = 1.0;
    if (rep.dof > 0) {
      boost::math::chi_squared dist(rep.dof);
      p = boost::math::cdf(boost::math::complement(dist, stat));
    }
    rep.statistic.push_back(stat);
    rep.p_value.push_back(p);
    if (p < significance) rep.pass = false;
  }
  return rep;
}

}  // namespace polreg

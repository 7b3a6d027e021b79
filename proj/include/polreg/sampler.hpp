#pragma once

#include <cstdint>
#include <vector>

#include "polreg/random.hpp"
#include "polreg/types.hpp"

namespace polreg {

/// Exploration geometry of one epoch. Interval starts live on a circle of
/// `cycle()` = L - 2m - 1 positions; every interval covers 2(m+1) rounds and
/// consecutive starts are at least 4m+3 apart around the circle.
struct SamplerGeometry {
  Round epoch_length = 0;
  int K = 1;
  int m = 0;

  static SamplerGeometry from_cycle(Round cycle, int K, int m) {
    return {cycle + 2 * m + 1, K, m};
  }

  Round cycle() const { return epoch_length - 2 * m - 1; }
  Round spacing() const { return 4 * m + 3; }
  /// Throws ConfigError naming the violated inequality.
  void check() const;
  bool feasible() const;
};

/// Start (1-based, in [1, cycle]) of each arm's interval: a uniform weak
/// composition of the spare positions into K gaps, a uniform rotation, then
/// a uniform arm-to-slot permutation. `rotate = false` pins the rotation to
/// zero and exists only to show the uniformity checks have teeth.
std::vector<Round> sample_exploration_starts(const SamplerGeometry& g, Rng& rng,
                                             bool rotate = true);

/// Whether two starts leave at least 2m+1 free positions between intervals
/// on the circle.
bool well_separated(const std::vector<Round>& starts, Round cycle, int m);

struct ExactMarginals {
  SamplerGeometry geometry;
  /// counts[x][p-1]: outcomes with arm x starting at p.
  std::vector<std::vector<std::uint64_t>> counts;
  std::uint64_t total = 0;
  /// counts[x][p] * cycle == total for every x, p.
  bool uniform = false;
};

/// Walks every outcome of the sampler's choice space (rotation x composition x
/// permutation), each equally likely.
ExactMarginals enumerate_sampler(const SamplerGeometry& g);
/// Brute force over all labeled well-separated configurations.
ExactMarginals enumerate_configurations(const SamplerGeometry& g);

struct ChiSquareReport {
  SamplerGeometry geometry;
  std::int64_t draws = 0;
  /// Per arm.
  std::vector<double> statistic;
  std::vector<double> p_value;
  int dof = 0;
  double significance = 1e-3;
  bool pass = false;
  std::vector<std::vector<std::int64_t>> histogram;
};

ChiSquareReport chi_square_sampler(const SamplerGeometry& g, std::int64_t draws,
                                   Rng& rng, bool rotate = true,
                                   double significance = 1e-3);

}  // namespace polreg

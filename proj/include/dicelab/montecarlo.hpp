#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dicelab/laws.hpp"
#include "dicelab/rng.hpp"

namespace dicelab {

/// One sampled collection: victory and tie counts along the cyclic pairs,
/// and whether the strict intransitivity test 2N_k > n_k n_{k+1} - E_k held
/// for every k.
struct TrialTally {
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> e;
  bool intransitive = false;
};

struct SimulationReport {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0;
  double ci95 = 0;  // 1.96 sqrt(p_hat (1 - p_hat) / trials)
  std::uint64_t seed = 0;
  int workers = 1;
  double elapsed_seconds = 0;
  std::string model;
  const char* rng = kRngAlgorithm;
};

/// Diagnostics for the normalized victories (N_k - E N_k)/sqrt(Var N_k):
/// their empirical mean, variance and correlation across trials against the
/// coupling matrix predicted by the model coefficients.
struct CltReport {
  std::vector<double> empirical_mean;
  std::vector<double> empirical_var;
  std::vector<std::vector<double>> empirical_corr;  // unit diagonal
  std::vector<std::vector<double>> theoretical;     // from sigma/gamma of the config
  double max_abs_deviation = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  const char* rng = kRngAlgorithm;
};

/// Draws every face independently and tallies all cyclic pairs by sorting
/// and merging, O(n log n) per pair. Deterministic given the seed.
TrialTally sample_tally(const ModelConfig& config, std::uint64_t seed);

/// Fraction of trials forming an intransitive cycle. Trials are split across
/// workers, worker w drawing from the stream seeded seed + w; the report
/// depends only on (seed, workers).
SimulationReport estimate_intransitivity(const ModelConfig& config, std::uint64_t trials,
                                         std::uint64_t seed, int workers = 1);

/// Samples uniform words of W_l(n) by multiset shuffling and tests the
/// strict cycle condition; distributionally identical to
/// estimate_intransitivity with one continuous law for every die.
SimulationReport estimate_uniform_word_ratio(int letters, int faces, std::uint64_t trials,
                                             std::uint64_t seed);

/// Requires every Var N_k > 0 (point-mass models are rejected); the exact
/// finite-size variance is used for normalization, not its leading term.
CltReport clt_diagnostics(const ModelConfig& config, std::uint64_t trials,
                          std::uint64_t seed);

}  // namespace dicelab

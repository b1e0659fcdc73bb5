#include "dicelab/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <thread>

#include "dicelab/word.hpp"

namespace dicelab {

namespace {

// Law compiled into plain double tables for fast repeated draws.
struct Sampler {
  LawKind kind;
  double inv_log_u = 0;  // geometric: 1 / log(1-p)
  std::vector<double> values;
  std::vector<double> cumulative;

  static Sampler compile(const Law& law) {
    Sampler s;
    s.kind = law.kind();
    if (law.kind() == LawKind::geometric) {
      s.inv_log_u = 1.0 / std::log1p(-to_double(law.geometric_p()));
    } else if (law.kind() == LawKind::finite) {
      double acc = 0;
      for (std::size_t i = 0; i < law.values().size(); ++i) {
        s.values.push_back(to_double(law.values()[i]));
        acc += to_double(law.weights()[i]);
        s.cumulative.push_back(acc);
      }
      s.cumulative.back() = 1.0;
    }
    return s;
  }

  double draw(Rng& rng) const {
    switch (kind) {
      case LawKind::continuous:
        return rng.next_unit();
      case LawKind::geometric:
        return std::ceil(std::log(rng.next_unit()) * inv_log_u);
      case LawKind::finite: {
        const double u = rng.next_unit();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx =
            std::min(std::size_t(it - cumulative.begin()), values.size() - 1);
        return values[idx];
      }
    }
    return 0;
  }
};

// Counts a > b pairs and a == b pairs of two ascending face lists.
void count_pair(const std::vector<double>& a, const std::vector<double>& b,
                std::int64_t& wins, std::int64_t& ties) {
  std::size_t lt = 0, le = 0;
  wins = 0;
  ties = 0;
  for (double face : a) {
    while (lt < b.size() && b[lt] < face) ++lt;
    if (le < lt) le = lt;
    while (le < b.size() && b[le] <= face) ++le;
    wins += std::int64_t(lt);
    ties += std::int64_t(le - lt);
  }
}

struct TrialScratch {
  std::vector<Sampler> samplers;
  std::vector<std::vector<double>> faces;

  explicit TrialScratch(const ModelConfig& config) {
    for (const auto& law : config.laws) samplers.push_back(Sampler::compile(law));
    for (int n : config.faces) faces.emplace_back(std::size_t(n));
  }

  void roll(Rng& rng) {
    for (std::size_t k = 0; k < samplers.size(); ++k) {
      for (auto& face : faces[k]) face = samplers[k].draw(rng);
      std::sort(faces[k].begin(), faces[k].end());
    }
  }

  void tally(std::vector<std::int64_t>& n, std::vector<std::int64_t>& e) const {
    const std::size_t count = faces.size();
    for (std::size_t k = 0; k < count; ++k)
      count_pair(faces[k], faces[(k + 1) % count], n[k], e[k]);
  }
};

bool cycle_holds(const ModelConfig& config, const std::vector<std::int64_t>& n,
                 const std::vector<std::int64_t>& e) {
  const int count = config.count();
  for (int k = 0; k < count; ++k) {
    const std::int64_t comparisons = std::int64_t(config.faces[std::size_t(k)]) *
                                     config.faces[std::size_t((k + 1) % count)];
    if (2 * n[std::size_t(k)] <= comparisons - e[std::size_t(k)]) return false;
  }
  return true;
}

std::string describe(const ModelConfig& config) {
  std::string out = "laws=";
  for (int k = 0; k < config.count(); ++k) {
    if (k) out += ',';
    out += config.laws[std::size_t(k)].describe();
  }
  out += " faces=";
  for (int k = 0; k < config.count(); ++k) {
    if (k) out += ',';
    out += std::to_string(config.faces[std::size_t(k)]);
  }
  return out;
}

struct Kahan {
  double sum = 0, carry = 0;
  void add(double value) {
    const double y = value - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

TrialTally sample_tally(const ModelConfig& config, std::uint64_t seed) {
  if (config.count() < 2) raise(Errc::invalid_argument, "need at least two dice");
  TrialScratch scratch(config);
  Rng rng(seed);
  scratch.roll(rng);
  TrialTally tally;
  tally.n.resize(std::size_t(config.count()));
  tally.e.resize(std::size_t(config.count()));
  scratch.tally(tally.n, tally.e);
  tally.intransitive = cycle_holds(config, tally.n, tally.e);
  return tally;
}

SimulationReport estimate_intransitivity(const ModelConfig& config, std::uint64_t trials,
                                         std::uint64_t seed, int workers) {
  if (config.count() < 2) raise(Errc::invalid_argument, "need at least two dice");
  if (trials < 1) raise(Errc::invalid_argument, "need at least one trial");
  if (workers < 1) raise(Errc::invalid_argument, "need at least one worker");
  const auto started = std::chrono::steady_clock::now();

  std::vector<std::uint64_t> hits(std::size_t(workers), 0);
  auto run = [&](int w) {
    const std::uint64_t share = trials / std::uint64_t(workers);
    const std::uint64_t mine = share + (std::uint64_t(w) < trials % std::uint64_t(workers));
    Rng rng(seed + std::uint64_t(w));
    TrialScratch scratch(config);
    std::vector<std::int64_t> n(std::size_t(config.count()));
    std::vector<std::int64_t> e(std::size_t(config.count()));
    std::uint64_t local = 0;
    for (std::uint64_t it = 0; it < mine; ++it) {
      scratch.roll(rng);
      scratch.tally(n, e);
      local += cycle_holds(config, n, e);
    }
    hits[std::size_t(w)] = local;
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  SimulationReport report;
  report.trials = trials;
  for (std::uint64_t h : hits) report.hits += h;
  report.p_hat = double(report.hits) / double(trials);
  report.ci95 = 1.96 * std::sqrt(report.p_hat * (1.0 - report.p_hat) / double(trials));
  report.seed = seed;
  report.workers = workers;
  report.model = describe(config);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SimulationReport estimate_uniform_word_ratio(int letters, int faces, std::uint64_t trials,
                                             std::uint64_t seed) {
  if (letters < 2) raise(Errc::invalid_argument, "need at least two letters");
  if (faces < 1) raise(Errc::invalid_argument, "need at least one face");
  if (trials < 1) raise(Errc::invalid_argument, "need at least one trial");
  const std::int64_t total = std::int64_t(letters) * faces;
  if (total > kMaxDenseLetters)
    raise(Errc::too_large, "word of " + std::to_string(total) + " letters is too long");
  const auto started = std::chrono::steady_clock::now();

  if (letters > 32) raise(Errc::too_large, "word sampling supports up to 32 letters");
  const std::int64_t target = std::int64_t(faces) * faces;
  Rng rng(seed);
  std::array<std::int64_t, 32> rem{}, seen{}, wins{};
  std::array<int, 32> pred{};
  for (int k = 0; k < letters; ++k) pred[std::size_t(k)] = k == 0 ? letters - 1 : k - 1;
  std::uint64_t hits = 0;
  for (std::uint64_t it = 0; it < trials; ++it) {
    for (int k = 0; k < letters; ++k) {
      rem[std::size_t(k)] = faces;
      seen[std::size_t(k)] = 0;
      wins[std::size_t(k)] = 0;
    }
    // Draw the uniform multiset permutation position by position; only the
    // cyclic pair tallies are kept. The letter pick is branch-free.
    for (std::int64_t left = total; left > 0; --left) {
      const std::uint64_t pick = rng.next_below(std::uint64_t(left));
      std::uint64_t acc = 0;
      int c = 0;
      for (int i = 0; i + 1 < letters; ++i) {
        acc += std::uint64_t(rem[std::size_t(i)]);
        c += int(pick >= acc);
      }
      const int p = pred[std::size_t(c)];
      wins[std::size_t(p)] += seen[std::size_t(p)];
      seen[std::size_t(c)] += 1;
      rem[std::size_t(c)] -= 1;
    }
    bool cycle = true;
    for (int k = 0; k < letters && cycle; ++k) cycle = 2 * wins[std::size_t(k)] > target;
    hits += cycle;
  }

  SimulationReport report;
  report.trials = trials;
  report.hits = hits;
  report.p_hat = double(hits) / double(trials);
  report.ci95 = 1.96 * std::sqrt(report.p_hat * (1.0 - report.p_hat) / double(trials));
  report.seed = seed;
  report.workers = 1;
  report.model =
      "uniform-words letters=" + std::to_string(letters) + " faces=" + std::to_string(faces);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

CltReport clt_diagnostics(const ModelConfig& config, std::uint64_t trials,
                          std::uint64_t seed) {
  const int count = config.count();
  // the cyclic coupling matrix is only defined from three dice up
  if (count < 3) raise(Errc::invalid_argument, "need at least three dice");
  if (trials < 2) raise(Errc::invalid_argument, "need at least two trials");

  const auto moments = model_moments(config);
  std::vector<double> mean(static_cast<std::size_t>(count)), sd(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const auto& entry = moments.entries[std::size_t(k)];
    const double variance = to_double(entry.var_n);
    if (!(variance > 0.0))
      raise(Errc::degenerate_normalization,
            "Var N_" + std::to_string(k + 1) + " vanishes; nothing to normalize");
    mean[std::size_t(k)] = to_double(entry.mean_n);
    sd[std::size_t(k)] = std::sqrt(variance);
  }

  TrialScratch scratch(config);
  Rng rng(seed);
  std::vector<std::int64_t> n(static_cast<std::size_t>(count)), e(static_cast<std::size_t>(count));
  std::vector<double> x(static_cast<std::size_t>(count));
  std::vector<Kahan> sum(static_cast<std::size_t>(count));
  std::vector<Kahan> cross(std::size_t(count) * std::size_t(count));
  for (std::uint64_t it = 0; it < trials; ++it) {
    scratch.roll(rng);
    scratch.tally(n, e);
    for (int k = 0; k < count; ++k)
      x[std::size_t(k)] = (double(n[std::size_t(k)]) - mean[std::size_t(k)]) / sd[std::size_t(k)];
    for (int i = 0; i < count; ++i) {
      sum[std::size_t(i)].add(x[std::size_t(i)]);
      for (int j = i; j < count; ++j)
        cross[std::size_t(i) * std::size_t(count) + std::size_t(j)].add(x[std::size_t(i)] *
                                                                        x[std::size_t(j)]);
    }
  }

  CltReport report;
  report.trials = trials;
  report.seed = seed;
  report.empirical_mean.resize(static_cast<std::size_t>(count));
  report.empirical_var.resize(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double avg = sum[std::size_t(k)].sum / double(trials);
    report.empirical_mean[std::size_t(k)] = avg;
    const double second =
        cross[std::size_t(k) * std::size_t(count) + std::size_t(k)].sum / double(trials);
    report.empirical_var[std::size_t(k)] = second - avg * avg;
  }
  report.empirical_corr.assign(std::size_t(count), std::vector<double>(std::size_t(count), 0));
  for (int i = 0; i < count; ++i) {
    report.empirical_corr[std::size_t(i)][std::size_t(i)] = 1.0;
    for (int j = i + 1; j < count; ++j) {
      const double cij = cross[std::size_t(i) * std::size_t(count) + std::size_t(j)].sum /
                             double(trials) -
                         report.empirical_mean[std::size_t(i)] *
                             report.empirical_mean[std::size_t(j)];
      const double denominator = std::sqrt(report.empirical_var[std::size_t(i)] *
                                           report.empirical_var[std::size_t(j)]);
      const double corr = denominator > 0 ? cij / denominator : 0.0;
      report.empirical_corr[std::size_t(i)][std::size_t(j)] = corr;
      report.empirical_corr[std::size_t(j)][std::size_t(i)] = corr;
    }
  }

  report.theoretical.assign(std::size_t(count), std::vector<double>(std::size_t(count), 0));
  for (int k = 0; k < count; ++k) report.theoretical[std::size_t(k)][std::size_t(k)] = 1.0;
  for (int k = 0; k < count; ++k) {
    const int row = (k + count - 1) % count;
    const double g = moments.entries[std::size_t(k)].gamma;
    report.theoretical[std::size_t(row)][std::size_t(k)] = g;
    report.theoretical[std::size_t(k)][std::size_t(row)] = g;
  }

  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      report.max_abs_deviation =
          std::max(report.max_abs_deviation,
                   std::abs(report.empirical_corr[std::size_t(i)][std::size_t(j)] -
                            report.theoretical[std::size_t(i)][std::size_t(j)]));
  return report;
}

}  // namespace dicelab

#include "dicelab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dicelab/rng.hpp"

namespace dicelab {

namespace {

constexpr double kEigenClamp = 1e-9;

// Sum over independent vertex sets of a path with per-vertex weights w_i:
// g_k = g_{k-1} + w_k g_{k-2}, empty path contributing 1.
double path_independent_sum(const std::vector<double>& w, int first, int last) {
  double prev2 = 1.0, prev1 = 1.0;
  for (int i = first; i <= last; ++i) {
    const double current = prev1 + w[std::size_t(i)] * prev2;
    prev2 = prev1;
    prev1 = current;
  }
  return prev1;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const CovarianceSpec& spec) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_sigma(spec));
  if (solver.info() != Eigen::Success)
    raise(Errc::invalid_argument, "eigendecomposition failed");
  return solver;
}

}  // namespace

CovarianceSpec covariance_from_gamma(std::vector<double> gamma) {
  if (gamma.size() < 3) raise(Errc::invalid_argument, "need at least three coefficients");
  for (double g : gamma)
    if (!(std::abs(g) <= 1.0))
      raise(Errc::invalid_argument, "coupling coefficients must lie in [-1,1]");
  return CovarianceSpec{std::move(gamma)};
}

CovarianceSpec structured_gamma(const std::vector<double>& f) {
  const int count = int(f.size());
  if (count < 3) raise(Errc::invalid_argument, "need at least three fractions");
  for (double value : f)
    if (!(value > 0.0) || value > 1.0)
      raise(Errc::invalid_fraction, "fractions must lie in (0,1]");
  std::vector<double> gamma(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double fp = f[std::size_t((k + count - 1) % count)];
    const double fk = f[std::size_t(k)];
    const double fn = f[std::size_t((k + 1) % count)];
    gamma[std::size_t(k)] = -fp * fk * fn /
                            (std::sqrt(fp * fk * (fp + fk)) * std::sqrt(fk * fn * (fk + fn)));
  }
  return CovarianceSpec{std::move(gamma)};
}

Eigen::MatrixXd build_sigma(const CovarianceSpec& spec) {
  const int count = spec.count();
  if (count < 3) raise(Errc::invalid_argument, "need at least three coefficients");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(count, count);
  for (int k = 0; k < count; ++k) {
    // gamma_k couples rows k-1 and k, cyclically; the corner pair is gamma_1.
    const int row = (k + count - 1) % count;
    sigma(row, k) = spec.gamma[std::size_t(k)];
    sigma(k, row) = spec.gamma[std::size_t(k)];
  }
  return sigma;
}

DeterminantReport determinant(const CovarianceSpec& spec) {
  const int count = spec.count();
  std::vector<double> w(static_cast<std::size_t>(count));
  double product = 1.0;
  for (int k = 0; k < count; ++k) {
    w[std::size_t(k)] = -spec.gamma[std::size_t(k)] * spec.gamma[std::size_t(k)];
    product *= spec.gamma[std::size_t(k)];
  }
  // Independent sets of the cycle: vertex 0 excluded -> path 1..l-1,
  // vertex 0 included -> its weight times the path 2..l-2.
  const double cycle_sum = path_independent_sum(w, 1, count - 1) +
                           w[0] * path_independent_sum(w, 2, count - 2);
  const double sign = (count % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l-1}

  DeterminantReport report;
  report.value_expansion = cycle_sum + 2.0 * sign * product;
  report.value_lu = build_sigma(spec).fullPivLu().determinant();
  report.agreement = std::abs(report.value_expansion - report.value_lu) <=
                     1e-10 * std::max(1.0, std::abs(report.value_lu));
  return report;
}

NullVectorReport null_vector(const CovarianceSpec& spec) {
  const int count = spec.count();
  const auto solver = solve(spec);
  const auto& eigenvalues = solver.eigenvalues();
  int closest = 0;
  for (int i = 1; i < count; ++i)
    if (std::abs(eigenvalues(i)) < std::abs(eigenvalues(closest))) closest = i;

  Eigen::VectorXd v = solver.eigenvectors().col(closest);
  for (int i = 0; i < count; ++i) {
    if (std::abs(v(i)) <= 1e-12) continue;
    if (v(i) < 0) v = -v;
    break;
  }
  v.normalize();

  NullVectorReport report;
  report.zero_eigenvalue_residual = (build_sigma(spec) * v).norm();
  report.vector.assign(v.data(), v.data() + count);
  report.strictly_positive =
      std::all_of(report.vector.begin(), report.vector.end(),
                  [](double x) { return x > 1e-9; });

  report.p_sequence.resize(std::size_t(count) + 1);
  report.p_sequence[0] = 1.0;
  report.p_sequence[1] = 1.0 - spec.gamma[0] * spec.gamma[0];
  for (int k = 2; k <= count - 1; ++k)
    report.p_sequence[std::size_t(k)] =
        report.p_sequence[std::size_t(k - 1)] -
        spec.gamma[std::size_t(k - 1)] * spec.gamma[std::size_t(k - 1)] *
            report.p_sequence[std::size_t(k - 2)];
  double product = 1.0;
  for (double g : spec.gamma) product *= g;
  report.p_sequence[std::size_t(count)] = 2.0 * (count % 2 == 0 ? 1.0 : -1.0) * product;
  return report;
}

Eigen::MatrixXd gaussian_sample_root(const CovarianceSpec& spec) {
  const auto solver = solve(spec);
  const auto& eigenvalues = solver.eigenvalues();
  if (eigenvalues(0) < -kEigenClamp)
    raise(Errc::not_psd, "smallest eigenvalue " + std::to_string(eigenvalues(0)) +
                             " is below -1e-9");
  const int count = spec.count();
  Eigen::VectorXd scale(count);
  for (int i = 0; i < count; ++i) scale(i) = std::sqrt(std::max(0.0, eigenvalues(i)));
  return solver.eigenvectors() * scale.asDiagonal();
}

OrthantEstimate orthant_probability(const CovarianceSpec& spec, double threshold,
                                    std::uint64_t samples, std::uint64_t seed,
                                    int workers) {
  const int count = spec.count();
  if (samples < 1) raise(Errc::invalid_argument, "need at least one sample");
  if (workers < 1) raise(Errc::invalid_argument, "need at least one worker");
  const Eigen::MatrixXd root = gaussian_sample_root(spec);

  std::vector<std::uint64_t> hits(std::size_t(workers), 0);
  auto run = [&](int w) {
    const std::uint64_t share = samples / std::uint64_t(workers);
    const std::uint64_t extra = std::uint64_t(w) < samples % std::uint64_t(workers);
    std::uint64_t local_samples = share + extra;
    Rng rng(seed + std::uint64_t(w));
    std::vector<double> z(static_cast<std::size_t>(count));
    std::uint64_t local_hits = 0;
    for (std::uint64_t it = 0; it < local_samples; ++it) {
      for (int i = 0; i < count; i += 2) {
        double a, b;
        rng.next_normal_pair(a, b);
        z[std::size_t(i)] = a;
        if (i + 1 < count) z[std::size_t(i + 1)] = b;
      }
      bool inside = true;
      for (int i = 0; i < count && inside; ++i) {
        double x = 0;
        for (int j = 0; j < count; ++j) x += root(i, j) * z[std::size_t(j)];
        inside = x > threshold;
      }
      local_hits += inside;
    }
    hits[std::size_t(w)] = local_hits;
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  OrthantEstimate estimate;
  estimate.samples = samples;
  for (std::uint64_t h : hits) estimate.hits += h;
  estimate.estimate = double(estimate.hits) / double(samples);
  estimate.std_error =
      std::sqrt(estimate.estimate * (1.0 - estimate.estimate) / double(samples));
  estimate.threshold = threshold;
  estimate.seed = seed;
  estimate.workers = workers;
  estimate.rng = kRngAlgorithm;
  return estimate;
}

double gaussian_moment(const std::vector<double>& alpha, const CovarianceSpec& spec,
                       int s) {
  const int count = spec.count();
  if (int(alpha.size()) != count)
    raise(Errc::invalid_argument, "weight vector size must match the matrix");
  if (s < 0) raise(Errc::invalid_argument, "moment order must be nonnegative");
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(), count);
  const double quad = a.transpose() * build_sigma(spec) * a;
  if (quad <= 1e-12 * std::max(1.0, a.squaredNorm()))
    raise(Errc::degenerate_direction, "alpha^T Sigma alpha vanishes");
  if (s % 2 == 1) return 0.0;
  double moment = 1.0;
  for (int factor = s - 1; factor >= 1; factor -= 2) moment *= factor;
  return moment * std::pow(quad, s / 2);
}

}  // namespace dicelab

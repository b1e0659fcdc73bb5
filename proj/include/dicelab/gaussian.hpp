#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dicelab/errors.hpp"

namespace dicelab {

/// Cyclic coupling coefficients gamma_1..gamma_l of the structured
/// covariance matrix: unit diagonal, entries (k-1,k) = gamma_k, corner
/// (1,l) = gamma_1, zero elsewhere.
struct CovarianceSpec {
  std::vector<double> gamma;

  int count() const { return int(gamma.size()); }
};

/// Validates |gamma_k| <= 1 and l >= 3.
CovarianceSpec covariance_from_gamma(std::vector<double> gamma);

/// The coefficients induced by relative die sizes f_1..f_l in (0,1]:
/// gamma_k = -f_{k-1} f_k f_{k+1} /
///           (sqrt(f_{k-1} f_k (f_{k-1}+f_k)) sqrt(f_k f_{k+1} (f_k+f_{k+1}))),
/// all of them inside (-1,0). The resulting matrix is exactly singular.
CovarianceSpec structured_gamma(const std::vector<double>& f);

Eigen::MatrixXd build_sigma(const CovarianceSpec& spec);

/// Determinant along two routes: the cyclic expansion
/// 1 + 2(-1)^{l-1} gamma_1..gamma_l + sum over cyclically non-consecutive
/// index sets of (-1)^m gamma^2..., and a pivoted LU factorization.
struct DeterminantReport {
  double value_expansion = 0;
  double value_lu = 0;
  bool agreement = false;  // |difference| <= 1e-10 * max(1, |value_lu|)
};

DeterminantReport determinant(const CovarianceSpec& spec);

/// Eigenvector of the eigenvalue closest to zero, sign-normalized, together
/// with the P-sequence P_0 = 1, P_1 = 1 - gamma_1^2,
/// P_k = P_{k-1} - gamma_k^2 P_{k-2}, P_l = 2 (-1)^l gamma_1..gamma_l.
struct NullVectorReport {
  double zero_eigenvalue_residual = 0;  // ||Sigma v||
  std::vector<double> vector;           // unit norm, leading entry positive
  std::vector<double> p_sequence;       // P_0..P_l
  bool strictly_positive = false;       // all entries > 1e-9
};

NullVectorReport null_vector(const CovarianceSpec& spec);

struct OrthantEstimate {
  double estimate = 0;
  double std_error = 0;  // sqrt(estimate (1-estimate) / samples)
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double threshold = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  const char* rng = nullptr;
};

/// Square-root factor used by the sampler: U sqrt(Lambda) from the symmetric
/// eigendecomposition, eigenvalues in [-1e-9, 0) clamped to zero. A sample is
/// root * z with z standard normal. Raises NotPSD below the clamp window.
Eigen::MatrixXd gaussian_sample_root(const CovarianceSpec& spec);

/// Monte Carlo estimate of P(X_j > threshold for all j) where X is centered
/// Gaussian with the spec's matrix. Sampling goes through
/// gaussian_sample_root. Deterministic given (seed, workers).
OrthantEstimate orthant_probability(const CovarianceSpec& spec, double threshold,
                                    std::uint64_t samples, std::uint64_t seed,
                                    int workers = 1);

/// E[(alpha . X)^s] for the spec's Gaussian: 0 for odd s,
/// (alpha^T Sigma alpha)^{s/2} (s-1)!! for even s. Raises
/// DegenerateDirection when alpha^T Sigma alpha vanishes.
double gaussian_moment(const std::vector<double>& alpha, const CovarianceSpec& spec, int s);

}  // namespace dicelab

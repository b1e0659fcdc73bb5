#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dicelab/bigint.hpp"
#include "dicelab/errors.hpp"
#include "dicelab/word.hpp"

namespace dicelab {

/// Exact rational from decimal text ("0.25", "3", "2.5e-3") or a fraction
/// ("70/216").
BigRat parse_rational(std::string_view text);

enum class LawKind { finite, geometric, continuous };

/// A face distribution. Finite laws keep exact rational support and weights;
/// the geometric law keeps its exact parameter; the continuous law is the
/// symbolic no-atoms distribution (sampled as uniform on (0,1), since only
/// the relative order of faces ever matters).
class Law {
 public:
  static Law finite(std::vector<BigRat> values, std::vector<BigRat> weights);
  static Law geometric(const BigRat& p);
  static Law continuous();

  /// Text forms: `uniform`, `geometric:P`, `finite:v1=w1,v2=w2,...`.
  static Law parse(std::string_view text);

  LawKind kind() const { return kind_; }
  const std::vector<BigRat>& values() const { return values_; }
  const std::vector<BigRat>& weights() const { return weights_; }
  const BigRat& geometric_p() const { return p_; }

  std::string describe() const;

 private:
  Law() = default;
  LawKind kind_ = LawKind::continuous;
  std::vector<BigRat> values_;   // finite: strictly increasing
  std::vector<BigRat> weights_;  // finite: positive, normalized to unit mass
  BigRat p_ = 0;                 // geometric parameter
};

/// Win/tie probabilities of single faces for an ordered pair of laws:
/// p = P(X > Y), q = P(X1 > Y, X2 > Y), r = P(X > Y1, X > Y2) and the
/// tie analogues. `exact` marks values obtained by rational arithmetic or a
/// closed form; truncated mixed-law evaluations carry certified absolute
/// error below 1e-12 and clear the flag.
struct PairCoefficients {
  BigRat p, q, r;
  BigRat p_eq, q_eq, r_eq;
  bool exact = true;
};

/// s = P(X > Y > Z) and s_eq = P(X = Y = Z) for three independent faces.
struct TripleCoefficients {
  BigRat s, s_eq;
  bool exact = true;
};

/// The per-index octet for a cyclic collection of laws: entry k couples law
/// k with law k+1 (and s_k reaches back to law k-1), indices mod l.
struct CoefficientSet {
  std::vector<PairCoefficients> pair;    // index k: (L^k, L^{k+1})
  std::vector<TripleCoefficients> triple;  // index k: (L^{k-1}, L^k, L^{k+1})
};

/// A collection of random dice: die k has n_k = round(f_k * m) faces drawn
/// i.i.d. from laws[k].
struct ModelConfig {
  double m = 0;
  std::vector<double> f;     // relative sizes in (0,1]
  std::vector<int> faces;    // realized n_k, always >= 1
  std::vector<Law> laws;

  int count() const { return int(laws.size()); }

  /// f_k = n_k / max(n); m = max(n).
  static ModelConfig from_faces(std::vector<int> faces, std::vector<Law> laws);
  /// n_k = round(f_k * m), half up.
  static ModelConfig from_fractions(double m, std::vector<double> f, std::vector<Law> laws);
};

/// Exact first and second moments of the victory counts N_k and tie counts
/// E_k, plus the model coefficients sigma_k and gamma_k evaluated with the
/// config's f values.
struct MomentEntry {
  BigRat mean_n, var_n, cov_prev_n;  // cov of (N_{k-1}, N_k)
  BigRat mean_e, var_e;
  double sigma = 0;
  double gamma = 0;
  bool exact = true;
};

struct MomentReport {
  std::vector<MomentEntry> entries;
};

PairCoefficients pairwise_coefficients(const Law& a, const Law& b);
TripleCoefficients triple_s(const Law& prev, const Law& mid, const Law& next);

/// The full octet for every cyclic index of the collection.
CoefficientSet coefficient_set(const std::vector<Law>& laws);

MomentReport model_moments(const ModelConfig& config);

/// Per die, the finite law uniform over its face multiset.
std::vector<Law> blow_up_laws(const DiceCollection& dice);

/// For every index with p_k exactly 1/2, reports q_k + r_k and verifies it
/// exceeds 2/3. Requires equal die sizes and no tied faces anywhere.
struct BlowupConstraintReport {
  std::vector<int> p_half_indices;
  std::vector<BigRat> q_plus_r;
  bool all_exceed_two_thirds = true;
};

BlowupConstraintReport check_blowup_constraint(const DiceCollection& dice);

}  // namespace dicelab

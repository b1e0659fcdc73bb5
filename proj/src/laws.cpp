#include "dicelab/laws.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace dicelab {

namespace {

constexpr double kTruncationTail = 1e-15;

BigInt pow10(std::size_t digits) {
  BigInt v = 1;
  for (std::size_t i = 0; i < digits; ++i) v *= 10;
  return v;
}

// ---------------------------------------------------------------------------
// Exact tables for finite laws: sorted support, weights, prefix mass.

struct RatTable {
  std::vector<BigRat> values;
  std::vector<BigRat> weights;
  std::vector<BigRat> prefix;  // prefix[i] = mass strictly below values[i]

  explicit RatTable(const Law& law) : values(law.values()), weights(law.weights()) {
    prefix.resize(values.size());
    BigRat acc = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      prefix[i] = acc;
      acc += weights[i];
    }
  }

  BigRat less(const BigRat& v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    std::size_t idx = std::size_t(it - values.begin());
    if (idx == values.size()) return BigRat(1);
    return prefix[idx] + (values[idx] < v ? weights[idx] : BigRat(0));
  }

  BigRat at(const BigRat& v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || *it != v) return BigRat(0);
    return weights[std::size_t(it - values.begin())];
  }

  BigRat greater(const BigRat& v) const { return BigRat(1) - less(v) - at(v); }
};

// Double-precision tables used when a geometric law has to be truncated;
// the dropped tail is below kTruncationTail per law.

struct DoubleTable {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<double> prefix;

  static DoubleTable from(const Law& law) {
    DoubleTable t;
    if (law.kind() == LawKind::finite) {
      for (const auto& v : law.values()) t.values.push_back(to_double(v));
      for (const auto& w : law.weights()) t.weights.push_back(to_double(w));
    } else {
      const double p = to_double(law.geometric_p());
      const int terms = int(std::ceil(std::log(kTruncationTail) / std::log1p(-p))) + 1;
      double mass = p;
      for (int i = 1; i <= terms; ++i) {
        t.values.push_back(double(i));
        t.weights.push_back(mass);
        mass *= (1.0 - p);
      }
    }
    t.prefix.resize(t.values.size());
    double acc = 0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      t.prefix[i] = acc;
      acc += t.weights[i];
    }
    return t;
  }

  double less(double v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    std::size_t idx = std::size_t(it - values.begin());
    if (idx == values.size()) return 1.0;
    return prefix[idx] + (values[idx] < v ? weights[idx] : 0.0);
  }

  double at(double v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || *it != v) return 0.0;
    return weights[std::size_t(it - values.begin())];
  }

  double greater(double v) const { return std::max(0.0, 1.0 - less(v) - at(v)); }
};

bool truncation_needed(const Law& a, const Law& b) {
  if (a.kind() == LawKind::finite && b.kind() == LawKind::finite) return false;
  if (a.kind() == LawKind::geometric && b.kind() == LawKind::geometric &&
      a.geometric_p() == b.geometric_p())
    return false;
  return true;
}

PairCoefficients pair_from_tables(const RatTable& ta, const RatTable& tb) {
  PairCoefficients c;
  c.p = c.q = c.r = c.p_eq = c.q_eq = c.r_eq = BigRat(0);
  for (std::size_t i = 0; i < ta.values.size(); ++i) {
    const BigRat lt = tb.less(ta.values[i]);
    const BigRat eq = tb.at(ta.values[i]);
    c.p += ta.weights[i] * lt;
    c.r += ta.weights[i] * lt * lt;
    c.p_eq += ta.weights[i] * eq;
    c.r_eq += ta.weights[i] * eq * eq;
  }
  for (std::size_t j = 0; j < tb.values.size(); ++j) {
    const BigRat gt = ta.greater(tb.values[j]);
    const BigRat eq = ta.at(tb.values[j]);
    c.q += tb.weights[j] * gt * gt;
    c.q_eq += tb.weights[j] * eq * eq;
  }
  c.exact = true;
  return c;
}

PairCoefficients pair_from_tables(const DoubleTable& ta, const DoubleTable& tb) {
  double p = 0, q = 0, r = 0, peq = 0, qeq = 0, req = 0;
  for (std::size_t i = 0; i < ta.values.size(); ++i) {
    const double lt = tb.less(ta.values[i]);
    const double eq = tb.at(ta.values[i]);
    p += ta.weights[i] * lt;
    r += ta.weights[i] * lt * lt;
    peq += ta.weights[i] * eq;
    req += ta.weights[i] * eq * eq;
  }
  for (std::size_t j = 0; j < tb.values.size(); ++j) {
    const double gt = ta.greater(tb.values[j]);
    const double eq = ta.at(tb.values[j]);
    q += tb.weights[j] * gt * gt;
    qeq += tb.weights[j] * eq * eq;
  }
  PairCoefficients c;
  c.p = BigRat(p);
  c.q = BigRat(q);
  c.r = BigRat(r);
  c.p_eq = BigRat(peq);
  c.q_eq = BigRat(qeq);
  c.r_eq = BigRat(req);
  c.exact = false;
  return c;
}

}  // namespace

BigRat parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) raise(Errc::invalid_argument, "empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num, den;
    if (!parse_decimal(s.substr(0, slash), num) || !parse_decimal(s.substr(slash + 1), den))
      raise(Errc::invalid_argument, "bad fraction: " + s);
    if (den == 0) raise(Errc::invalid_argument, "zero denominator: " + s);
    return BigRat(num, den);
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  std::int64_t scale = 0;  // decimal digits after the point
  bool seen_point = false, seen_digit = false;
  std::int64_t exponent = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      try {
        exponent = std::stoll(s.substr(pos + 1));
      } catch (const std::exception&) {
        raise(Errc::invalid_argument, "bad exponent: " + s);
      }
      break;
    } else {
      raise(Errc::invalid_argument, "bad number: " + s);
    }
  }
  if (!seen_digit) raise(Errc::invalid_argument, "bad number: " + s);
  BigInt mantissa;
  parse_decimal(digits.empty() ? "0" : digits, mantissa);
  if (negative) mantissa = -mantissa;
  BigRat value(mantissa);
  std::int64_t shift = exponent - scale;
  if (shift > 0)
    value *= BigRat(pow10(std::size_t(shift)));
  else if (shift < 0)
    value /= BigRat(pow10(std::size_t(-shift)));
  return value;
}

Law Law::finite(std::vector<BigRat> values, std::vector<BigRat> weights) {
  if (values.empty() || values.size() != weights.size())
    raise(Errc::invalid_argument, "finite law needs matching nonempty support and weights");
  std::vector<std::pair<BigRat, BigRat>> entries;
  entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] <= 0) raise(Errc::invalid_argument, "finite law weights must be positive");
    entries.emplace_back(values[i], weights[i]);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Law law;
  law.kind_ = LawKind::finite;
  for (auto& [v, w] : entries) {
    if (!law.values_.empty() && law.values_.back() == v)
      law.weights_.back() += w;
    else {
      law.values_.push_back(v);
      law.weights_.push_back(w);
    }
  }
  BigRat total = 0;
  for (const auto& w : law.weights_) total += w;
  if (std::abs(to_double(total) - 1.0) > 1e-12)
    raise(Errc::invalid_argument, "finite law weights must sum to 1");
  if (total != 1)
    for (auto& w : law.weights_) w /= total;
  return law;
}

Law Law::geometric(const BigRat& p) {
  if (p <= 0 || p >= 1)
    raise(Errc::invalid_fraction, "geometric parameter must lie strictly in (0,1)");
  Law law;
  law.kind_ = LawKind::geometric;
  law.p_ = p;
  return law;
}

Law Law::continuous() {
  Law law;
  law.kind_ = LawKind::continuous;
  return law;
}

Law Law::parse(std::string_view text) {
  if (text == "uniform") return continuous();
  constexpr std::string_view kGeometric = "geometric:";
  constexpr std::string_view kFinite = "finite:";
  if (text.substr(0, kGeometric.size()) == kGeometric)
    return geometric(parse_rational(text.substr(kGeometric.size())));
  if (text.substr(0, kFinite.size()) == kFinite) {
    std::vector<BigRat> values, weights;
    std::istringstream in{std::string(text.substr(kFinite.size()))};
    std::string item;
    while (std::getline(in, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        raise(Errc::invalid_argument, "finite law entries look like value=weight: " + item);
      values.push_back(parse_rational(item.substr(0, eq)));
      weights.push_back(parse_rational(item.substr(eq + 1)));
    }
    return finite(std::move(values), std::move(weights));
  }
  raise(Errc::invalid_argument, "unknown law: " + std::string(text));
}

std::string Law::describe() const {
  auto fmt = [](const BigRat& v) {
    if (boost::multiprecision::denominator(v) == 1)
      return boost::multiprecision::numerator(v).str();
    return v.str();
  };
  switch (kind_) {
    case LawKind::continuous: return "uniform";
    case LawKind::geometric: return "geometric:" + fmt(p_);
    case LawKind::finite: {
      std::string out = "finite:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ',';
        out += fmt(values_[i]) + "=" + fmt(weights_[i]);
      }
      return out;
    }
  }
  return "";
}

PairCoefficients pairwise_coefficients(const Law& a, const Law& b) {
  const bool a_cont = a.kind() == LawKind::continuous;
  const bool b_cont = b.kind() == LawKind::continuous;
  if (a_cont && b_cont) {
    PairCoefficients c;
    c.p = BigRat(1, 2);
    c.q = c.r = BigRat(1, 3);
    c.p_eq = c.q_eq = c.r_eq = BigRat(0);
    return c;
  }
  if (a_cont || b_cont)
    raise(Errc::unsupported_pair,
          "the symbolic continuous law combines only with itself");
  if (a.kind() == LawKind::geometric && b.kind() == LawKind::geometric &&
      a.geometric_p() == b.geometric_p()) {
    const BigRat p = a.geometric_p();
    const BigRat u = 1 - p;
    const BigRat d2 = 2 - p;            // 1 + u
    const BigRat d3 = 3 - 3 * p + p * p;  // 1 + u + u^2
    PairCoefficients c;
    c.p = u / d2;
    c.q = u * u / d3;
    c.r = u * (2 - 2 * p + p * p) / (d2 * d3);
    c.p_eq = p / d2;
    c.q_eq = p * p / d3;
    c.r_eq = p * p / d3;
    return c;
  }
  if (!truncation_needed(a, b)) return pair_from_tables(RatTable(a), RatTable(b));
  return pair_from_tables(DoubleTable::from(a), DoubleTable::from(b));
}

TripleCoefficients triple_s(const Law& prev, const Law& mid, const Law& next) {
  const int continuous_count = (prev.kind() == LawKind::continuous) +
                               (mid.kind() == LawKind::continuous) +
                               (next.kind() == LawKind::continuous);
  if (continuous_count == 3) {
    TripleCoefficients t;
    t.s = BigRat(1, 6);
    t.s_eq = BigRat(0);
    return t;
  }
  if (continuous_count > 0)
    raise(Errc::unsupported_pair,
          "the symbolic continuous law combines only with itself");
  const bool all_geometric_same =
      prev.kind() == LawKind::geometric && mid.kind() == LawKind::geometric &&
      next.kind() == LawKind::geometric && prev.geometric_p() == mid.geometric_p() &&
      mid.geometric_p() == next.geometric_p();
  if (all_geometric_same) {
    const BigRat p = mid.geometric_p();
    const BigRat u = 1 - p;
    TripleCoefficients t;
    t.s = u * u * u / ((2 - p) * (3 - 3 * p + p * p));
    t.s_eq = p * p / (3 - 3 * p + p * p);
    return t;
  }
  const bool all_finite = prev.kind() == LawKind::finite && mid.kind() == LawKind::finite &&
                          next.kind() == LawKind::finite;
  TripleCoefficients t;
  if (all_finite) {
    RatTable tp(prev), tm(mid), tn(next);
    t.s = t.s_eq = BigRat(0);
    for (std::size_t j = 0; j < tm.values.size(); ++j) {
      t.s += tm.weights[j] * tp.greater(tm.values[j]) * tn.less(tm.values[j]);
      t.s_eq += tm.weights[j] * tp.at(tm.values[j]) * tn.at(tm.values[j]);
    }
    return t;
  }
  auto tp = DoubleTable::from(prev);
  auto tm = DoubleTable::from(mid);
  auto tn = DoubleTable::from(next);
  double s = 0, s_eq = 0;
  for (std::size_t j = 0; j < tm.values.size(); ++j) {
    s += tm.weights[j] * tp.greater(tm.values[j]) * tn.less(tm.values[j]);
    s_eq += tm.weights[j] * tp.at(tm.values[j]) * tn.at(tm.values[j]);
  }
  t.s = BigRat(s);
  t.s_eq = BigRat(s_eq);
  t.exact = false;
  return t;
}

CoefficientSet coefficient_set(const std::vector<Law>& laws) {
  const int count = int(laws.size());
  if (count < 2) raise(Errc::invalid_argument, "need at least two laws");
  CoefficientSet set;
  for (int k = 0; k < count; ++k) {
    const int prev = (k + count - 1) % count;
    const int next = (k + 1) % count;
    set.pair.push_back(pairwise_coefficients(laws[std::size_t(k)], laws[std::size_t(next)]));
    set.triple.push_back(
        triple_s(laws[std::size_t(prev)], laws[std::size_t(k)], laws[std::size_t(next)]));
  }
  return set;
}

ModelConfig ModelConfig::from_faces(std::vector<int> faces, std::vector<Law> laws) {
  if (faces.size() != laws.size() || laws.empty())
    raise(Errc::invalid_argument, "face counts and laws must align");
  ModelConfig config;
  int max_faces = 0;
  for (int n : faces) {
    if (n < 1) raise(Errc::invalid_argument, "every die needs at least one face");
    max_faces = std::max(max_faces, n);
  }
  config.m = double(max_faces);
  for (int n : faces) config.f.push_back(double(n) / double(max_faces));
  config.faces = std::move(faces);
  config.laws = std::move(laws);
  return config;
}

ModelConfig ModelConfig::from_fractions(double m, std::vector<double> f,
                                        std::vector<Law> laws) {
  if (f.size() != laws.size() || laws.empty())
    raise(Errc::invalid_argument, "fractions and laws must align");
  if (!(m > 0)) raise(Errc::invalid_argument, "scale must be positive");
  ModelConfig config;
  config.m = m;
  for (double fk : f) {
    if (!(fk > 0.0) || fk > 1.0)
      raise(Errc::invalid_fraction, "fractions must lie in (0,1]");
    const int n = int(std::floor(fk * m + 0.5));  // half up
    if (n < 1) raise(Errc::invalid_argument, "fraction too small: die would be empty");
    config.faces.push_back(n);
  }
  config.f = std::move(f);
  config.laws = std::move(laws);
  return config;
}

MomentReport model_moments(const ModelConfig& config) {
  const int count = config.count();
  if (count < 2) raise(Errc::invalid_argument, "need at least two dice");
  const auto coeffs = coefficient_set(config.laws);

  // sigma_k^2 = f_k f_{k+1} (f_k (q_k - p_k^2) + f_{k+1} (r_k - p_k^2))
  std::vector<double> sigma(std::size_t(count), 0.0);
  for (int k = 0; k < count; ++k) {
    const auto& c = coeffs.pair[std::size_t(k)];
    const double fk = config.f[std::size_t(k)];
    const double fn = config.f[std::size_t((k + 1) % count)];
    const double qc = to_double(c.q - c.p * c.p);
    const double rc = to_double(c.r - c.p * c.p);
    sigma[std::size_t(k)] = std::sqrt(std::max(0.0, fk * fn * (fk * qc + fn * rc)));
  }

  MomentReport report;
  for (int k = 0; k < count; ++k) {
    const int prev = (k + count - 1) % count;
    const int next = (k + 1) % count;
    const auto& c = coeffs.pair[std::size_t(k)];
    const auto& cp = coeffs.pair[std::size_t(prev)];
    const auto& t = coeffs.triple[std::size_t(k)];
    const BigRat nk = config.faces[std::size_t(k)];
    const BigRat nn = config.faces[std::size_t(next)];
    const BigRat np = config.faces[std::size_t(prev)];

    MomentEntry entry;
    entry.mean_n = nk * nn * c.p;
    entry.var_n = nk * nn *
                  (nk * (c.q - c.p * c.p) + nn * (c.r - c.p * c.p) + c.p * c.p + c.p -
                   c.q - c.r);
    entry.cov_prev_n = np * nk * nn * (t.s - cp.p * c.p);
    entry.mean_e = nk * nn * c.p_eq;
    entry.var_e = nk * nn *
                  (nk * (c.q_eq - c.p_eq * c.p_eq) + nn * (c.r_eq - c.p_eq * c.p_eq) +
                   c.p_eq * c.p_eq + c.p_eq - c.q_eq - c.r_eq);
    entry.sigma = sigma[std::size_t(k)];
    const double denom = sigma[std::size_t(prev)] * sigma[std::size_t(k)];
    const double numer = config.f[std::size_t(prev)] * config.f[std::size_t(k)] *
                         config.f[std::size_t(next)] * to_double(t.s - cp.p * c.p);
    entry.gamma = denom > 0.0 ? numer / denom : 0.0;
    entry.exact = c.exact && cp.exact && t.exact;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::vector<Law> blow_up_laws(const DiceCollection& dice) {
  std::vector<Law> laws;
  laws.reserve(dice.count());
  for (const auto& die : dice.dice) {
    std::map<std::int64_t, int> multiplicity;
    for (std::int64_t face : die) multiplicity[face] += 1;
    std::vector<BigRat> values, weights;
    for (const auto& [value, count] : multiplicity) {
      values.push_back(BigRat(value));
      weights.push_back(BigRat(count, std::int64_t(die.size())));
    }
    laws.push_back(Law::finite(std::move(values), std::move(weights)));
  }
  return laws;
}

BlowupConstraintReport check_blowup_constraint(const DiceCollection& dice) {
  const int count = int(dice.count());
  for (const auto& die : dice.dice)
    if (die.size() != dice.dice.front().size())
      raise(Errc::invalid_argument, "the blow-up check needs equal die sizes");
  std::vector<std::int64_t> all;
  for (const auto& die : dice.dice) all.insert(all.end(), die.begin(), die.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    raise(Errc::ties_present, "tied faces are not allowed in the blow-up check");

  const auto laws = blow_up_laws(dice);
  BlowupConstraintReport report;
  const BigRat half(1, 2), two_thirds(2, 3);
  for (int k = 0; k < count; ++k) {
    const auto c =
        pairwise_coefficients(laws[std::size_t(k)], laws[std::size_t((k + 1) % count)]);
    if (c.p != half) continue;
    report.p_half_indices.push_back(k);
    report.q_plus_r.push_back(c.q + c.r);
    if (c.q + c.r <= two_thirds) report.all_exceed_two_thirds = false;
  }
  return report;
}

}  // namespace dicelab

#pragma once

// Chi-square goodness of fit with adjacent-class pooling.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/stats/frequency.hpp"

namespace ragalab {

// Regularized upper incomplete gamma Q(a, x): power series for P when
// x < a + 1, modified Lentz continued fraction for Q otherwise.
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ValidationError("regularized_gamma_q: a must be positive");
  if (x < 0.0) throw ValidationError("regularized_gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);

  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * kEps) return 1.0 - sum * std::exp(log_prefactor);
    }
    throw NumericError("regularized_gamma_q: series did not converge");
  }

  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return std::exp(log_prefactor) * h;
  }
  throw NumericError("regularized_gamma_q: continued fraction did not converge");
}

// Upper-tail probability of the chi-square distribution.
inline double chi_square_pvalue(double statistic, int df) {
  if (df < 1) throw ValidationError("chi_square_pvalue: df must be positive");
  if (!(statistic >= 0.0)) throw ValidationError("chi_square_pvalue: statistic must be non-negative");
  return regularized_gamma_q(0.5 * df, 0.5 * statistic);
}

// Ordered partition of class indices into contiguous blocks, stored as
// inclusive [first, last] index pairs (0-based).
struct PoolingSpec {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;

  static PoolingSpec singletons(std::size_t k) {
    PoolingSpec p;
    for (std::size_t i = 0; i < k; ++i) p.blocks.emplace_back(i, i);
    return p;
  }

  void validate(std::size_t k) const {
    std::size_t next = 0;
    for (const auto& [first, last] : blocks) {
      if (first != next || last < first) throw ValidationError("pooling: blocks must be contiguous and cover all classes in order");
      next = last + 1;
    }
    if (next != k) throw ValidationError("pooling: blocks cover " + std::to_string(next) + " of " + std::to_string(k) + " classes");
  }

  std::vector<double> pool(const std::vector<double>& values) const {
    std::vector<double> out;
    for (const auto& [first, last] : blocks) {
      double s = 0.0;
      for (std::size_t i = first; i <= last; ++i) s += values[i];
      out.push_back(s);
    }
    return out;
  }

  // 1-based block list, e.g. "1;2;3;4-7".
  std::string to_string() const {
    std::string s;
    for (const auto& [first, last] : blocks) {
      if (!s.empty()) s += ';';
      s += std::to_string(first + 1);
      if (last != first) s += "-" + std::to_string(last + 1);
    }
    return s;
  }
};

// Parses a 1-based block list like "1;2;3;4-7" for k classes.
inline PoolingSpec parse_pooling(std::string_view text, std::size_t k) {
  PoolingSpec spec;
  for (const auto part : detail::split(text, ';')) {
    const auto range = detail::split(part, '-');
    if (range.size() > 2) throw InputError("pooling block '" + std::string(part) + "' is malformed");
    const auto first = detail::parse_int(range[0]);
    const auto last = range.size() == 2 ? detail::parse_int(range[1]) : first;
    if (!first || !last || *first < 1 || *last < *first)
      throw InputError("pooling block '" + std::string(part) + "' is malformed");
    spec.blocks.emplace_back(static_cast<std::size_t>(*first - 1), static_cast<std::size_t>(*last - 1));
  }
  spec.validate(k);
  return spec;
}

inline constexpr double kDefaultMinExpected = 5.0;

// Contiguous pooling with the most blocks such that every pooled expected
// count reaches min_expected. Ties go to the lexicographically smallest
// sequence of cut positions.
inline PoolingSpec auto_pool(const std::vector<double>& expected, double min_expected = kDefaultMinExpected) {
  constexpr double kSlack = 1e-9;
  const std::size_t k = expected.size();
  double total = 0.0;
  for (const auto e : expected) total += e;
  if (k == 0 || total < min_expected - kSlack)
    throw ValidationError("auto_pool: total expected " + detail::format_g(total, 6) + " is below the floor " +
                          detail::format_g(min_expected, 6));

  // best[i]: most blocks for a feasible partition of expected[i..k), -1 if none
  std::vector<int> best(k + 1, -1);
  best[k] = 0;
  for (std::size_t i = k; i-- > 0;) {
    double sum = 0.0;
    for (std::size_t j = i; j < k; ++j) {
      sum += expected[j];
      if (sum >= min_expected - kSlack && best[j + 1] >= 0) best[i] = std::max(best[i], best[j + 1] + 1);
    }
  }

  PoolingSpec spec;
  std::size_t i = 0;
  while (i < k) {
    double sum = 0.0;
    for (std::size_t j = i; j < k; ++j) {
      sum += expected[j];
      if (sum >= min_expected - kSlack && best[j + 1] >= 0 && best[j + 1] == best[i] - 1) {
        spec.blocks.emplace_back(i, j);
        i = j + 1;
        break;
      }
    }
  }
  return spec;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  PoolingSpec pooling;
  std::vector<double> observed;  // pooled
  std::vector<double> expected;  // pooled

  bool significant(double alpha = 0.05) const noexcept { return p_value < alpha; }
};

inline ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                                      const PoolingSpec& pooling) {
  if (observed.size() != expected.size())
    throw ValidationError("chi_square_gof: observed and expected differ in length");
  pooling.validate(observed.size());
  if (pooling.blocks.size() < 2) throw ValidationError("chi_square_gof: need at least two classes after pooling");

  ChiSquareResult r;
  r.pooling = pooling;
  r.observed = pooling.pool(observed);
  r.expected = pooling.pool(expected);
  for (std::size_t b = 0; b < r.observed.size(); ++b) {
    if (!(r.expected[b] > 0.0)) throw ValidationError("chi_square_gof: pooled expected count is zero");
    const double diff = r.observed[b] - r.expected[b];
    r.statistic += diff * diff / r.expected[b];
  }
  r.df = static_cast<int>(pooling.blocks.size()) - 1;
  r.p_value = chi_square_pvalue(r.statistic, r.df);
  return r;
}

inline ChiSquareResult chi_square_gof(const FrequencyTable& observed, const std::vector<double>& expected,
                                      const PoolingSpec& pooling) {
  std::vector<double> obs(observed.counts.begin(), observed.counts.end());
  return chi_square_gof(obs, expected, pooling);
}

}  // namespace ragalab

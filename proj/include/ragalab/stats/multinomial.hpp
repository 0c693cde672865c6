#pragma once

// Multinomial law: pmf and first/second moments.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/stats/frequency.hpp"

namespace ragalab {

struct MultinomialModel {
  long long n = 0;
  std::vector<double> p;

  MultinomialModel() = default;
  MultinomialModel(long long trials, std::vector<double> probs) : n(trials), p(std::move(probs)) {
    if (n < 0) throw ValidationError("multinomial: n must be non-negative");
    if (p.empty()) throw ValidationError("multinomial: empty probability vector");
    double sum = 0.0;
    for (const auto q : p) {
      if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("multinomial: probabilities must lie in [0, 1]");
      sum += q;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ValidationError("multinomial: probabilities must sum to 1");
  }

  std::size_t k() const noexcept { return p.size(); }

  // Model with n = table total and p = relative frequencies.
  static MultinomialModel from_table(const FrequencyTable& t) { return {t.total, relative(t)}; }
};

inline double multinomial_log_pmf(const MultinomialModel& model, const std::vector<long long>& x) {
  if (x.size() != model.k()) throw ValidationError("multinomial_pmf: dimension mismatch");
  long long sum = 0;
  for (const auto v : x) {
    if (v < 0) throw ValidationError("multinomial_pmf: negative count");
    sum += v;
  }
  if (sum != model.n) throw ValidationError("multinomial_pmf: counts must sum to n");

  double log_p = std::lgamma(static_cast<double>(model.n) + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;  // p^0 = 1, including p = 0
    if (model.p[i] == 0.0) return -std::numeric_limits<double>::infinity();
    const double xi = static_cast<double>(x[i]);
    log_p += xi * std::log(model.p[i]) - std::lgamma(xi + 1.0);
  }
  return log_p;
}

inline double multinomial_pmf(const MultinomialModel& model, const std::vector<long long>& x) {
  return std::exp(multinomial_log_pmf(model, x));
}

struct MultinomialMoments {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<std::vector<double>> covariance;
  // Absent where a variance is zero (p in {0, 1}).
  std::vector<std::vector<std::optional<double>>> correlation;
};

inline MultinomialMoments multinomial_moments(const MultinomialModel& model) {
  const std::size_t k = model.k();
  const double n = static_cast<double>(model.n);
  MultinomialMoments m;
  m.covariance.assign(k, std::vector<double>(k, 0.0));
  m.correlation.assign(k, std::vector<std::optional<double>>(k));
  for (std::size_t i = 0; i < k; ++i) {
    m.mean.push_back(n * model.p[i]);
    m.variance.push_back(n * model.p[i] * (1.0 - model.p[i]));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      m.covariance[i][j] = i == j ? m.variance[i] : -n * model.p[i] * model.p[j];
      if (m.variance[i] > 0.0 && m.variance[j] > 0.0)
        m.correlation[i][j] = i == j ? 1.0 : m.covariance[i][j] / std::sqrt(m.variance[i] * m.variance[j]);
    }
  }
  return m;
}

}  // namespace ragalab

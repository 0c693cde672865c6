#pragma once

// Wald-Wolfowitz style runs test about the median.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ragalab/error.hpp"

namespace ragalab {

// What to do with observations equal to the median.
enum class TiePolicy { AssignL, AssignM, Drop };

struct RunTestResult {
  std::size_t n = 0;
  std::size_t runs = 0;  // U
  double expected_runs = 0.0;
  double variance_runs = 0.0;
  double z = 0.0;
  double median = 0.0;
  std::string letters;  // L/M labelling actually used

  bool significant() const noexcept { return std::fabs(z) >= 1.96; }
};

// E(U), Var(U) and Z for n observations with U runs.
inline RunTestResult run_statistics(std::size_t n, std::size_t runs) {
  if (n < 3) throw ValidationError("run_test: need at least 3 labelled observations");
  if (runs < 1 || runs > n) throw ValidationError("run_test: run count must be in [1, n]");
  const double nn = static_cast<double>(n);
  RunTestResult r;
  r.n = n;
  r.runs = runs;
  r.expected_runs = (nn + 2.0) / 2.0;
  r.variance_runs = (nn / 4.0) * ((nn - 2.0) / (nn - 1.0));
  r.z = (static_cast<double>(runs) - r.expected_runs) / std::sqrt(r.variance_runs);
  return r;
}

inline std::size_t count_runs(std::string_view letters) {
  if (letters.empty()) return 0;
  std::size_t runs = 1;
  for (std::size_t i = 1; i < letters.size(); ++i) runs += letters[i] != letters[i - 1] ? 1 : 0;
  return runs;
}

inline RunTestResult run_test_letters(std::string_view letters) {
  for (const char c : letters)
    if (c != 'L' && c != 'M') throw ValidationError("run_test: letters must be L or M");
  auto r = run_statistics(letters.size(), count_runs(letters));
  r.letters = std::string(letters);
  return r;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Labels each observation L (below the median) or M (above), ties per
// policy, in arrival order, and counts the runs.
template <typename T>
RunTestResult run_test(const std::vector<T>& observations, TiePolicy ties = TiePolicy::AssignL) {
  if (observations.size() < 2) throw ValidationError("run_test: need at least 2 observations");
  std::vector<double> values(observations.begin(), observations.end());
  const double median = median_of(values);
  std::string letters;
  for (const double v : values) {
    if (v < median) {
      letters += 'L';
    } else if (v > median) {
      letters += 'M';
    } else if (ties == TiePolicy::AssignL) {
      letters += 'L';
    } else if (ties == TiePolicy::AssignM) {
      letters += 'M';
    }
  }
  if (letters.size() < 2) throw ValidationError("run_test: degenerate sequence after dropping ties");
  auto r = run_test_letters(letters);
  r.median = median;
  return r;
}

}  // namespace ragalab

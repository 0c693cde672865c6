#pragma once

// Least-squares polynomial fitting.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ragalab/error.hpp"

namespace ragalab {

struct PolyFit {
  int degree = 0;
  std::vector<double> coefficients;  // ascending powers of x
  double r2 = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;

  double operator()(double x) const {
    double y = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + *it;
    return y;
  }
};

namespace detail {

// Solves the symmetric system a * x = b in place by Gaussian elimination
// with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-13) throw NumericError("polyfit: normal equations are singular");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

// Normal equations are formed on u = (x - center) / scale; the result is
// converted back to coefficients in x.
inline PolyFit polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
  if (degree < 0) throw ValidationError("polyfit: degree must be non-negative");
  if (xs.size() != ys.size()) throw ValidationError("polyfit: xs and ys differ in length");
  std::vector<double> distinct(xs);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < static_cast<std::size_t>(degree) + 1)
    throw ValidationError("polyfit: need at least degree + 1 distinct abscissae");

  const std::size_t terms = static_cast<std::size_t>(degree) + 1;
  double center = 0.0;
  for (const auto x : xs) center += x;
  center /= static_cast<double>(xs.size());
  double scale = 0.0;
  for (const auto x : xs) scale = std::max(scale, std::fabs(x - center));
  if (scale == 0.0) scale = 1.0;

  std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0.0));
  std::vector<double> aty(terms, 0.0);
  std::vector<double> powers(2 * terms - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (xs[i] - center) / scale;
    powers[0] = 1.0;
    for (std::size_t p = 1; p < powers.size(); ++p) powers[p] = powers[p - 1] * u;
    for (std::size_t r = 0; r < terms; ++r) {
      aty[r] += powers[r] * ys[i];
      for (std::size_t c = 0; c < terms; ++c) ata[r][c] += powers[r + c];
    }
  }
  const auto b = detail::solve_dense(std::move(ata), std::move(aty));

  // sum_j b_j ((x - c)/s)^j expanded by the binomial theorem
  PolyFit fit;
  fit.degree = degree;
  fit.coefficients.assign(terms, 0.0);
  for (std::size_t j = 0; j < terms; ++j) {
    const double bj = b[j] / std::pow(scale, static_cast<double>(j));
    double binom = 1.0;
    for (std::size_t i = 0; i <= j; ++i) {
      fit.coefficients[i] += bj * binom * std::pow(-center, static_cast<double>(j - i));
      binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
    }
  }

  double mean_y = 0.0;
  for (const auto y : ys) mean_y += y;
  mean_y /= static_cast<double>(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // residuals from the centered form, which is better conditioned
    const double u = (xs[i] - center) / scale;
    double pred = 0.0;
    for (std::size_t j = terms; j-- > 0;) pred = pred * u + b[j];
    fit.ss_res += (ys[i] - pred) * (ys[i] - pred);
    fit.ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (fit.ss_tot > 0.0) {
    fit.r2 = 1.0 - fit.ss_res / fit.ss_tot;
  } else {
    fit.r2 = fit.ss_res <= 1e-12 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace ragalab

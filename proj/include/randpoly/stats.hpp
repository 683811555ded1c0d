#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "randpoly/types.hpp"

namespace randpoly::stats {

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double ci_half_width = 0.0;  // normal 95% for the mean
  double variance_se = 0.0;  // standard error of the variance estimate
};

/// Two-pass mean/variance. The variance standard error uses the sample
/// fourth central moment: Var(s^2) ≈ (m4 - s^4 (n-3)/(n-1)) / n.
inline Moments moments(std::span<const double> xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / xs.size();
  if (xs.size() < 2) return m;
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double n = static_cast<double>(xs.size());
  m.variance = s2 / (n - 1.0);
  m.ci_half_width = 1.959963984540054 * std::sqrt(m.variance / n);
  const double m4 = s4 / n;
  m.variance_se = std::sqrt(std::max(0.0, (m4 - m.variance * m.variance * (n - 3.0) / (n - 1.0)) / n));
  return m;
}

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
inline RegressionResult ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw Error(ErrorKind::DomainError, "regression needs >= 3 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DomainError, "regression abscissae are all equal");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    sse += e * e;
  }
  r.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  r.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return r;
}

/// Fit log(y) = intercept + slope * log(n).
inline RegressionResult fit_log_log(std::span<const double> n, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(y[i] > 0.0) || !(n[i] > 0.0)) throw Error(ErrorKind::DomainError, "log-log fit needs positive entries");
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(y[i]));
  }
  return ols(lx, ly);
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::DomainError, "KS test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_statistic_one(std::vector<double> a, Cdf&& cdf) {
  if (a.empty()) throw Error(ErrorKind::DomainError, "KS test needs a nonempty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Asymptotic critical value sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

inline double ks_critical_one(double alpha, std::size_t n) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace randpoly::stats

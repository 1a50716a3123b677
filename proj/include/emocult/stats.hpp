#pragma once

// Descriptive statistics, Student's t distribution via the regularized
// incomplete beta function, and the two-sample independent t-test.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>

#include "emocult/error.hpp"

namespace emocult::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptyInput, "mean of empty sample");
  // Two-pass: the correction term absorbs rounding of the first sum.
  double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double corr = 0.0;
  for (double x : xs) corr += x - m;
  return m + corr / static_cast<double>(xs.size());
}

/// Sum of squared deviations from the mean.
inline double sum_sq_dev(std::span<const double> xs, double m) {
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss;
}

/// Divides by n.
inline double population_stddev(std::span<const double> xs) {
  return std::sqrt(sum_sq_dev(xs, mean(xs)) / static_cast<double>(xs.size()));
}

/// Divides by n - 1.
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorCode::EmptyInput, "sample variance needs at least 2 values");
  return sum_sq_dev(xs, mean(xs)) / static_cast<double>(xs.size() - 1);
}

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz method.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || std::isnan(x))
    return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fastest below the mean of the distribution;
  // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) above it.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom (dof may be fractional).
inline double student_t_two_sided_p(double t, double dof) {
  if (std::isnan(t) || !(dof > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::fmin(1.0, incomplete_beta(dof / 2.0, 0.5, x));
}

enum class TTestVariant { welch, student };

constexpr std::string_view to_string(TTestVariant v) noexcept {
  return v == TTestVariant::welch ? "welch" : "student";
}

inline TTestVariant parse_ttest_variant(std::string_view s) {
  if (s == "welch") return TTestVariant::welch;
  if (s == "student") return TTestVariant::student;
  throw Error(ErrorCode::InvalidConfig, "unknown t-test variant '" + std::string(s) + "'");
}

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
  bool significant_05 = false;
  TTestVariant variant = TTestVariant::welch;
};

inline constexpr double kSignificanceLevel = 0.05;

/// Two-sided independent two-sample t-test of mean(a) - mean(b).
/// Welch (unequal variances) by default; `student` pools the variances.
inline TTestResult independent_t_test(std::span<const double> a, std::span<const double> b,
                                      TTestVariant variant = TTestVariant::welch) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorCode::EmptyInput, "t-test needs at least 2 values per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a);
  const double vb = sample_variance(b);

  TTestResult r;
  r.variant = variant;
  double se2 = 0.0;
  if (variant == TTestVariant::welch) {
    se2 = va / na + vb / nb;
    const double qa = va / na;
    const double qb = vb / nb;
    const double denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
    r.dof = denom > 0.0 ? se2 * se2 / denom : na + nb - 2.0;
  } else {
    r.dof = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.dof;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  }

  const double diff = ma - mb;
  if (se2 == 0.0) {
    // Both samples constant.
    if (diff == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p_value = 0.0;
    }
  } else {
    r.t_statistic = diff / std::sqrt(se2);
    r.p_value = student_t_two_sided_p(r.t_statistic, r.dof);
  }
  r.significant_05 = r.p_value < kSignificanceLevel;
  return r;
}

}  // namespace emocult::stats

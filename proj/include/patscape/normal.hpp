#pragma once

namespace patscape::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double pdf(double z);
double cdf(double z);
// log cdf, finite for all finite z.
double log_cdf(double z);
// Inverse cdf for p in (0, 1).
double quantile(double p);
// Two-sided p-value of a standard-normal statistic.
double two_sided_p(double z);

// pdf(z) / cdf(z). For z < -30 the ratio is evaluated by the continued fraction
// of the Mills ratio, so it stays finite (about -z) far into the left tail.
double inverse_mills(double z);

}  // namespace patscape::normal

#pragma once

namespace bnmon {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF on (0, 1); throws bnmon::Error outside.
// Rational starting approximation refined by one Halley step against
// erfc, giving close to full double precision.
double normal_quantile(double p);

// Upper two-sided critical value: normal_quantile(1 - alpha / 2).
double two_sided_critical_value(double alpha);

}  // namespace bnmon

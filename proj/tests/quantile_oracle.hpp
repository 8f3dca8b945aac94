#pragma once

// 50-digit inverse normal CDF by Newton iteration on erfc.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace bnmon::testing {

using Big = boost::multiprecision::cpp_bin_float_50;

inline Big big_normal_cdf(const Big& x) {
  return boost::math::erfc(-x / boost::math::constants::root_two<Big>()) / 2;
}

inline double reference_quantile(double p, double start) {
  const Big target(p);
  const Big inv_root_two_pi = 1 / boost::math::constants::root_two_pi<Big>();
  Big x(start);
  for (int i = 0; i < 8; ++i) {
    const Big density = inv_root_two_pi * exp(-x * x / 2);
    const Big step = (big_normal_cdf(x) - target) / density;
    x -= step;
    if (abs(step) < Big("1e-40")) break;
  }
  return static_cast<double>(x);
}

// Evenly spaced points of (0, 1) that skip the outer 1e-6 tails.
inline std::vector<double> quantile_grid(std::size_t points = 1000) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = 1e-6 + (1.0 - 2e-6) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace bnmon::testing

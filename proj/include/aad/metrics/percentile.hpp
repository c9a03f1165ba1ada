#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "aad/core/error.hpp"

namespace aad::metrics {

// Linear-interpolation percentile on sorted values:
// r = q/100 * (n-1); v[floor r] + frac(r) * (v[floor r + 1] - v[floor r]).
inline double percentile(std::span<const double> values, double q) {
  require(!values.empty(), Errc::data, "percentile of an empty collection");
  require(q >= 0.0 && q <= 100.0, Errc::parameter, "percentile q must be in [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double r = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(r));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (r - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace aad::metrics

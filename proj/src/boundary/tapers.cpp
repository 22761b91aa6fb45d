#include "rtms/tapers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rtms {

double cosine_ramp(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

double spatial_taper(double x1, const ArraySpec& a) noexcept {
  if (x1 < a.x1_min || x1 > a.x1_max) return 0.0;
  const double w = a.taper_fraction * (a.x1_max - a.x1_min);
  if (w <= 0.0) return 1.0;
  return std::min(cosine_ramp((x1 - a.x1_min) / w), cosine_ramp((a.x1_max - x1) / w));
}

double grazing_rolloff(double s, double delta) noexcept {
  s = std::abs(s);
  const double lo = 1.0 - delta;
  const double hi = 1.0 - 0.5 * delta;
  if (s <= lo) return 1.0;
  if (s >= hi) return 0.0;
  return cosine_ramp((hi - s) / (hi - lo));
}

}  // namespace rtms

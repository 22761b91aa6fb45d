#pragma once

namespace rtms {

/// Receiver array on x2 = 0 and its cutoff parameters. The spatial taper rises over
/// taper_fraction * (x1_max - x1_min) at each end.
struct ArraySpec {
  double x1_min = 0.0;
  double x1_max = 0.0;
  double taper_fraction = 0.1;
  double grazing_delta = 0.1;
};

/// Raised-cosine ramp: 0 for s <= 0, 1 for s >= 1.
double cosine_ramp(double s) noexcept;

/// Tukey window over the array; 0 outside [x1_min, x1_max].
double spatial_taper(double x1, const ArraySpec& a) noexcept;

/// Cutoff in s = c |xi'| / |omega| (sine of the emergence angle): 1 for s <= 1 - delta,
/// 0 for s >= 1 - delta / 2, cosine in between.
double grazing_rolloff(double s, double delta) noexcept;

}  // namespace rtms

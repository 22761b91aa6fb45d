#pragma once

#include <complex>
#include <cstddef>

#include "rtms/gather.hpp"
#include "rtms/grid.hpp"
#include "rtms/tapers.hpp"

namespace rtms {

struct FMParams {
  double c_surface = 2000.0;  // m/s, constant along the acquisition line
  ArraySpec array;
  double f_max = 0.0;         // highest frequency that must be resolved; 0 skips the check
  std::size_t pad = 2;        // zero padding factor on both axes
  bool mute = false;
  Vec2 source{};              // for the direct-arrival mute
  double source_delay = 0.0;  // s
  double mute_window = 0.05;  // s
};

/// d_full - d_background. Throws GeometryError on mismatched geometry.
SurfaceGather remove_direct(const SurfaceGather& full, const SurfaceGather& background);

/// -2 i w / c sqrt(max(0, 1 - c^2 xi'^2 / w^2)) times the grazing rolloff; 0 at w = 0.
std::complex<double> fm_symbol(double xi1, double omega, double c, double delta) noexcept;

/// Spatial taper, f-k multiplication by fm_symbol, optional direct-arrival mute.
SurfaceGather apply_fm(const SurfaceGather& d, const FMParams& p);

/// Zeroes samples up to the straight-line direct arrival plus the window, with a short ramp.
void mute_direct(SurfaceGather& d, Vec2 source, double c_surface, double delay, double window);

}  // namespace rtms

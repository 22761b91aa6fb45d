#pragma once

#include <vector>

#include "rtms/grid.hpp"

namespace rtms {

/// c(x) = c0 + g * x2. Throws ConfigError if the velocity is nonpositive anywhere on the grid.
ScalarField build_gradient_model(const Grid2D& grid, double c0, double g);

/// Gradient model plus a Gaussian bump delta * exp(-|x - center|^2 / radius^2).
ScalarField build_lens_model(const Grid2D& grid, double c0, double g, Vec2 lens_center,
                             double lens_radius, double lens_delta);

/// Band-limited contrast: a plane wave cos(k . (x - center)) under a Gaussian window.
struct WavePacketSpec {
  Vec2 center;
  Vec2 wavevector;  // rad/m
  Vec2 widths;      // m, e-folding half-widths of the window
  double amplitude = 0.0;
};

/// Relative contrast r(x) of one packet. The support (three widths around the center) must
/// lie inside the grid and below `min_depth`.
ScalarField wave_packet(const Grid2D& grid, const WavePacketSpec& spec, double min_depth = 0.0);

/// Horizontally extended band-limited reflector: cos(k (x2 - depth)) exp(-((x2 - depth)/width)^2)
/// times a raised-cosine taper in x1 over [x1_min, x1_max].
struct ReflectorSpec {
  double depth = 0.0;
  double wavenumber = 0.0;
  double width = 0.0;
  double x1_min = 0.0;
  double x1_max = 0.0;
  double taper = 0.0;
  double amplitude = 0.0;
};

ScalarField reflector(const Grid2D& grid, const ReflectorSpec& spec, double min_depth = 0.0);

/// Support depth range [top, bottom] of a packet or reflector (three window widths).
struct DepthRange {
  double top = 0.0;
  double bottom = 0.0;
};
DepthRange support_depths(const WavePacketSpec& s);
DepthRange support_depths(const ReflectorSpec& s);

/// max(c) * dt / dx.
double courant_number(const ScalarField& c, double dt);

}  // namespace rtms

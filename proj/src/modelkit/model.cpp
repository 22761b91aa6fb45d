#include "rtms/model.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace rtms {
namespace {

void require_positive(const ScalarField& c) {
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!(c[k] > 0.0) || !std::isfinite(c[k])) {
      const auto cell = c.grid().cell(k);
      throw ConfigError("nonpositive velocity " + std::to_string(c[k]) + " m/s at x = (" +
                        std::to_string(c.grid().x1(cell.i)) + ", " +
                        std::to_string(c.grid().x2(cell.j)) + ")");
    }
  }
}

double raised_cosine(double s) {
  // 0 -> 0, 1 -> 1
  s = std::clamp(s, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

}  // namespace

ScalarField build_gradient_model(const Grid2D& grid, double c0, double g) {
  if (!(c0 > 0.0)) throw ConfigError("c0 must be positive");
  ScalarField c(grid);
  for (std::size_t j = 0; j < grid.nx2(); ++j) {
    const double v = c0 + g * grid.x2(j);
    for (std::size_t i = 0; i < grid.nx1(); ++i) c(i, j) = v;
  }
  require_positive(c);
  return c;
}

ScalarField build_lens_model(const Grid2D& grid, double c0, double g, Vec2 lens_center,
                             double lens_radius, double lens_delta) {
  if (!(lens_radius > 0.0)) throw ConfigError("lens radius must be positive");
  if (!(c0 > 0.0)) throw ConfigError("c0 must be positive");
  ScalarField c(grid);
  const double inv_r2 = 1.0 / (lens_radius * lens_radius);
  for (std::size_t j = 0; j < grid.nx2(); ++j) {
    for (std::size_t i = 0; i < grid.nx1(); ++i) {
      const Vec2 d = grid.point(i, j) - lens_center;
      c(i, j) = c0 + g * grid.x2(j) + lens_delta * std::exp(-dot(d, d) * inv_r2);
    }
  }
  require_positive(c);
  return c;
}

DepthRange support_depths(const WavePacketSpec& s) {
  return {s.center.x2 - 3.0 * s.widths.x2, s.center.x2 + 3.0 * s.widths.x2};
}

DepthRange support_depths(const ReflectorSpec& s) {
  return {s.depth - 3.0 * s.width, s.depth + 3.0 * s.width};
}

ScalarField wave_packet(const Grid2D& grid, const WavePacketSpec& spec, double min_depth) {
  if (!(spec.widths.x1 > 0.0) || !(spec.widths.x2 > 0.0))
    throw ConfigError("wave packet widths must be positive");
  if (!(norm(spec.wavevector) > 0.0)) throw ConfigError("wave packet wavevector must be nonzero");
  const Vec2 lo = spec.center - 3.0 * spec.widths;
  const Vec2 hi = spec.center + 3.0 * spec.widths;
  if (!grid.contains(lo) || !grid.contains(hi))
    throw ConfigError("wave packet support leaves the grid");
  if (lo.x2 <= std::max(min_depth, 0.0))
    throw ConfigError("wave packet support reaches above depth " + std::to_string(min_depth) +
                      " m (contrast must stay strictly below the acquisition surface)");

  ScalarField r(grid);
  for (std::size_t j = 0; j < grid.nx2(); ++j) {
    for (std::size_t i = 0; i < grid.nx1(); ++i) {
      const Vec2 d = grid.point(i, j) - spec.center;
      const double w1 = d.x1 / spec.widths.x1;
      const double w2 = d.x2 / spec.widths.x2;
      r(i, j) = spec.amplitude * std::cos(dot(spec.wavevector, d)) * std::exp(-(w1 * w1 + w2 * w2));
    }
  }
  return r;
}

ScalarField reflector(const Grid2D& grid, const ReflectorSpec& spec, double min_depth) {
  if (!(spec.width > 0.0)) throw ConfigError("reflector width must be positive");
  if (!(spec.wavenumber > 0.0)) throw ConfigError("reflector wavenumber must be positive");
  if (!(spec.x1_max > spec.x1_min) || spec.taper < 0.0 ||
      2.0 * spec.taper > spec.x1_max - spec.x1_min)
    throw ConfigError("reflector x1 extent/taper inconsistent");
  const auto dr = support_depths(spec);
  if (dr.top <= std::max(min_depth, 0.0))
    throw ConfigError("reflector support reaches above depth " + std::to_string(min_depth) + " m");
  if (!grid.contains({spec.x1_min, dr.top}) || !grid.contains({spec.x1_max, dr.bottom}))
    throw ConfigError("reflector support leaves the grid");

  ScalarField r(grid);
  for (std::size_t j = 0; j < grid.nx2(); ++j) {
    const double z = grid.x2(j) - spec.depth;
    const double w = z / spec.width;
    const double vert = spec.amplitude * std::cos(spec.wavenumber * z) * std::exp(-w * w);
    for (std::size_t i = 0; i < grid.nx1(); ++i) {
      const double x = grid.x1(i);
      double h = 0.0;
      if (x >= spec.x1_min && x <= spec.x1_max) {
        h = 1.0;
        if (spec.taper > 0.0) {
          h = std::min(raised_cosine((x - spec.x1_min) / spec.taper),
                       raised_cosine((spec.x1_max - x) / spec.taper));
        }
      }
      r(i, j) = vert * h;
    }
  }
  return r;
}

double courant_number(const ScalarField& c, double dt) {
  return max_abs(c.values()) * dt / c.grid().dx();
}

}  // namespace rtms

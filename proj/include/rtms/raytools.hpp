#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rtms/grid.hpp"
#include "rtms/tapers.hpp"

namespace rtms {

/// Cubic-convolution (Keys, a = -1/2) interpolation of a velocity grid. C1, reproduces
/// quadratics exactly; indices are clamped at the grid edge.
class VelocityInterpolator {
 public:
  explicit VelocityInterpolator(const ScalarField& c);

  struct Sample {
    double c = 0.0;
    Vec2 grad{};
    double h11 = 0.0;
    double h12 = 0.0;
    double h22 = 0.0;
  };

  Sample eval(Vec2 x) const noexcept;
  double value(Vec2 x) const noexcept { return eval(x).c; }
  bool inside(Vec2 x) const noexcept;
  const Grid2D& grid() const noexcept { return c_.grid(); }

 private:
  ScalarField c_;
};

/// One point of a ray. dy / dp are derivatives with respect to the takeoff angle.
struct RaySample {
  double t = 0.0;
  Vec2 y{};
  Vec2 p{};
  Vec2 dy{};
  Vec2 dp{};
};

enum class RayExit { surface, domain, time };

struct Ray {
  std::vector<RaySample> samples;
  RayExit exit = RayExit::time;
  RaySample exit_state;  // interpolated onto x2 = 0 for surface exits
};

struct RayOptions {
  double t0 = 0.0;       // time attached to the first sample
  double dt = 0.002;     // s
  double t_max = 4.0;    // s
  bool stop_at_surface = true;
  bool keep_samples = true;
};

/// RK4 on dy/dt = c p/|p|, dp/dt = -grad(c) |p| together with the variational system.
/// The initial covector is scaled to |p| = 1/c(x0); its angle derivative is p0 rotated by -90 deg.
Ray trace_ray(Vec2 x0, Vec2 xi0, const VelocityInterpolator& c, const RayOptions& opt);

/// Tube width |dy/dtheta x unit tangent|, signed.
double tube_width(const RaySample& s) noexcept;

struct RayFanSpec {
  std::size_t count = 2001;
  double dt = 0.002;             // s
  double theta_min_deg = -89.0;  // from the downward vertical, positive towards +x1
  double theta_max_deg = 89.0;
  double max_multipath_fraction = 0.02;
};

struct GoFields {
  ScalarField T;   // s
  ScalarField A;   // sqrt(c / (8 pi L))
  ScalarField n1;  // unit source direction
  ScalarField n2;
  MaskField caustic;    // tube Jacobian sign change or multiple arrivals
  MaskField multipath;  // multiple arrivals only
  MaskField shadow;     // no arrival

  Vec2 ns(std::size_t i, std::size_t j) const noexcept { return {n1(i, j), n2(i, j)}; }
  bool valid(std::size_t i, std::size_t j) const noexcept { return !caustic(i, j) && !shadow(i, j); }
};

/// Traces a fan of rays from the surface source and grids the first arrival by ray tubes.
GoFields go_fields(const ScalarField& c, Vec2 xs, const RayFanSpec& fan, double t_max);

double multipath_fraction(const GoFields& go, const IndexBox& box);

/// Throws SmeViolation when the multipath fraction inside box exceeds max_fraction.
void require_single_arrival(const GoFields& go, const IndexBox& box, double max_fraction);

/// max | |grad T| c - 1 | over valid cells of box farther than min_offset from xs,
/// with fourth-order centered differences.
double eikonal_residual(const GoFields& go, const ScalarField& c, const IndexBox& box, Vec2 xs,
                        double min_offset);

/// zeta = xi - |xi| ns.
Vec2 zeta_from_xi(Vec2 xi, Vec2 ns) noexcept;

/// Inverse on the halfspace zeta . ns < 0: xi = zeta + t ns, t = -|zeta|^2 / (2 zeta . ns).
/// Throws GeometryError outside the halfspace.
Vec2 xi_from_zeta(Vec2 zeta, Vec2 ns);

/// det d zeta / d xi = 1 - xi . ns / |xi|.
double snell_jacobian(Vec2 xi, Vec2 ns);

/// Symbol of the resolution operator at (z, zeta): for whichever of +-zeta lies in the
/// halfspace, the scattered ray leaving z at T_s(z) is traced to the surface; its value is the
/// spatial taper at the crossing times the grazing cutoff of the emergence angle.
double resolution_mask(Vec2 z, Vec2 zeta, const GoFields& go, const VelocityInterpolator& c,
                       const ArraySpec& array, double t_max, double ray_dt = 0.002);

}  // namespace rtms

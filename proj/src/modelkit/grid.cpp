#include "rtms/grid.hpp"

#include <algorithm>
#include <string>

namespace rtms {

Grid2D::Grid2D(std::size_t nx1, std::size_t nx2, double dx, Vec2 origin)
    : nx1_(nx1), nx2_(nx2), dx_(dx), origin_(origin) {
  if (nx1 < 3 || nx2 < 3) throw GeometryError("grid needs at least 3 cells per axis");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw GeometryError("grid spacing must be positive");
  if (!std::isfinite(origin.x1) || !std::isfinite(origin.x2))
    throw GeometryError("grid origin must be finite");
}

bool Grid2D::contains(Vec2 p) const noexcept {
  const double a = fi(p.x1);
  const double b = fj(p.x2);
  return a >= -0.5 && b >= -0.5 && a < static_cast<double>(nx1_) - 0.5 &&
         b < static_cast<double>(nx2_) - 0.5;
}

CellIndex Grid2D::nearest(Vec2 p) const {
  if (!contains(p))
    throw GeometryError("point (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                        ") outside grid");
  return {static_cast<std::size_t>(std::lround(fi(p.x1))),
          static_cast<std::size_t>(std::lround(fj(p.x2)))};
}

Grid2D Grid2D::window(std::size_t i0, std::size_t j0, std::size_t n1, std::size_t n2) const {
  if (i0 + n1 > nx1_ || j0 + n2 > nx2_) throw GeometryError("window exceeds grid");
  return Grid2D(n1, n2, dx_, point(i0, j0));
}

bool Grid2D::same_as(const Grid2D& o, double tol) const noexcept {
  return nx1_ == o.nx1_ && nx2_ == o.nx2_ && std::abs(dx_ - o.dx_) <= tol * dx_ &&
         std::abs(origin_.x1 - o.origin_.x1) <= tol * dx_ &&
         std::abs(origin_.x2 - o.origin_.x2) <= tol * dx_;
}

IndexBox box_of(const Grid2D& g, Vec2 lo, Vec2 hi) {
  auto clampi = [](double v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  const std::size_t i0 = clampi(std::ceil(g.fi(lo.x1) - 1e-9), g.nx1());
  const std::size_t i1 = clampi(std::floor(g.fi(hi.x1) + 1e-9), g.nx1());
  const std::size_t j0 = clampi(std::ceil(g.fj(lo.x2) - 1e-9), g.nx2());
  const std::size_t j1 = clampi(std::floor(g.fj(hi.x2) + 1e-9), g.nx2());
  if (i1 < i0 || j1 < j0) throw GeometryError("empty index box");
  return {i0, j0, i1 - i0 + 1, j1 - j0 + 1};
}

ScalarField crop(const ScalarField& f, const IndexBox& box) {
  ScalarField out(f.grid().window(box.i0, box.j0, box.n1, box.n2));
  for (std::size_t j = 0; j < box.n2; ++j)
    for (std::size_t i = 0; i < box.n1; ++i) out(i, j) = f(box.i0 + i, box.j0 + j);
  return out;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace rtms

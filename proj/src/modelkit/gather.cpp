#include "rtms/gather.hpp"

#include <algorithm>
#include <cmath>

namespace rtms {

bool SurfaceGather::same_geometry(const SurfaceGather& o) const noexcept {
  const double tol = 1e-9;
  return nt == o.nt && nrec == o.nrec && std::abs(dt - o.dt) <= tol * dt &&
         std::abs(x1_first - o.x1_first) <= tol * std::max(1.0, std::abs(dx_rec)) &&
         std::abs(dx_rec - o.dx_rec) <= tol * std::max(1.0, std::abs(dx_rec));
}

std::vector<double> SurfaceGather::trace(std::size_t r) const {
  if (r >= nrec) throw GeometryError("receiver index out of range");
  std::vector<double> t(nt);
  for (std::size_t k = 0; k < nt; ++k) t[k] = at(k, r);
  return t;
}

}  // namespace rtms

#pragma once

#include <cstddef>
#include <vector>

#include "rtms/errors.hpp"

namespace rtms {

/// Receiver-time matrix recorded on the acquisition line x2 = 0.
/// Receivers are uniformly spaced; data is row-major with one row per time sample.
struct SurfaceGather {
  std::size_t nt = 0;
  std::size_t nrec = 0;
  double dt = 0.0;
  double x1_first = 0.0;
  double dx_rec = 0.0;
  std::vector<double> data;

  SurfaceGather() = default;
  SurfaceGather(std::size_t nt_, std::size_t nrec_, double dt_, double x1_first_, double dx_rec_)
      : nt(nt_), nrec(nrec_), dt(dt_), x1_first(x1_first_), dx_rec(dx_rec_), data(nt_ * nrec_, 0.0) {}

  double& at(std::size_t k, std::size_t r) noexcept { return data[k * nrec + r]; }
  double at(std::size_t k, std::size_t r) const noexcept { return data[k * nrec + r]; }
  double receiver_x1(std::size_t r) const noexcept { return x1_first + dx_rec * static_cast<double>(r); }

  /// Same sampling and receiver layout.
  bool same_geometry(const SurfaceGather& o) const noexcept;
  std::vector<double> trace(std::size_t r) const;
};

}  // namespace rtms

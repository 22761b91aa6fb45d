#include "rtms/boundary.hpp"

#include <cmath>
#include <numbers>

#include "common/fft.hpp"

namespace rtms {
namespace {
constexpr double kPi = std::numbers::pi;
}

SurfaceGather remove_direct(const SurfaceGather& full, const SurfaceGather& background) {
  if (!full.same_geometry(background)) throw GeometryError("gathers differ in geometry or sampling");
  SurfaceGather out = full;
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] -= background.data[k];
  return out;
}

std::complex<double> fm_symbol(double xi1, double omega, double c, double delta) noexcept {
  if (omega == 0.0) return 0.0;
  const double s = c * std::abs(xi1) / std::abs(omega);
  const double root = std::sqrt(std::max(0.0, 1.0 - s * s));
  return std::complex<double>(0.0, -2.0 * omega / c) * (root * grazing_rolloff(s, delta));
}

SurfaceGather apply_fm(const SurfaceGather& d, const FMParams& p) {
  if (!(p.c_surface > 0.0)) throw ConfigError("surface velocity must be positive");
  if (!(p.array.grazing_delta > 0.0 && p.array.grazing_delta < 1.0))
    throw ConfigError("grazing delta must lie in (0, 1)");
  if (p.array.taper_fraction < 0.0 || p.array.taper_fraction > 0.5)
    throw ConfigError("taper fraction must lie in [0, 0.5]");
  if (p.pad < 1) throw ConfigError("padding factor must be at least 1");
  if (p.f_max > 0.0) {
    if (p.f_max >= 0.5 / d.dt) throw ConfigError("band exceeds the temporal Nyquist frequency");
    if (p.f_max >= p.c_surface / (2.0 * d.dx_rec))
      throw ConfigError("band exceeds the spatial Nyquist frequency of the receiver line");
  }
  const std::size_t nt = d.nt * p.pad;
  const std::size_t nx = d.nrec * p.pad;
  detail::FftPlan fwd(nt, nx, FFTW_FORWARD);
  detail::FftPlan inv(nt, nx, FFTW_BACKWARD);

  auto& buf = fwd.data();
  std::fill(buf.begin(), buf.end(), 0.0);
  for (std::size_t r = 0; r < d.nrec; ++r) {
    const double w = spatial_taper(d.receiver_x1(r), p.array);
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < d.nt; ++k) fwd(k, r) = w * d.at(k, r);
  }
  fwd.execute();

  const double dw = 2.0 * kPi / (static_cast<double>(nt) * d.dt);
  const double dk = 2.0 * kPi / (static_cast<double>(nx) * d.dx_rec);
  for (std::size_t a = 0; a < nt; ++a) {
    const bool nyquist = nt % 2 == 0 && a == nt / 2;
    const double om = dw * static_cast<double>(detail::fft_index(a, nt));
    for (std::size_t b = 0; b < nx; ++b) {
      const double xi = dk * static_cast<double>(detail::fft_index(b, nx));
      inv(a, b) = nyquist ? 0.0 : fwd(a, b) * fm_symbol(xi, om, p.c_surface, p.array.grazing_delta);
    }
  }
  inv.execute();

  SurfaceGather out(d.nt, d.nrec, d.dt, d.x1_first, d.dx_rec);
  const double norm = 1.0 / static_cast<double>(nt * nx);
  for (std::size_t r = 0; r < d.nrec; ++r) {
    // lateral sidelobes of the filter are cut outside the array
    if (spatial_taper(d.receiver_x1(r), p.array) == 0.0) continue;
    for (std::size_t k = 0; k < d.nt; ++k) out.at(k, r) = inv(k, r).real() * norm;
  }
  if (p.mute) mute_direct(out, p.source, p.c_surface, p.source_delay, p.mute_window);
  return out;
}

void mute_direct(SurfaceGather& d, Vec2 source, double c_surface, double delay, double window) {
  const double ramp = 10.0 * d.dt;
  for (std::size_t r = 0; r < d.nrec; ++r) {
    const double t0 = std::abs(d.receiver_x1(r) - source.x1) / c_surface + delay + window;
    for (std::size_t k = 0; k < d.nt; ++k) {
      const double t = static_cast<double>(k) * d.dt;
      d.at(k, r) *= cosine_ramp((t - t0) / ramp);
    }
  }
}

}  // namespace rtms

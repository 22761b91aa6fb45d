#include "rtms/rtm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/fft.hpp"
#include "rtms/errors.hpp"

namespace rtms {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

template <typename T>
BasicField<T> crop_field(const BasicField<T>& f, const IndexBox& box) {
  const Grid2D sub = f.grid().window(box.i0, box.j0, box.n1, box.n2);
  BasicField<T> out(sub);
  for (std::size_t j = 0; j < box.n2; ++j)
    for (std::size_t i = 0; i < box.n1; ++i) out(i, j) = f(box.i0 + i, box.j0 + j);
  return out;
}

// d/dx1 and d/dx2 of a complex slice: centered inside, one-sided at the edges.
cd d1(const ComplexField& f, std::size_t i, std::size_t j, double h) {
  const std::size_t n = f.grid().nx1();
  if (i == 0) return (f(1, j) - f(0, j)) / h;
  if (i + 1 == n) return (f(n - 1, j) - f(n - 2, j)) / h;
  return (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
}

cd d2(const ComplexField& f, std::size_t i, std::size_t j, double h) {
  const std::size_t n = f.grid().nx2();
  if (j == 0) return (f(i, 1) - f(i, 0)) / h;
  if (j + 1 == n) return (f(i, n - 1) - f(i, n - 2)) / h;
  return (f(i, j + 1) - f(i, j - 1)) / (2.0 * h);
}

void check_pair(const FreqSlices& a, const FreqSlices& b) {
  if (!a.grid.same_as(b.grid)) throw GeometryError("frequency slices live on different grids");
  if (a.freqs.size() != b.freqs.size()) throw GeometryError("frequency sets differ");
  for (std::size_t m = 0; m < a.freqs.size(); ++m)
    if (std::abs(a.freqs[m] - b.freqs[m]) > 1e-9 * std::max(1.0, std::abs(a.freqs[m])))
      throw GeometryError("frequency sets differ");
}

void check_band(const FreqSlices& s, const ImagingBand& band) {
  if (band.size() == 0) throw ConfigError("empty imaging band");
  if (s.freqs.size() != band.size()) throw GeometryError("band and slices differ in frequency count");
  for (std::size_t m = 0; m < band.size(); ++m)
    if (std::abs(s.freqs[m] - band.freqs[m]) > 1e-9 * std::max(1.0, band.freqs[m]))
      throw GeometryError("band and slices differ in frequencies");
}

FreqRequest zone_request(const ExperimentConfig& cfg) {
  return {imaging_band(cfg).freqs, cfg.zone_box(), cfg.dft_stride};
}

}  // namespace

ImagingBand imaging_band(double f_lo, double f_hi, std::size_t nfreq, double ramp_fraction) {
  if (!(f_lo > 0.0 && f_hi > f_lo)) throw ConfigError("band needs 0 < f_lo < f_hi");
  if (nfreq < 2) throw ConfigError("band needs at least two frequencies");
  if (ramp_fraction < 0.0 || ramp_fraction > 0.5) throw ConfigError("band ramp must lie in [0, 0.5]");
  ImagingBand b;
  b.df = (f_hi - f_lo) / static_cast<double>(nfreq - 1);
  const double ramp = ramp_fraction * (f_hi - f_lo);
  for (std::size_t m = 0; m < nfreq; ++m) {
    const double f = f_lo + b.df * static_cast<double>(m);
    b.freqs.push_back(f);
    double w = 1.0;
    if (m == 0 || m + 1 == nfreq)
      w = 0.0;
    else if (ramp > 0.0)
      w = cosine_ramp((f - f_lo) / ramp) * cosine_ramp((f_hi - f) / ramp);
    b.weights.push_back(w);
  }
  return b;
}

ImagingBand imaging_band(const ExperimentConfig& cfg) {
  return imaging_band(cfg.f_lo, cfg.f_hi, cfg.nfreq, cfg.band_ramp);
}

ReceiverLine receiver_line(const ExperimentConfig& cfg) {
  const Grid2D& g = cfg.grid;
  const auto i0 = static_cast<std::size_t>(std::ceil(g.fi(cfg.acquisition.x1_min) - 1e-9));
  const auto i1 = static_cast<std::size_t>(std::floor(g.fi(cfg.acquisition.x1_max) + 1e-9));
  if (i1 < i0 || i1 >= g.nx1()) throw ConfigError("acquisition line outside the grid");
  return {cfg.surface_row(), i0, i1 - i0 + 1};
}

TimeStepping time_stepping(const ExperimentConfig& cfg) {
  return {cfg.dt, cfg.nt, cfg.sponge_width, cfg.sponge_strength};
}

std::vector<double> source_signature(const ExperimentConfig& cfg) {
  return ricker_series(cfg.nt, cfg.dt, cfg.peak_frequency, cfg.delay());
}

FMParams fm_params(const ExperimentConfig& cfg, const ScalarField& c) {
  FMParams p;
  const Grid2D& g = c.grid();
  p.c_surface = c(g.nearest(cfg.source).i, cfg.surface_row());
  p.array = cfg.acquisition.array();
  p.f_max = cfg.f_hi;
  p.mute = cfg.acquisition.mute;
  p.source = cfg.source;
  p.source_delay = cfg.delay();
  p.mute_window = cfg.acquisition.mute_window;
  return p;
}

std::vector<cd> wavelet_spectrum(const std::vector<double>& w, double dt, const std::vector<double>& freqs) {
  std::vector<cd> out;
  out.reserve(freqs.size());
  for (double f : freqs) {
    cd s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      s += w[k] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(k) * dt);
    out.push_back(s * dt);
  }
  return out;
}

ForwardProducts forward_model(const ExperimentConfig& cfg, const ScalarField& c, const ScalarField& r) {
  if (!r.grid().same_as(c.grid())) throw GeometryError("contrast and velocity grids differ");
  const TimeStepping ts = time_stepping(cfg);
  const ReceiverLine rl = receiver_line(cfg);
  const auto sig = source_signature(cfg);
  ForwardProducts out;

  if (cfg.born == BornMode::nonlinear) {
    RecordRequest rec;
    rec.receivers = rl;
    rec.freq = zone_request(cfg);
    PointSource s0(c.grid(), cfg.source, sig);
    auto bg = simulate(c, s0, ts, rec);
    ScalarField cp = c;
    for (std::size_t k = 0; k < cp.size(); ++k) cp[k] *= 1.0 + r[k];
    RecordRequest rec1;
    rec1.receivers = rl;
    PointSource s1(c.grid(), cfg.source, sig);
    auto full = simulate(cp, s1, ts, rec1);
    out.background = std::move(*bg.gather);
    out.scattered = remove_direct(*full.gather, out.background);
    out.g_hat = std::move(*bg.slices);
    return out;
  }

  // first-order scattering: u1 driven by 2 r c^-2 d_t^2 u0, both stepped together
  const Grid2D& g = c.grid();
  const Sponge sponge(g, ts.sponge_width, ts.sponge_strength);
  Propagator prop(c, ts.dt, sponge);
  WavefieldState s0(g, ts.dt), s1(g, ts.dt);
  PointSource src(g, cfg.source, sig);
  const FreqRequest fr = zone_request(cfg);
  FreqAccumulator acc(g, fr.box, fr.freqs, ts.dt, fr.stride);
  out.background = SurfaceGather(ts.nt, rl.nrec, ts.dt, g.x1(rl.i_first), g.dx());
  out.scattered = SurfaceGather(ts.nt, rl.nrec, ts.dt, g.x1(rl.i_first), g.dx());

  std::vector<std::size_t> support;
  std::vector<double> coef;
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r[k] != 0.0) {
      support.push_back(k);
      coef.push_back(2.0 * r[k] / (c[k] * c[k] * ts.dt * ts.dt));
    }

  std::vector<Injection> inj0, inj1;
  for (std::size_t k = 0; k < ts.nt; ++k) {
    const double* row0 = &s0.u_curr(rl.i_first, rl.row);
    const double* row1 = &s1.u_curr(rl.i_first, rl.row);
    for (std::size_t q = 0; q < rl.nrec; ++q) {
      out.background.at(k, q) = row0[q];
      out.scattered.at(k, q) = row1[q];
    }
    acc.add(k, s0.u_curr);
    if (k + 1 == ts.nt) break;
    // u0 at k-1 and k, then u0 at k+1, gives the second difference at k
    ScalarField prev0 = s0.u_prev;
    inj0.clear();
    src.forcing(k, inj0);
    prop.step(s0, inj0);
    // after the step: s0.u_prev = u0_k, s0.u_curr = u0_{k+1}
    inj1.clear();
    for (std::size_t q = 0; q < support.size(); ++q) {
      const std::size_t n = support[q];
      const double a = s0.u_curr[n] - 2.0 * s0.u_prev[n] + prev0[n];
      inj1.push_back({n, coef[q] * a});
    }
    prop.step(s1, inj1);
  }
  out.g_hat = acc.take();
  return out;
}

SurfaceGather born_data(const ExperimentConfig& cfg, const ScalarField& c, const ScalarField& r) {
  return forward_model(cfg, c, r).scattered;
}

FreqSlices source_slices(const ExperimentConfig& cfg, const ScalarField& c) {
  RecordRequest rec;
  rec.freq = zone_request(cfg);
  PointSource src(c.grid(), cfg.source, source_signature(cfg));
  return std::move(*simulate(c, src, time_stepping(cfg), rec).slices);
}

FreqSlices reverse_continue(const SurfaceGather& d_scat, const ScalarField& c, const ExperimentConfig& cfg) {
  const SurfaceGather src = apply_fm(d_scat, fm_params(cfg, c));
  RecordRequest rec;
  rec.freq = zone_request(cfg);
  return std::move(*simulate_reverse(c, cfg.surface_row(), src, time_stepping(cfg), rec).slices);
}

ImageResult image_ratio(const FreqSlices& g_hat, const FreqSlices& u_r, const ScalarField& c,
                        const ImagingBand& band, double epsilon) {
  check_pair(g_hat, u_r);
  check_band(g_hat, band);
  if (!c.grid().same_as(g_hat.grid)) throw GeometryError("velocity must live on the slice grid");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  const Grid2D& grid = g_hat.grid;
  const double h = grid.dx();
  ImageResult res{ScalarField(grid), ImagingCondition::ratio, band.freqs, epsilon, false};

  for (std::size_t m = 0; m < band.size(); ++m) {
    const double W = band.weights[m];
    if (W == 0.0) continue;
    const double om = 2.0 * kPi * band.freqs[m];
    const ComplexField& g = g_hat.slices[m];
    const ComplexField& u = u_r.slices[m];
    double gmax = 0.0;
    for (const cd& v : g.data()) gmax = std::max(gmax, std::norm(v));
    const double floor = epsilon * gmax;
    const cd pre = W * 2.0 * band.df / cd(0.0, om);
    for (std::size_t j = 0; j < grid.nx2(); ++j)
      for (std::size_t i = 0; i < grid.nx1(); ++i) {
        const cd gc = std::conj(g(i, j));
        const double den = std::norm(gc) + floor;
        if (den == 0.0) continue;
        const double cc = c(i, j) * c(i, j) / (om * om);
        const cd grad = std::conj(d1(g, i, j, h)) * d1(u, i, j, h) + std::conj(d2(g, i, j, h)) * d2(u, i, j, h);
        res.image(i, j) += (pre * (gc * u(i, j) - cc * grad) / den).real();
      }
  }
  return res;
}

ImageResult image_excitation(const FreqSlices& u_r, const GoFields& go, const ScalarField& c,
                             const ImagingBand& band, const std::vector<cd>& wavelet) {
  check_band(u_r, band);
  const Grid2D& grid = u_r.grid;
  if (!go.T.grid().same_as(grid) || !c.grid().same_as(grid))
    throw GeometryError("ray fields and velocity must live on the slice grid");
  if (wavelet.size() != band.size()) throw GeometryError("wavelet spectrum and band differ in size");
  const double h = grid.dx();
  ImageResult res{ScalarField(grid), ImagingCondition::excitation, band.freqs, 0.0, true};

  for (std::size_t m = 0; m < band.size(); ++m) {
    const double W = band.weights[m];
    if (W == 0.0) continue;
    if (std::abs(wavelet[m]) == 0.0) throw ConfigError("wavelet spectrum vanishes inside the band");
    const double om = 2.0 * kPi * band.freqs[m];
    const cd iw(0.0, om);
    // principal branch of (i w)^(-3/2) for w > 0
    const cd branch = std::polar(std::pow(om, -1.5), -0.75 * kPi);
    const cd pre = W * 2.0 * band.df * branch / wavelet[m];
    const ComplexField& u = u_r.slices[m];
    for (std::size_t j = 0; j < grid.nx2(); ++j)
      for (std::size_t i = 0; i < grid.nx1(); ++i) {
        const double A = go.A(i, j);
        if (go.shadow(i, j) || !(A > 0.0) || !std::isfinite(A)) continue;
        const cd dn = go.n1(i, j) * d1(u, i, j, h) + go.n2(i, j) * d2(u, i, j, h);
        const cd v = (iw * u(i, j) + c(i, j) * dn) / A;
        res.image(i, j) += (pre * v * std::polar(1.0, om * go.T(i, j))).real();
      }
  }
  return res;
}

ImageResult image_xcorr(const FreqSlices& g_hat, const FreqSlices& u_r, const ImagingBand& band) {
  check_pair(g_hat, u_r);
  check_band(g_hat, band);
  const Grid2D& grid = g_hat.grid;
  ImageResult res{ScalarField(grid), ImagingCondition::xcorr_baseline, band.freqs, 0.0, false};
  // no Omega: every slice counts fully
  for (std::size_t m = 0; m < band.size(); ++m) {
    const auto& g = g_hat.slices[m].data();
    const auto& u = u_r.slices[m].data();
    for (std::size_t k = 0; k < g.size(); ++k)
      res.image[k] += 2.0 * band.df * (std::conj(g[k]) * u[k]).real();
  }
  return res;
}

GoFields crop(const GoFields& go, const IndexBox& box) {
  return {crop_field(go.T, box),        crop_field(go.A, box),         crop_field(go.n1, box),
          crop_field(go.n2, box),       crop_field(go.caustic, box),   crop_field(go.multipath, box),
          crop_field(go.shadow, box)};
}

double low_wavenumber_fraction(const ScalarField& image, double k_min) {
  const Grid2D& g = image.grid();
  detail::FftPlan fft(g.nx2(), g.nx1(), FFTW_FORWARD);
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i) fft(j, i) = image(i, j);
  fft.execute();
  const double dk1 = 2.0 * kPi / (static_cast<double>(g.nx1()) * g.dx());
  const double dk2 = 2.0 * kPi / (static_cast<double>(g.nx2()) * g.dx());
  double low = 0.0, total = 0.0;
  for (std::size_t a = 0; a < g.nx2(); ++a)
    for (std::size_t b = 0; b < g.nx1(); ++b) {
      const double k = std::hypot(dk1 * static_cast<double>(detail::fft_index(b, g.nx1())),
                                  dk2 * static_cast<double>(detail::fft_index(a, g.nx2())));
      const double e = std::norm(fft(a, b));
      total += e;
      if (k < k_min) low += e;
    }
  return total > 0.0 ? low / total : 0.0;
}

double min_reflectivity_wavenumber(const ImagingBand& band, const ScalarField& c) {
  double cmax = 0.0;
  for (double v : c.data()) cmax = std::max(cmax, v);
  return 2.0 * 2.0 * kPi * band.freqs.front() / cmax;
}

double ApertureMap::coverage(std::size_t i, std::size_t j) const {
  double best = 0.0;
  for (std::size_t d = 0; d < dips_deg.size(); ++d) best = std::max(best, at(i, j, d));
  return best;
}

bool ApertureMap::dip_range(std::size_t i, std::size_t j, double threshold, double& lo, double& hi) const {
  const std::size_t n = dips_deg.size();
  std::size_t best = n;
  for (std::size_t d = 0; d < n; ++d)
    if (at(i, j, d) >= threshold && (best == n || at(i, j, d) > at(i, j, best))) best = d;
  if (best == n) return false;
  std::size_t a = best, b = best;
  while (a > 0 && at(i, j, a - 1) >= threshold) --a;
  while (b + 1 < n && at(i, j, b + 1) >= threshold) ++b;
  lo = dips_deg[a];
  hi = dips_deg[b];
  return true;
}

ApertureMap predict_aperture(const IndexBox& zone, const GoFields& go, const ScalarField& c,
                             const ArraySpec& array, double t_max, std::size_t stride, std::size_t ndips) {
  if (stride < 1 || ndips < 1) throw ConfigError("aperture sampling needs stride >= 1 and at least one dip");
  const Grid2D& g = go.T.grid();
  const std::size_t n1 = (zone.n1 - 1) / stride + 1;
  const std::size_t n2 = (zone.n2 - 1) / stride + 1;
  ApertureMap map;
  map.cells = Grid2D(n1, n2, g.dx() * static_cast<double>(stride),
                     {g.x1(zone.i0), g.x2(zone.j0)});
  for (std::size_t d = 0; d < ndips; ++d)
    map.dips_deg.push_back(-90.0 + 180.0 * static_cast<double>(d) / static_cast<double>(ndips));
  map.mask.assign(n1 * n2 * ndips, 0.0);
  map.shadow = MaskField(map.cells);
  map.multipath = MaskField(map.cells);
  const VelocityInterpolator interp(c);
  for (std::size_t b = 0; b < n2; ++b)
    for (std::size_t a = 0; a < n1; ++a) {
      const std::size_t i = zone.i0 + a * stride;
      const std::size_t j = zone.j0 + b * stride;
      map.shadow(a, b) = go.shadow(i, j);
      map.multipath(a, b) = go.multipath(i, j);
      const Vec2 z{g.x1(i), g.x2(j)};
      for (std::size_t d = 0; d < ndips; ++d) {
        const double al = map.dips_deg[d] * kPi / 180.0;
        // normal of a reflector dipping by al from horizontal
        const Vec2 zeta{-std::sin(al), std::cos(al)};
        map.mask[(b * n1 + a) * ndips + d] = resolution_mask(z, zeta, go, interp, array, t_max);
      }
    }
  return map;
}

}  // namespace rtms

#include "rtms/fdsolver.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rtms {

double ricker(double t, double f_peak) {
  const double a = std::numbers::pi * f_peak * t;
  const double a2 = a * a;
  return (1.0 - 2.0 * a2) * std::exp(-a2);
}

std::vector<double> ricker_series(std::size_t nt, double dt, double f_peak, double delay) {
  std::vector<double> w(nt);
  for (std::size_t k = 0; k < nt; ++k) w[k] = ricker(static_cast<double>(k) * dt - delay, f_peak);
  return w;
}

Sponge::Sponge(const Grid2D& grid, std::size_t width, double strength)
    : width_(width), strength_(strength), f1_(grid.nx1(), 1.0), f2_(grid.nx2(), 1.0) {
  if (strength < 0.0) throw ConfigError("sponge strength must be nonnegative");
  if (width == 0) return;
  const double W = static_cast<double>(width);
  auto fill = [&](std::vector<double>& f) {
    const std::size_t n = f.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t edge = std::min(k, n - 1 - k);
      if (edge >= width) continue;
      const double depth = W - static_cast<double>(edge);  // 0 at the inner edge
      const double sigma = strength * W * 0.5 * (1.0 - std::cos(std::numbers::pi * depth / W));
      f[k] = std::exp(-sigma);
    }
  };
  fill(f1_);
  fill(f2_);
}

void Sponge::apply(ScalarField& u) const {
  if (!active()) return;
  const Grid2D& g = u.grid();
  for (std::size_t j = 0; j < g.nx2(); ++j) {
    const bool row_damped = f2_[j] != 1.0;
    for (std::size_t i = 0; i < g.nx1(); ++i)
      if (row_damped || f1_[i] != 1.0) u(i, j) *= f1_[i] * f2_[j];
  }
}

PointSource::PointSource(const Grid2D& grid, Vec2 location, std::vector<double> signature)
    : cell_(grid.nearest(location)), scale_(1.0 / (grid.dx() * grid.dx())), w_(std::move(signature)) {
  index_ = grid.index(cell_.i, cell_.j);
}

void PointSource::forcing(std::size_t k, std::vector<Injection>& out) {
  if (k < w_.size() && w_[k] != 0.0) out.push_back({index_, w_[k] * scale_});
}

SurfaceLineSource::SurfaceLineSource(const Grid2D& grid, std::size_t row, const SurfaceGather& data,
                                     bool reversed)
    : row_(row), scale_(1.0 / grid.dx()), reversed_(reversed), data_(data) {
  if (row >= grid.nx2()) throw GeometryError("source row outside grid");
  if (std::abs(data.dx_rec - grid.dx()) > 1e-9 * grid.dx())
    throw GeometryError("receiver spacing must equal the grid spacing");
  const double fi = grid.fi(data.x1_first);
  const double r = std::round(fi);
  if (std::abs(fi - r) > 1e-6 || r < 0.0 || r + static_cast<double>(data.nrec) > static_cast<double>(grid.nx1()))
    throw GeometryError("gather receivers do not lie on grid columns");
  i_first_ = static_cast<std::size_t>(r) + row_ * grid.nx1();
}

void SurfaceLineSource::forcing(std::size_t k, std::vector<Injection>& out) {
  if (k >= data_.nt) return;
  const std::size_t kk = reversed_ ? data_.nt - 1 - k : k;
  for (std::size_t r = 0; r < data_.nrec; ++r) {
    const double v = data_.at(kk, r);
    if (v != 0.0) out.push_back({i_first_ + r, v * scale_});
  }
}

Propagator::Propagator(const ScalarField& c, double dt, Sponge sponge)
    : c_(c), cdt2_(c.grid()), c2dt2_(c.grid()), dt_(dt), sponge_(std::move(sponge)), next_(c.grid()) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double inv12dx2 = 1.0 / (12.0 * c.grid().dx() * c.grid().dx());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double cdt = c[k] * dt;
    cdt2_[k] = cdt * cdt * inv12dx2;
    c2dt2_[k] = cdt * cdt;
  }
}

double laplacian4(const ScalarField& u, std::size_t i, std::size_t j) noexcept {
  const double inv = 1.0 / (12.0 * u.grid().dx() * u.grid().dx());
  const double a = -u(i - 2, j) + 16.0 * u(i - 1, j) - 30.0 * u(i, j) + 16.0 * u(i + 1, j) - u(i + 2, j);
  const double b = -u(i, j - 2) + 16.0 * u(i, j - 1) - 30.0 * u(i, j) + 16.0 * u(i, j + 1) - u(i, j + 2);
  return (a + b) * inv;
}

void Propagator::step(WavefieldState& s, std::span<const Injection> f) const {
  const Grid2D& g = grid();
  const std::size_t n1 = g.nx1();
  const std::size_t n2 = g.nx2();
  const double* u = s.u_curr.data().data();
  const double* up = s.u_prev.data().data();
  const double* k2 = cdt2_.data().data();
  double* un = next_.data().data();

  double guard = 0.0;
  for (std::size_t j = 2; j + 2 < n2; ++j) {
    const std::size_t row = j * n1;
    for (std::size_t i = 2; i + 2 < n1; ++i) {
      const std::size_t k = row + i;
      const double lap = -u[k - 2] + 16.0 * u[k - 1] + 16.0 * u[k + 1] - u[k + 2] - u[k - 2 * n1] +
                         16.0 * u[k - n1] + 16.0 * u[k + n1] - u[k + 2 * n1] - 60.0 * u[k];
      const double v = 2.0 * u[k] - up[k] + k2[k] * lap;
      un[k] = v;
      guard += v;
    }
  }
  for (const Injection& inj : f) {
    const double v = c2dt2_[inj.index] * inj.value;
    un[inj.index] += v;
    guard += v;
  }
  if (!std::isfinite(guard)) throw InstabilityError("non-finite wavefield", s.step + 1);

  sponge_.apply(next_);
  // u_prev takes the damped current level, u_curr the new one
  std::swap(s.u_prev, s.u_curr);
  sponge_.apply(s.u_prev);
  std::swap(s.u_curr, next_);
  ++s.step;
}

FreqAccumulator::FreqAccumulator(const Grid2D& full, IndexBox box, std::vector<double> freqs,
                                 double dt, std::size_t stride)
    : box_(box), dt_(dt), stride_(stride) {
  if (stride == 0) throw ConfigError("DFT stride must be positive");
  if (box.i0 + box.n1 > full.nx1() || box.j0 + box.n2 > full.nx2() || box.n1 == 0 || box.n2 == 0)
    throw GeometryError("frequency box exceeds grid");
  out_.freqs = std::move(freqs);
  out_.grid = full.window(box.i0, box.j0, box.n1, box.n2);
  out_.slices.assign(out_.freqs.size(), ComplexField(out_.grid));
}

void FreqAccumulator::add(std::size_t k, const ScalarField& u) {
  if (k % stride_ != 0) return;
  const double t = static_cast<double>(k) * dt_;
  const double w = static_cast<double>(stride_) * dt_;
  for (std::size_t f = 0; f < out_.freqs.size(); ++f) {
    const double om = 2.0 * std::numbers::pi * out_.freqs[f];
    const std::complex<double> ph = std::polar(w, -om * t);
    auto& s = out_.slices[f];
    for (std::size_t j = 0; j < box_.n2; ++j) {
      const double* src = &u(box_.i0, box_.j0 + j);
      std::complex<double>* dst = &s(0, j);
      for (std::size_t i = 0; i < box_.n1; ++i) dst[i] += ph * src[i];
    }
  }
}

FreqSlices FreqAccumulator::take() { return std::move(out_); }

namespace {

void check_receivers(const Grid2D& g, const ReceiverLine& r) {
  if (r.row >= g.nx2() || r.i_first + r.nrec > g.nx1() || r.nrec == 0)
    throw GeometryError("receiver line outside grid");
}

SimulationProducts run(const ScalarField& c, SourceTerm& src, const TimeStepping& ts,
                       const RecordRequest& rec, bool reversed) {
  const Grid2D& g = c.grid();
  if (ts.nt < 1) throw ConfigError("nt must be positive");
  Propagator prop(c, ts.dt, Sponge(g, ts.sponge_width, ts.sponge_strength));
  WavefieldState s(g, ts.dt);

  SimulationProducts out;
  std::optional<FreqAccumulator> acc;
  if (rec.freq) acc.emplace(g, rec.freq->box, rec.freq->freqs, ts.dt, rec.freq->stride);
  if (rec.receivers) {
    check_receivers(g, *rec.receivers);
    out.gather = SurfaceGather(ts.nt, rec.receivers->nrec, ts.dt, g.x1(rec.receivers->i_first), g.dx());
  }

  std::vector<Injection> inj;
  for (std::size_t j = 0; j < ts.nt; ++j) {
    const std::size_t k = reversed ? ts.nt - 1 - j : j;
    if (out.gather) {
      const double* row = &s.u_curr(rec.receivers->i_first, rec.receivers->row);
      for (std::size_t r = 0; r < rec.receivers->nrec; ++r) out.gather->at(k, r) = row[r];
    }
    if (acc) acc->add(k, s.u_curr);
    if (rec.snapshot_every > 0 && j % rec.snapshot_every == 0) {
      out.snapshots.push_back(s.u_curr);
      out.snapshot_steps.push_back(k);
    }
    if (j + 1 == ts.nt) break;
    inj.clear();
    src.forcing(j, inj);
    prop.step(s, inj);
  }
  if (acc) out.slices = acc->take();
  return out;
}

}  // namespace

SimulationProducts simulate(const ScalarField& c, SourceTerm& src, const TimeStepping& ts,
                            const RecordRequest& rec) {
  return run(c, src, ts, rec, false);
}

SimulationProducts simulate_reverse(const ScalarField& c, std::size_t row, const SurfaceGather& data,
                                    const TimeStepping& ts, const RecordRequest& rec) {
  if (data.nt != ts.nt) throw GeometryError("gather length differs from nt");
  if (std::abs(data.dt - ts.dt) > 1e-12 * ts.dt) throw GeometryError("gather dt differs from dt");
  SurfaceLineSource src(c.grid(), row, data, true);
  return run(c, src, ts, rec, true);
}

}  // namespace rtms

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rtms/gather.hpp"
#include "rtms/grid.hpp"

namespace rtms {

/// (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2).
double ricker(double t, double f_peak);

/// Samples ricker(k dt - delay) for k = 0..nt-1.
std::vector<double> ricker_series(std::size_t nt, double dt, double f_peak, double delay);

/// Multiplicative absorbing frame. Cells n steps into a frame of width W are damped by
/// exp(-sigma(n)) per time step, sigma(n) = strength * W * (1 - cos(pi n / W)) / 2.
class Sponge {
 public:
  Sponge() = default;
  Sponge(const Grid2D& grid, std::size_t width, double strength);

  std::size_t width() const noexcept { return width_; }
  double factor(std::size_t i, std::size_t j) const noexcept { return f1_[i] * f2_[j]; }
  bool active() const noexcept { return width_ > 0 && strength_ > 0.0; }

  void apply(ScalarField& u) const;

 private:
  std::size_t width_ = 0;
  double strength_ = 0.0;
  std::vector<double> f1_;
  std::vector<double> f2_;
};

struct WavefieldState {
  ScalarField u_prev;
  ScalarField u_curr;
  std::size_t step = 0;
  double dt = 0.0;

  WavefieldState() = default;
  WavefieldState(const Grid2D& g, double dt_) : u_prev(g), u_curr(g), dt(dt_) {}
};

/// One forcing sample: f at a flat cell index, already divided by the cell measure.
struct Injection {
  std::size_t index = 0;
  double value = 0.0;
};

/// Right-hand side f of c^-2 u_tt - Laplacian u = f, sampled at t = k dt.
class SourceTerm {
 public:
  virtual ~SourceTerm() = default;
  virtual void forcing(std::size_t k, std::vector<Injection>& out) = 0;
};

/// w(t) delta(x - x_s): injects w_k / dx^2 at one cell.
class PointSource final : public SourceTerm {
 public:
  PointSource(const Grid2D& grid, Vec2 location, std::vector<double> signature);
  void forcing(std::size_t k, std::vector<Injection>& out) override;
  CellIndex cell() const noexcept { return cell_; }

 private:
  std::size_t index_;
  CellIndex cell_;
  double scale_;
  std::vector<double> w_;
};

/// delta(x2) d(x1, t) on the receiver row: injects d / dx per receiver cell.
/// With `reversed`, forcing(k) returns the sample at time index nt-1-k.
class SurfaceLineSource final : public SourceTerm {
 public:
  SurfaceLineSource(const Grid2D& grid, std::size_t row, const SurfaceGather& data, bool reversed);
  void forcing(std::size_t k, std::vector<Injection>& out) override;

 private:
  std::size_t row_;
  std::size_t i_first_;
  double scale_;
  bool reversed_;
  const SurfaceGather& data_;
};

/// (2,4) leapfrog stepper for a fixed velocity model.
class Propagator {
 public:
  Propagator(const ScalarField& c, double dt, Sponge sponge);

  const Grid2D& grid() const noexcept { return c_.grid(); }
  double dt() const noexcept { return dt_; }
  const ScalarField& velocity() const noexcept { return c_; }

  /// Advances u_curr to the next time level. Forcing is evaluated at the current level.
  /// Throws InstabilityError when non-finite values appear.
  void step(WavefieldState& s, std::span<const Injection> f) const;

 private:
  ScalarField c_;
  ScalarField cdt2_;
  ScalarField c2dt2_;
  double dt_;
  Sponge sponge_;
  mutable ScalarField next_;
};

/// Receivers on every cell of one grid row from i_first, nrec cells wide.
struct ReceiverLine {
  std::size_t row = 0;
  std::size_t i_first = 0;
  std::size_t nrec = 0;
};

/// Temporal Fourier coefficients on a sub-box, positive frequencies only:
/// u_hat(x, w) = sum_k u(x, k dt) exp(-i w k dt) dt.
struct FreqSlices {
  std::vector<double> freqs;  // Hz
  Grid2D grid;                // the sub-box as a grid
  std::vector<ComplexField> slices;

  std::size_t nfreq() const noexcept { return freqs.size(); }
};

/// Accumulates FreqSlices while stepping. With stride m only every m-th sample is used,
/// weighted by m dt.
class FreqAccumulator {
 public:
  FreqAccumulator(const Grid2D& full, IndexBox box, std::vector<double> freqs, double dt,
                  std::size_t stride = 1);

  /// Adds u, which is the field at physical time index k.
  void add(std::size_t k, const ScalarField& u);
  FreqSlices take();

 private:
  IndexBox box_;
  double dt_;
  std::size_t stride_;
  FreqSlices out_;
};

struct TimeStepping {
  double dt = 0.001;
  std::size_t nt = 1000;
  std::size_t sponge_width = 50;
  double sponge_strength = 0.0015;
};

struct FreqRequest {
  std::vector<double> freqs;
  IndexBox box;
  std::size_t stride = 1;
};

struct RecordRequest {
  std::optional<ReceiverLine> receivers;
  std::optional<FreqRequest> freq;
  std::size_t snapshot_every = 0;  // 0 disables snapshots
};

struct SimulationProducts {
  std::optional<SurfaceGather> gather;
  std::optional<FreqSlices> slices;
  std::vector<ScalarField> snapshots;
  std::vector<std::size_t> snapshot_steps;
};

/// Forward run from rest: u_0 = u_{-1} = 0, records u_k for k = 0..nt-1.
SimulationProducts simulate(const ScalarField& c, SourceTerm& src, const TimeStepping& ts,
                            const RecordRequest& rec);

/// Time-reversed run driven by a surface gather. Loop step j holds the field at physical time
/// (nt-1-j) dt; slices and snapshots are labelled with physical time indices.
SimulationProducts simulate_reverse(const ScalarField& c, std::size_t row, const SurfaceGather& data,
                                    const TimeStepping& ts, const RecordRequest& rec);

/// Applies the fourth-order Laplacian stencil to u at interior cell (i, j).
double laplacian4(const ScalarField& u, std::size_t i, std::size_t j) noexcept;

}  // namespace rtms

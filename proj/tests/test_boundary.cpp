#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rtms/boundary.hpp"

namespace rtms {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

// Naive 2D DFT over (t, x) with the e^{-i w t} e^{-i xi x} convention.
std::vector<cd> dft2(const SurfaceGather& g) {
  std::vector<cd> out(g.nt * g.nrec);
  std::vector<cd> tmp(g.nt * g.nrec);
  for (std::size_t a = 0; a < g.nt; ++a)
    for (std::size_t r = 0; r < g.nrec; ++r) {
      cd s = 0.0;
      for (std::size_t k = 0; k < g.nt; ++k)
        s += g.at(k, r) * std::polar(1.0, -2.0 * kPi * double(a * k % g.nt) / double(g.nt));
      tmp[a * g.nrec + r] = s;
    }
  for (std::size_t a = 0; a < g.nt; ++a)
    for (std::size_t b = 0; b < g.nrec; ++b) {
      cd s = 0.0;
      for (std::size_t r = 0; r < g.nrec; ++r)
        s += tmp[a * g.nrec + r] * std::polar(1.0, -2.0 * kPi * double(b * r % g.nrec) / double(g.nrec));
      out[a * g.nrec + b] = s;
    }
  return out;
}

double signed_bin(std::size_t k, std::size_t n) {
  return k <= n / 2 ? double(k) : double(k) - double(n);
}

SurfaceGather random_bandlimited(std::size_t nt, std::size_t nrec, double dt, double dx, double fmax,
                                 unsigned seed) {
  // sum of random plane waves inside the band
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uf(1.0, fmax), us(-1.0, 1.0), uph(0.0, 2.0 * kPi);
  SurfaceGather g(nt, nrec, dt, 0.0, dx);
  for (int m = 0; m < 40; ++m) {
    const double f = uf(rng);
    const double slow = us(rng) / 2000.0;
    const double ph = uph(rng);
    for (std::size_t k = 0; k < nt; ++k)
      for (std::size_t r = 0; r < nrec; ++r)
        g.at(k, r) += std::cos(2.0 * kPi * f * (k * dt - slow * r * dx) + ph) *
                      std::exp(-std::pow((k * dt - 0.5 * nt * dt) / (0.2 * nt * dt), 2));
  }
  return g;
}

TEST(RemoveDirect, IdenticalGathersGiveZero) {
  SurfaceGather a = random_bandlimited(32, 8, 0.004, 10.0, 30.0, 1);
  const SurfaceGather z = remove_direct(a, a);
  for (double v : z.data) EXPECT_EQ(v, 0.0);
}

TEST(RemoveDirect, RejectsGeometryMismatch) {
  SurfaceGather a(10, 5, 0.001, 0.0, 10.0), b(10, 5, 0.001, 10.0, 10.0), c(11, 5, 0.001, 0.0, 10.0);
  EXPECT_THROW(remove_direct(a, b), GeometryError);
  EXPECT_THROW(remove_direct(a, c), GeometryError);
}

TEST(FmSymbol, ValuesAndSymmetry) {
  const double c = 2000.0;
  const double w = 2.0 * kPi * 12.0;
  EXPECT_NEAR(std::abs(fm_symbol(0.0, w, c, 0.1) - cd(0.0, -2.0 * w / c)), 0.0, 1e-15);
  EXPECT_EQ(fm_symbol(w / c, w, c, 0.1), cd(0.0));
  EXPECT_EQ(fm_symbol(0.96 * w / c, w, c, 0.1), cd(0.0));
  EXPECT_EQ(fm_symbol(0.0, 0.0, c, 0.1), cd(0.0));
  for (double s : {0.1, 0.5, 0.85, 0.92}) {
    const cd a = fm_symbol(s * w / c, w, c, 0.1);
    const cd b = fm_symbol(-s * w / c, -w, c, 0.1);
    EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
  }
  // inside the plateau the symbol is the bare square-root factor
  const double s = 0.6;
  EXPECT_NEAR(std::abs(fm_symbol(s * w / c, w, c, 0.1) - cd(0.0, -2.0 * w / c * std::sqrt(1 - s * s))),
              0.0, 1e-15);
}

TEST(ApplyFm, BinByBinEqualsTabulatedSymbol) {
  const std::size_t nt = 64, nrec = 24;
  const double dt = 0.004, dx = 10.0, c = 2000.0;
  const SurfaceGather in = random_bandlimited(nt, nrec, dt, dx, 40.0, 2);
  FMParams p;
  p.c_surface = c;
  p.array = {0.0, dx * (nrec - 1), 0.0, 0.1};
  p.pad = 1;
  const SurfaceGather out = apply_fm(in, p);
  const auto A = dft2(in);
  const auto B = dft2(out);
  double peak = 0.0;
  for (const cd& v : A) peak = std::max(peak, std::abs(v));
  for (std::size_t a = 0; a < nt; ++a) {
    if (a == nt / 2) continue;  // temporal Nyquist row is zeroed to keep the output real
    const double w = 2.0 * kPi * signed_bin(a, nt) / (nt * dt);
    for (std::size_t b = 0; b < nrec; ++b) {
      const double xi = 2.0 * kPi * signed_bin(b, nrec) / (nrec * dx);
      const cd expect = A[a * nrec + b] * fm_symbol(xi, w, c, 0.1);
      EXPECT_LE(std::abs(B[a * nrec + b] - expect), 1e-10 * peak * 2.0 * (kPi / dt) / c)
          << a << " " << b;
    }
  }
}

TEST(ApplyFm, VerticalPlaneWaveIsScaledByMinusTwoIOmegaOverC) {
  const std::size_t nt = 200, nrec = 16;
  const double dt = 0.002, dx = 10.0, c = 1800.0;
  const double f0 = 10.0 / (nt * dt) * 4.0;  // exactly on a bin
  const double w0 = 2.0 * kPi * f0;
  SurfaceGather in(nt, nrec, dt, 100.0, dx);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t r = 0; r < nrec; ++r) in.at(k, r) = std::cos(w0 * k * dt);
  FMParams p;
  p.c_surface = c;
  p.array = {100.0, 100.0 + dx * (nrec - 1), 0.0, 0.1};
  p.pad = 1;
  const SurfaceGather out = apply_fm(in, p);
  // -2 i w / c applied to cos(w t) is (2 w / c) sin(w t)
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t r = 0; r < nrec; ++r)
      EXPECT_NEAR(out.at(k, r), 2.0 * w0 / c * std::sin(w0 * k * dt), 1e-6 * 2.0 * w0 / c);
}

TEST(ApplyFm, LinearAndReal) {
  const SurfaceGather a = random_bandlimited(80, 20, 0.004, 10.0, 40.0, 3);
  const SurfaceGather b = random_bandlimited(80, 20, 0.004, 10.0, 40.0, 4);
  SurfaceGather ab = a;
  for (std::size_t k = 0; k < ab.data.size(); ++k) ab.data[k] = 2.0 * a.data[k] - 3.0 * b.data[k];
  FMParams p;
  p.array = {0.0, 190.0, 0.2, 0.1};
  const auto fa = apply_fm(a, p), fb = apply_fm(b, p), fab = apply_fm(ab, p);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < fab.data.size(); ++k) {
    const double d = fab.data[k] - (2.0 * fa.data[k] - 3.0 * fb.data[k]);
    num += d * d;
    den += fab.data[k] * fab.data[k];
  }
  EXPECT_LE(std::sqrt(num / den), 1e-12);
}

TEST(ApplyFm, CommutesWithTimeShiftForInteriorSupport) {
  const std::size_t nt = 400, nrec = 40;
  const double dt = 0.002, dx = 10.0;
  auto event = [&](double t0) {
    SurfaceGather g(nt, nrec, dt, 0.0, dx);
    for (std::size_t k = 0; k < nt; ++k)
      for (std::size_t r = 0; r < nrec; ++r) {
        const double t = k * dt - t0 - std::hypot(200.0, r * dx - 200.0) / 2000.0;
        g.at(k, r) = (1 - 2 * std::pow(kPi * 15 * t, 2)) * std::exp(-std::pow(kPi * 15 * t, 2));
      }
    return g;
  };
  FMParams p;
  p.array = {0.0, 390.0, 0.15, 0.1};
  const auto a = apply_fm(event(0.25), p);
  const auto b = apply_fm(event(0.25 + 20 * dt), p);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k + 20 < nt; ++k)
    for (std::size_t r = 0; r < nrec; ++r) {
      const double d = b.at(k + 20, r) - a.at(k, r);
      num += d * d;
      den += a.at(k, r) * a.at(k, r);
    }
  EXPECT_LE(std::sqrt(num / den), 1e-6);
}

TEST(ApplyFm, NoEnergyOutsideTaperAndMute) {
  // receivers extend beyond the array; an event arriving after the direct wave
  const std::size_t nt = 500, nrec = 121;
  const double dt = 0.002, dx = 10.0, c = 2000.0;
  SurfaceGather g(nt, nrec, dt, -600.0, dx);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t r = 0; r < nrec; ++r) {
      const double x = g.receiver_x1(r);
      const double t = k * dt - 0.12 - std::hypot(800.0, x) / c;
      g.at(k, r) = (1 - 2 * std::pow(kPi * 12 * t, 2)) * std::exp(-std::pow(kPi * 12 * t, 2));
    }
  FMParams p;
  p.c_surface = c;
  p.array = {-400.0, 400.0, 0.15, 0.1};
  p.mute = true;
  p.source = {0.0, 0.0};
  p.source_delay = 0.12;
  p.mute_window = 0.05;
  const auto out = apply_fm(g, p);
  // energy outside the array, relative to the total, and exact zeros inside the mute
  double outside = 0.0, total = 0.0;
  for (std::size_t r = 0; r < nrec; ++r) {
    const double x = out.receiver_x1(r);
    const double t_mute = std::abs(x) / c + 0.12 + 0.05;
    for (std::size_t k = 0; k < nt; ++k) {
      const double e = out.at(k, r) * out.at(k, r);
      total += e;
      if (x < -400.0 || x > 400.0) outside += e;
      if (k * dt <= t_mute) EXPECT_EQ(out.at(k, r), 0.0);
    }
  }
  EXPECT_LE(10.0 * std::log10(outside / total), -40.0);
}

TEST(ApplyFm, RejectsAliasedBand) {
  SurfaceGather g(64, 16, 0.004, 0.0, 10.0);
  FMParams p;
  p.array = {0.0, 150.0, 0.1, 0.1};
  p.f_max = 130.0;
  EXPECT_THROW(apply_fm(g, p), ConfigError);
  p.f_max = 110.0;  // temporal Nyquist 125 Hz, spatial 2000 / 20 = 100 Hz
  EXPECT_THROW(apply_fm(g, p), ConfigError);
  p.f_max = 90.0;
  EXPECT_NO_THROW(apply_fm(g, p));
}

}  // namespace
}  // namespace rtms

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rtms/fdsolver.hpp"
#include "rtms/model.hpp"

namespace rtms {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Ricker, PeakIsOneAndEven) {
  EXPECT_DOUBLE_EQ(ricker(0.0, 15.0), 1.0);
  for (double t : {0.001, 0.01, 0.03, 0.1}) EXPECT_DOUBLE_EQ(ricker(t, 15.0), ricker(-t, 15.0));
}

TEST(Ricker, ZeroCrossing) {
  const double t0 = 1.0 / (std::sqrt(2.0) * kPi * 15.0);
  EXPECT_NEAR(t0, 0.015005, 1e-6);
  EXPECT_NEAR(ricker(t0, 15.0), 0.0, 1e-14);
  EXPECT_GT(ricker(t0 - 1e-4, 15.0), 0.0);
  EXPECT_LT(ricker(t0 + 1e-4, 15.0), 0.0);
}

TEST(Sponge, ProfileIsOneInsideAndDecaysOutward) {
  Grid2D g(120, 100, 10.0);
  Sponge s(g, 20, 0.0015);
  EXPECT_DOUBLE_EQ(s.factor(60, 50), 1.0);
  EXPECT_DOUBLE_EQ(s.factor(20, 50), 1.0);
  EXPECT_LT(s.factor(19, 50), 1.0);
  EXPECT_NEAR(s.factor(0, 50), std::exp(-0.0015 * 20.0), 1e-15);
  for (std::size_t i = 1; i < 20; ++i) EXPECT_LT(s.factor(i - 1, 50), s.factor(i, 50));
}

struct HomogeneousRun {
  double dx;
  double dt;
  std::vector<double> trace;
  std::vector<double> oracle;
};

// Point Ricker source at the origin in c = 2000 m/s, receiver 400 m away along x1.
HomogeneousRun homogeneous_trace(double dx, double dt) {
  const double c = 2000.0;
  const double fp = 10.0;
  const double delay = 0.15;
  const double half = 1200.0;
  const std::size_t n = static_cast<std::size_t>(std::lround(2.0 * half / dx)) + 1;
  Grid2D g(n, n, dx, {-half, -half});
  ScalarField vel = build_gradient_model(g, c, 0.0);
  const std::size_t nt = static_cast<std::size_t>(std::lround(0.55 / dt)) + 1;
  PointSource src(g, {0.0, 0.0}, ricker_series(nt, dt, fp, delay));

  const auto rc = g.nearest({400.0, 0.0});
  RecordRequest rec;
  rec.receivers = ReceiverLine{rc.j, rc.i, 1};
  TimeStepping ts{dt, nt, 50, 0.0015};
  const auto out = simulate(vel, src, ts, rec);

  HomogeneousRun r{dx, dt, out.gather->trace(0), {}};
  auto w = [&](double t) { return ricker(t - delay, fp); };
  r.oracle.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) r.oracle[k] = test::green2d_trace(w, 400.0, c, k * dt);
  return r;
}

TEST(Simulate, MatchesGreenFunctionQuadratureAtEightPointsPerWavelength) {
  // shortest significant wavelength 2000 / 25 Hz = 80 m = 8 cells
  for (double dt : {0.001, 0.002}) {
    const auto r = homogeneous_trace(10.0, dt);
    EXPECT_LE(test::rel_l2(r.trace, r.oracle), 0.03) << "dt " << dt;
  }
}

TEST(Simulate, JointRefinementReducesErrorByThree) {
  // Courant 0.4: the second-order time error dominates the fourth-order space error
  const auto coarse = homogeneous_trace(10.0, 0.002);
  const auto fine = homogeneous_trace(5.0, 0.001);
  std::vector<double> fine_sub(coarse.trace.size());
  for (std::size_t k = 0; k < fine_sub.size(); ++k) fine_sub[k] = fine.trace[2 * k];
  const double e0 = test::rel_l2(coarse.trace, coarse.oracle);
  const double e1 = test::rel_l2(fine_sub, coarse.oracle);
  EXPECT_GE(e0 / e1, 3.0) << "coarse " << e0 << " fine " << e1;
}

TEST(Simulate, ZeroSourceStaysZero) {
  Grid2D g(40, 40, 10.0);
  ScalarField c = build_gradient_model(g, 2000.0, 0.0);
  PointSource src(g, {200.0, 200.0}, std::vector<double>(50, 0.0));
  RecordRequest rec;
  rec.snapshot_every = 49;
  const auto out = simulate(c, src, {0.001, 50, 5, 0.0015}, rec);
  ASSERT_EQ(out.snapshots.size(), 2u);
  EXPECT_EQ(max_abs(out.snapshots.back().values()), 0.0);
}

TEST(Simulate, LinearInTheSource) {
  Grid2D g(80, 80, 10.0);
  ScalarField c = build_gradient_model(g, 1800.0, 0.8);
  const std::size_t nt = 300;
  auto w1 = ricker_series(nt, 0.001, 12.0, 0.1);
  auto w2 = ricker_series(nt, 0.001, 7.0, 0.15);
  std::vector<double> w12(nt);
  for (std::size_t k = 0; k < nt; ++k) w12[k] = 2.0 * w1[k] - 0.5 * w2[k];
  RecordRequest rec;
  rec.receivers = ReceiverLine{25, 10, 60};
  TimeStepping ts{0.001, nt, 15, 0.0015};
  PointSource s1(g, {300.0, 400.0}, w1), s2(g, {300.0, 400.0}, w2), s12(g, {300.0, 400.0}, w12);
  const auto a = simulate(c, s1, ts, rec).gather->data;
  const auto b = simulate(c, s2, ts, rec).gather->data;
  const auto ab = simulate(c, s12, ts, rec).gather->data;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = ab[k] - (2.0 * a[k] - 0.5 * b[k]);
    num += d * d;
    den += ab[k] * ab[k];
  }
  EXPECT_LE(std::sqrt(num / den), 1e-12);
}

TEST(Simulate, ReciprocityInConstantVelocity) {
  Grid2D g(100, 100, 10.0);
  ScalarField c = build_gradient_model(g, 2000.0, 0.0);
  const std::size_t nt = 500;
  const auto w = ricker_series(nt, 0.001, 10.0, 0.12);
  const Vec2 A{250.0, 300.0};
  const Vec2 B{700.0, 620.0};
  TimeStepping ts{0.001, nt, 20, 0.0015};
  auto run = [&](Vec2 s, Vec2 r) {
    PointSource src(g, s, w);
    const auto rc = g.nearest(r);
    RecordRequest rec;
    rec.receivers = ReceiverLine{rc.j, rc.i, 1};
    return simulate(c, src, ts, rec).gather->trace(0);
  };
  const auto ab = run(A, B);
  const auto ba = run(B, A);
  EXPECT_LE(test::rel_l2(ab, ba), 1e-6);
}

double discrete_energy(const ScalarField& u, const ScalarField& up, const ScalarField& c, double dt,
                       const IndexBox& box) {
  // kinetic term at the half step plus the potential averaged over both levels
  const double dx = u.grid().dx();
  double e = 0.0;
  for (std::size_t j = box.j0; j < box.j0 + box.n2; ++j) {
    for (std::size_t i = box.i0; i < box.i0 + box.n1; ++i) {
      const double v = (u(i, j) - up(i, j)) / dt;
      auto grad2 = [&](const ScalarField& f) {
        const double g1 = (f(i + 1, j) - f(i - 1, j)) / (2.0 * dx);
        const double g2 = (f(i, j + 1) - f(i, j - 1)) / (2.0 * dx);
        return g1 * g1 + g2 * g2;
      };
      e += v * v / (c(i, j) * c(i, j)) + 0.5 * (grad2(u) + grad2(up));
    }
  }
  return e;
}

TEST(Simulate, InteriorEnergyConservedBeforeSpongeContact) {
  const double dx = 10.0;
  const double dt = 0.0005;
  Grid2D g(301, 301, dx, {-1500.0, -1500.0});
  ScalarField c = build_gradient_model(g, 2000.0, 0.0);
  const std::size_t nt = 1500;
  // the pulse is over by t = 0.2 s; its front (onset 0.03 s) reaches the box edge at 980 m near 0.52 s
  PointSource src(g, {0.0, 0.0}, ricker_series(nt, dt, 15.0, 0.1));
  RecordRequest rec;
  rec.snapshot_every = 1;
  const auto out = simulate(c, src, {dt, nt, 50, 0.0015}, rec);
  const IndexBox interior{52, 52, 197, 197};
  std::vector<double> e;
  for (std::size_t k = 420; k <= 1000; k += 20)
    e.push_back(discrete_energy(out.snapshots[k], out.snapshots[k - 1], c, dt, interior));
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  EXPECT_LE((*hi - *lo) / *hi, 0.005);
}

TEST(FreqAccumulator, SinusoidMatchesAnalyticDft) {
  Grid2D g(5, 4, 1.0);
  const double dt = 0.002;
  const std::size_t nt = 700;
  const double f0 = 13.0;
  const std::vector<double> freqs{5.0, 13.0, 21.5};
  FreqAccumulator acc(g, {1, 1, 3, 3}, freqs, dt, 1);
  ScalarField u(g);
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = k * dt;
    for (std::size_t q = 0; q < u.size(); ++q) u[q] = std::sin(2.0 * kPi * f0 * t) * (1.0 + q);
    acc.add(k, u);
  }
  const auto s = acc.take();
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    std::complex<double> ref = 0.0;
    const double om = 2.0 * kPi * freqs[f];
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = k * dt;
      ref += std::sin(2.0 * kPi * f0 * t) * std::exp(std::complex<double>(0.0, -om * t)) * dt;
    }
    const double q = 1.0 + g.index(2, 1);
    EXPECT_LE(std::abs(s.slices[f](1, 0) - q * ref), 1e-10 * std::max(1.0, std::abs(q * ref)));
  }
}

TEST(FreqAccumulator, StrideUsesEveryMthSample) {
  Grid2D g(3, 3, 1.0);
  FreqAccumulator acc(g, {0, 0, 3, 3}, {7.0}, 0.001, 4);
  ScalarField u(g, 1.0);
  for (std::size_t k = 0; k < 16; ++k) acc.add(k, u);
  const auto s = acc.take();
  std::complex<double> ref = 0.0;
  for (std::size_t k = 0; k < 16; k += 4)
    ref += 0.004 * std::exp(std::complex<double>(0.0, -2.0 * kPi * 7.0 * k * 0.001));
  EXPECT_NEAR(std::abs(s.slices[0](1, 1) - ref), 0.0, 1e-15);
}

TEST(Simulate, DiffractorArrivalMatchesTwoLegTraveltime) {
  // Scattered field of a one-cell perturbation, from the difference of two runs, against the
  // Born oracle dx^2 (2 r / c^2) d_t^2 (G2 * G1 * w) built by nested Green quadrature.
  const double dx = 10.0;
  const double dt = 0.001;
  const double c = 2000.0;
  Grid2D g(201, 181, dx, {-1000.0, -600.0});
  ScalarField c0 = build_gradient_model(g, c, 0.0);
  ScalarField c1 = c0;
  const auto d = g.nearest({0.0, 600.0});
  c1(d.i, d.j) = 2020.0;
  const std::size_t nt = 1000;
  const double delay = 0.15;
  const double fp = 10.0;
  const auto w = ricker_series(nt, dt, fp, delay);
  const auto rc = g.nearest({300.0, 0.0});
  RecordRequest rec;
  rec.receivers = ReceiverLine{rc.j, rc.i, 1};
  TimeStepping ts{dt, nt, 50, 0.0015};
  PointSource s0(g, {-300.0, 0.0}, w), s1(g, {-300.0, 0.0}, w);
  const auto a = simulate(c0, s0, ts, rec).gather->trace(0);
  const auto b = simulate(c1, s1, ts, rec).gather->trace(0);
  std::vector<double> sc(nt);
  for (std::size_t k = 0; k < nt; ++k) sc[k] = b[k] - a[k];

  const double leg = std::hypot(300.0, 600.0);
  const double t_leg = leg / c;
  auto h = [&](double t) {
    return test::green2d_trace([&](double s) { return ricker(s - delay, fp); }, leg, c, t);
  };
  std::vector<double> hh(nt + 2);
  std::vector<double> conv(nt + 2);
  for (std::size_t k = 0; k < nt + 2; ++k) hh[k] = h(k * dt);
  for (std::size_t k = 0; k < nt + 2; ++k) {
    const double t = k * dt;
    if (t <= t_leg) continue;
    const double smax = std::acosh(t / t_leg);
    auto f = [&](double s) {
      const double tau = (t - t_leg * std::cosh(s)) / dt;
      const auto k0 = static_cast<std::size_t>(std::max(0.0, std::floor(tau)));
      if (k0 + 1 >= hh.size()) return 0.0;
      const double a0 = tau - static_cast<double>(k0);
      return (1.0 - a0) * hh[k0] + a0 * hh[k0 + 1];
    };
    conv[k] = test::simpson(f, 0.0, smax, 600) / (2.0 * kPi);
  }
  std::vector<double> oracle(nt, 0.0);
  for (std::size_t k = 1; k + 1 < nt; ++k)
    oracle[k] = (conv[k + 1] - 2.0 * conv[k] + conv[k - 1]) / (dt * dt);

  // lag of the crosscorrelation peak
  long best = 0;
  double best_v = -1e300;
  for (long lag = -20; lag <= 20; ++lag) {
    double v = 0.0;
    for (long k = 0; k < static_cast<long>(nt); ++k) {
      const long q = k + lag;
      if (q >= 0 && q < static_cast<long>(nt)) v += sc[q] * oracle[k];
    }
    if (v > best_v) {
      best_v = v;
      best = lag;
    }
  }
  EXPECT_LE(std::abs(best), 2);
  EXPECT_GT(test::correlation(sc, oracle), 0.95);
}

}  // namespace
}  // namespace rtms

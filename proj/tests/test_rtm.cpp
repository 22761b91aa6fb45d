#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "rtms/config.hpp"
#include "rtms/errors.hpp"
#include "rtms/rtm.hpp"

using namespace rtms;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// constant 2000 m/s, surface on row 40, sponge 30 cells
std::string base_text(const std::string& extra) {
  return R"(
[grid]
nx1 = 161
nx2 = 121
dx = 10 m
origin_x1 = -400 m
origin_x2 = -400 m
[velocity]
model = gradient
c0 = 2000 m/s
gradient = 0 1/s
[source]
x1 = 0 m
x2 = 0 m
peak_frequency = 12 Hz
delay = 0.12 s
[time]
dt = 1 ms
nt = 900
dft_stride = 2
[sponge]
width = 30
strength = 0.004
[acquisition]
x1_min = -100 m
x1_max = 900 m
[imaging]
f_lo = 3 Hz
f_hi = 25 Hz
nfreq = 12
band_ramp = 0.2
zone_x1_min = -50 m
zone_x2_min = 10 m
zone_x1_max = 850 m
zone_x2_max = 480 m
)" + extra;
}

ExperimentConfig small_config(const std::string& extra = "") {
  ExperimentConfig cfg = parse_config(base_text(extra));
  validate(cfg);
  return cfg;
}

// wide sponge and deep interior for the source field
const char* kWide = R"(
[grid]
nx1 = 201
nx2 = 201
dx = 10 m
origin_x1 = -1000 m
origin_x2 = -600 m
[velocity]
model = gradient
c0 = 2000 m/s
gradient = 0 1/s
[source]
x1 = 0 m
x2 = 0 m
peak_frequency = 12 Hz
delay = 0.12 s
[time]
dt = 1 ms
nt = 900
dft_stride = 2
[sponge]
width = 60
strength = 0.002
[acquisition]
x1_min = -300 m
x1_max = 300 m
[imaging]
f_lo = 3 Hz
f_hi = 25 Hz
nfreq = 12
band_ramp = 0.2
zone_x1_min = -300 m
zone_x2_min = 10 m
zone_x1_max = 300 m
zone_x2_max = 780 m
)";

const char* kPacket = R"(
[packet.p]
center_x1 = 300 m
center_x2 = 300 m
k1 = 0.02 rad/m
k2 = 0.04 rad/m
width1 = 50 m
width2 = 50 m
amplitude = 0.005
)";

double rel_l2(const std::vector<double>& a, const std::vector<double>& ref) {
  double n = 0.0, d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    n += (a[k] - ref[k]) * (a[k] - ref[k]);
    d += ref[k] * ref[k];
  }
  return std::sqrt(n / d);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

FreqSlices constant_slices(const Grid2D& g, const std::vector<double>& freqs, cd value) {
  FreqSlices s{freqs, g, {}};
  for (std::size_t m = 0; m < freqs.size(); ++m) {
    ComplexField f(g);
    for (cd& v : f.data()) v = value;
    s.slices.push_back(f);
  }
  return s;
}

}  // namespace

TEST(ImagingBand, WeightsRampBetweenZeroEnds) {
  const ImagingBand b = imaging_band(2.0, 24.0, 64, 0.1);
  ASSERT_EQ(b.size(), 64u);
  EXPECT_NEAR(b.df, 22.0 / 63.0, 1e-14);
  EXPECT_EQ(b.weights.front(), 0.0);
  EXPECT_EQ(b.weights.back(), 0.0);
  for (std::size_t m = 0; m < b.size(); ++m) {
    EXPECT_GE(b.weights[m], 0.0);
    EXPECT_LE(b.weights[m], 1.0);
    if (b.freqs[m] >= 2.0 + 2.2 && b.freqs[m] <= 24.0 - 2.2) EXPECT_EQ(b.weights[m], 1.0);
  }
  for (std::size_t m = 1; m < b.size() / 2; ++m) EXPECT_GE(b.weights[m], b.weights[m - 1]);
  for (std::size_t m = b.size() / 2; m + 1 < b.size(); ++m) EXPECT_GE(b.weights[m], b.weights[m + 1]);
}

TEST(ImagingBand, RejectsBadArguments) {
  EXPECT_THROW(imaging_band(0.0, 10.0, 8, 0.1), ConfigError);
  EXPECT_THROW(imaging_band(5.0, 4.0, 8, 0.1), ConfigError);
  EXPECT_THROW(imaging_band(1.0, 4.0, 1, 0.1), ConfigError);
  EXPECT_THROW(imaging_band(1.0, 4.0, 8, 0.7), ConfigError);
}

TEST(Rtm, ZeroContrastGivesZeroGather) {
  const ExperimentConfig cfg = small_config();
  const ScalarField c = build_velocity(cfg);
  const SurfaceGather d = born_data(cfg, c, ScalarField(c.grid()));
  EXPECT_EQ(max_abs(d.data), 0.0);
}

TEST(Rtm, NonlinearAndLinearizedDataAgree) {
  const ExperimentConfig cfg = small_config(kPacket);
  ExperimentConfig lin = cfg;
  lin.born = BornMode::linearized;
  const ScalarField c = build_velocity(cfg);
  const ScalarField r = build_reflectivity(cfg);
  const SurfaceGather a = born_data(cfg, c, r);
  const SurfaceGather b = born_data(lin, c, r);
  ASSERT_TRUE(a.same_geometry(b));
  EXPECT_GT(max_abs(b.data), 0.0);
  EXPECT_LE(rel_l2(a.data, b.data), 0.05);
}

TEST(Rtm, DiffractorMoveoutFollowsTwoLegTraveltime) {
  ExperimentConfig cfg = small_config();
  cfg.born = BornMode::linearized;
  const ScalarField c = build_velocity(cfg);
  ScalarField r(c.grid());
  const CellIndex dcell = c.grid().nearest({300.0, 400.0});
  r(dcell.i, dcell.j) = 0.05;
  const Vec2 xd{c.grid().x1(dcell.i), c.grid().x2(dcell.j)};
  const SurfaceGather d = born_data(cfg, c, r);
  const double v = cfg.velocity.c0;
  const double ts = norm(xd - cfg.source) / v;

  // lag of each trace against the receiver above the diffractor, refined by a parabola
  const std::size_t ref = static_cast<std::size_t>(std::lround((xd.x1 - d.x1_first) / d.dx_rec));
  const std::vector<double> tr = d.trace(ref);
  auto lag_of = [&](const std::vector<double>& t) {
    const int maxlag = 400;
    std::vector<double> cc(2 * maxlag + 1, 0.0);
    for (int L = -maxlag; L <= maxlag; ++L)
      for (std::size_t k = 0; k < t.size(); ++k) {
        const long q = static_cast<long>(k) - L;
        if (q >= 0 && q < static_cast<long>(tr.size())) cc[L + maxlag] += t[k] * tr[q];
      }
    const auto best = static_cast<int>(std::max_element(cc.begin(), cc.end()) - cc.begin());
    double frac = 0.0;
    if (best > 0 && best + 1 < static_cast<int>(cc.size())) {
      const double a = cc[best - 1], b = cc[best], e = cc[best + 1];
      frac = 0.5 * (a - e) / (a - 2.0 * b + e);
    }
    return (best - maxlag + frac) * d.dt;
  };
  std::size_t checked = 0;
  for (std::size_t q = 0; q < d.nrec; q += 5) {
    const double x = d.receiver_x1(q);
    if (std::abs(x - xd.x1) > 450.0) continue;
    const double t_pred = ts + std::hypot(x - xd.x1, xd.x2) / v;
    const double t_ref = ts + xd.x2 / v;
    EXPECT_NEAR(lag_of(d.trace(q)), t_pred - t_ref, 2.0 * d.dt) << "receiver at " << x;
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(Rtm, ReverseContinuationOfZeroIsZero) {
  const ExperimentConfig cfg = small_config();
  const ScalarField c = build_velocity(cfg);
  const ReceiverLine rl = receiver_line(cfg);
  const SurfaceGather zero(cfg.nt, rl.nrec, cfg.dt, c.grid().x1(rl.i_first), c.grid().dx());
  const FreqSlices u = reverse_continue(zero, c, cfg);
  for (const ComplexField& s : u.slices)
    for (const cd& v : s.data()) ASSERT_EQ(v, cd(0.0));
}

TEST(Rtm, ReverseContinuationIsLinear) {
  const ExperimentConfig cfg = small_config();
  const ScalarField c = build_velocity(cfg);
  const ReceiverLine rl = receiver_line(cfg);
  SurfaceGather a(cfg.nt, rl.nrec, cfg.dt, c.grid().x1(rl.i_first), c.grid().dx());
  SurfaceGather b = a, ab = a;
  for (std::size_t k = 0; k < cfg.nt; ++k)
    for (std::size_t q = 0; q < rl.nrec; ++q) {
      const double t = static_cast<double>(k) * cfg.dt;
      a.at(k, q) = std::sin(60.0 * t + 0.01 * static_cast<double>(q)) * std::exp(-std::pow((t - 0.4) / 0.05, 2));
      b.at(k, q) = std::cos(90.0 * t - 0.02 * static_cast<double>(q)) * std::exp(-std::pow((t - 0.5) / 0.04, 2));
      ab.at(k, q) = 3.0 * a.at(k, q) - 2.0 * b.at(k, q);
    }
  const FreqSlices ua = reverse_continue(a, c, cfg);
  const FreqSlices ub = reverse_continue(b, c, cfg);
  const FreqSlices uab = reverse_continue(ab, c, cfg);
  double n = 0.0, d = 0.0;
  for (std::size_t m = 0; m < uab.nfreq(); ++m)
    for (std::size_t k = 0; k < uab.slices[m].size(); ++k) {
      n += std::norm(uab.slices[m][k] - (3.0 * ua.slices[m][k] - 2.0 * ub.slices[m][k]));
      d += std::norm(uab.slices[m][k]);
    }
  EXPECT_GT(d, 0.0);
  EXPECT_LE(std::sqrt(n / d), 1e-12);
}

TEST(Rtm, SourceFieldDecaysAndAdvancesLikeTheClosedForm) {
  const ExperimentConfig cfg = parse_config(kWide);
  validate(cfg);
  const ScalarField c = build_velocity(cfg);
  const FreqSlices g = source_slices(cfg, c);
  const double v = cfg.velocity.c0;
  const std::size_t i = g.grid.nearest({0.0, 100.0}).i;
  for (std::size_t m = 3; m < g.nfreq(); m += 3) {
    const double om = 2.0 * kPi * g.freqs[m];
    std::vector<double> amp, T, phase;
    for (std::size_t j = 0; j < g.grid.nx2(); ++j) {
      const double x2 = g.grid.x2(j);
      if (x2 < std::max(150.0, v / g.freqs[m]) || x2 > 700.0) continue;
      const cd z = g.slices[m](i, j);
      amp.push_back(std::abs(z) * std::sqrt(x2));
      T.push_back(x2 / v);
      phase.push_back(std::arg(z));
    }
    ASSERT_GT(amp.size(), 10u);
    const double mean = [&] {
      double s = 0.0;
      for (double a : amp) s += a;
      return s / static_cast<double>(amp.size());
    }();
    for (double a : amp) EXPECT_NEAR(a / mean, 1.0, 0.05) << "f = " << g.freqs[m];
    for (std::size_t k = 1; k < phase.size(); ++k)
      while (phase[k] - phase[k - 1] > kPi) phase[k] -= 2.0 * kPi;
    for (std::size_t k = 1; k < phase.size(); ++k)
      while (phase[k] - phase[k - 1] < -kPi) phase[k] += 2.0 * kPi;
    // least squares phase = a + b T
    const double nn = static_cast<double>(T.size());
    double st = 0, sp = 0, stt = 0, stp = 0, spp = 0;
    for (std::size_t k = 0; k < T.size(); ++k) {
      st += T[k];
      sp += phase[k];
      stt += T[k] * T[k];
      stp += T[k] * phase[k];
      spp += phase[k] * phase[k];
    }
    const double cov = stp - st * sp / nn, vt = stt - st * st / nn, vp = spp - sp * sp / nn;
    const double r2 = cov * cov / (vt * vp);
    EXPECT_GE(r2, 0.999) << "f = " << g.freqs[m];
    EXPECT_NEAR(cov / vt, -om, 0.02 * om) << "f = " << g.freqs[m];
  }
}

TEST(Rtm, ZeroReceiverFieldGivesZeroImages) {
  const Grid2D g(20, 15, 10.0, {0.0, 10.0});
  const ImagingBand band = imaging_band(3.0, 20.0, 6, 0.2);
  const FreqSlices gh = constant_slices(g, band.freqs, cd(0.3, -0.2));
  const FreqSlices zero = constant_slices(g, band.freqs, 0.0);
  ScalarField c(g);
  for (double& v : c.data()) v = 2000.0;
  const ImageResult a = image_ratio(gh, zero, c, band, 1e-4);
  const ImageResult b = image_xcorr(gh, zero, band);
  for (double v : a.image.data()) ASSERT_EQ(v, 0.0);
  for (double v : b.image.data()) ASSERT_EQ(v, 0.0);
}

TEST(Rtm, ImagingRejectsMismatchedInputs) {
  const Grid2D g(20, 15, 10.0, {0.0, 10.0});
  const ImagingBand band = imaging_band(3.0, 20.0, 6, 0.2);
  const FreqSlices a = constant_slices(g, band.freqs, 1.0);
  const FreqSlices shifted = constant_slices(Grid2D(20, 15, 10.0, {5.0, 10.0}), band.freqs, 1.0);
  ScalarField c(g);
  for (double& v : c.data()) v = 2000.0;
  EXPECT_THROW(image_ratio(a, shifted, c, band, 1e-4), GeometryError);
  EXPECT_THROW(image_xcorr(a, constant_slices(g, imaging_band(3.0, 21.0, 6, 0.2).freqs, 1.0), band),
               GeometryError);
  EXPECT_THROW(image_ratio(a, a, c, ImagingBand{}, 1e-4), ConfigError);
}

TEST(Rtm, RatioImageIsLinearInReceiverField) {
  const Grid2D g(24, 18, 10.0, {0.0, 10.0});
  const ImagingBand band = imaging_band(3.0, 20.0, 6, 0.2);
  FreqSlices gh{band.freqs, g, {}}, u1 = gh, u2 = gh, u12 = gh;
  for (std::size_t m = 0; m < band.size(); ++m) {
    ComplexField a(g), b(g), e(g), f(g);
    for (std::size_t j = 0; j < g.nx2(); ++j)
      for (std::size_t i = 0; i < g.nx1(); ++i) {
        const double x = g.x1(i), z = g.x2(j);
        a(i, j) = std::polar(1.0 + 0.001 * z, -0.02 * z - 0.003 * x);
        b(i, j) = std::polar(0.5, 0.03 * x + 0.01 * z * static_cast<double>(m));
        e(i, j) = std::polar(0.7, -0.05 * z + 0.02 * x);
        f(i, j) = 2.0 * b(i, j) - 0.25 * e(i, j);
      }
    gh.slices.push_back(a);
    u1.slices.push_back(b);
    u2.slices.push_back(e);
    u12.slices.push_back(f);
  }
  ScalarField c(g);
  for (double& v : c.data()) v = 2100.0;
  const ScalarField i1 = image_ratio(gh, u1, c, band, 1e-4).image;
  const ScalarField i2 = image_ratio(gh, u2, c, band, 1e-4).image;
  const ScalarField i12 = image_ratio(gh, u12, c, band, 1e-4).image;
  std::vector<double> lin(i12.size()), got(i12.data().begin(), i12.data().end());
  for (std::size_t k = 0; k < lin.size(); ++k) lin[k] = 2.0 * i1[k] - 0.25 * i2[k];
  EXPECT_LE(rel_l2(lin, got), 1e-10);
}

// one nonzero band weight, u_r linear in x2 so the difference quotients are exact
TEST(Rtm, ExcitationSingleBinMatchesHandValue) {
  const Grid2D g(5, 7, 10.0, {0.0, 10.0});
  const ImagingBand band = imaging_band(4.0, 12.0, 3, 0.0);
  ASSERT_EQ(band.weights[1], 1.0);
  const cd alpha(0.4, -1.1), beta(0.002, 0.003);
  FreqSlices u{band.freqs, g, {}};
  for (std::size_t m = 0; m < band.size(); ++m) {
    ComplexField f(g);
    for (std::size_t j = 0; j < g.nx2(); ++j)
      for (std::size_t i = 0; i < g.nx1(); ++i) f(i, j) = alpha + beta * g.x2(j);
    u.slices.push_back(f);
  }
  const double cv = 1800.0, A = 0.037, T = 0.213;
  GoFields go{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
              MaskField(g),   MaskField(g),   MaskField(g)};
  ScalarField c(g);
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = cv;
    go.A[k] = A;
    go.T[k] = T;
    go.n1[k] = 0.0;
    go.n2[k] = 1.0;
  }
  const std::vector<cd> W{cd(1.0), cd(0.02, -0.05), cd(1.0)};
  const ImageResult res = image_excitation(u, go, c, band, W);

  const double om = 2.0 * kPi * band.freqs[1];
  const cd iw(0.0, om);
  const cd inv32 = std::exp(-1.5 * std::log(iw));
  for (std::size_t j = 0; j < g.nx2(); ++j) {
    const cd ur = alpha + beta * g.x2(j);
    const cd hk = inv32 * (iw * ur + cv * beta) / A / W[1] * std::exp(iw * T);
    const double expect = 2.0 * band.df * hk.real();
    for (std::size_t i = 0; i < g.nx1(); ++i)
      EXPECT_NEAR(res.image(i, j), expect, 1e-8 * std::abs(expect));
  }
}

TEST(Rtm, ExcitationSkipsShadowCells) {
  const Grid2D g(5, 5, 10.0, {0.0, 10.0});
  const ImagingBand band = imaging_band(4.0, 12.0, 3, 0.0);
  const FreqSlices u = constant_slices(g, band.freqs, cd(1.0, 2.0));
  GoFields go{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
              MaskField(g),   MaskField(g),   MaskField(g)};
  ScalarField c(g);
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = 2000.0;
    go.A[k] = 0.05;
    go.n2[k] = 1.0;
  }
  go.shadow(2, 2) = 1;
  const ImageResult res = image_excitation(u, go, c, band, std::vector<cd>(3, cd(1.0)));
  EXPECT_EQ(res.image(2, 2), 0.0);
  EXPECT_NE(res.image(1, 1), 0.0);
}

TEST(Rtm, LowWavenumberFractionSeparatesScales) {
  const Grid2D g(64, 64, 10.0);
  ScalarField smooth(g), rough(g);
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      smooth(i, j) = std::cos(2.0 * kPi * static_cast<double>(j) / 64.0);
      rough(i, j) = std::cos(2.0 * kPi * 12.0 * static_cast<double>(j) / 64.0);
    }
  const double k_mid = 2.0 * kPi * 6.0 / 640.0;
  EXPECT_NEAR(low_wavenumber_fraction(smooth, k_mid), 1.0, 1e-12);
  EXPECT_NEAR(low_wavenumber_fraction(rough, k_mid), 0.0, 1e-12);
}

TEST(Aperture, HorizontalDipRecoverableUnderArrayCenter) {
  const ExperimentConfig cfg = small_config();
  const ScalarField c = build_velocity(cfg);
  const GoFields go = go_fields(c, cfg.source, cfg.rays, 1.0);
  const Grid2D& g = c.grid();
  // one sampled cell below the array center
  const CellIndex z = g.nearest({400.0, 300.0});
  const IndexBox box{z.i - 1, z.j - 1, 3, 3};
  const ApertureMap map = predict_aperture(box, go, c, cfg.acquisition.array(), 1.0, 1, 36);
  double lo = 0.0, hi = 0.0;
  ASSERT_TRUE(map.dip_range(1, 1, 0.5, lo, hi));
  EXPECT_LE(lo, 0.0);
  EXPECT_GE(hi, 0.0);
  EXPECT_GT(map.coverage(1, 1), 0.5);
}

TEST(Aperture, ShadowCellHasEmptyMask) {
  const ExperimentConfig cfg = small_config();
  const ScalarField c = build_velocity(cfg);
  RayFanSpec fan = cfg.rays;
  fan.theta_min_deg = -10.0;
  fan.theta_max_deg = 10.0;
  const GoFields go = go_fields(c, cfg.source, fan, 1.0);
  const CellIndex z = c.grid().nearest({600.0, 200.0});
  ASSERT_TRUE(go.shadow(z.i, z.j));
  const ApertureMap map = predict_aperture({z.i - 1, z.j - 1, 3, 3}, go, c, cfg.acquisition.array(), 1.0, 1, 36);
  EXPECT_EQ(map.coverage(1, 1), 0.0);
  double lo, hi;
  EXPECT_FALSE(map.dip_range(1, 1, 0.01, lo, hi));
  EXPECT_TRUE(map.shadow(1, 1));
}

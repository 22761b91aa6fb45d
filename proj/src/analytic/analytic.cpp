#include "rtms/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/fft.hpp"
#include "rtms/errors.hpp"
#include "rtms/raytools.hpp"

namespace rtms {
namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

bool nyquist(std::size_t b, std::size_t n) { return n % 2 == 0 && b == n / 2; }

SpectralField make_spectrum(const Grid2D& g) {
  SpectralField s;
  s.n1 = g.nx1();
  s.n2 = g.nx2();
  s.dk1 = 2.0 * kPi / (static_cast<double>(s.n1) * g.dx());
  s.dk2 = 2.0 * kPi / (static_cast<double>(s.n2) * g.dx());
  s.values.assign(s.n1 * s.n2, 0.0);
  return s;
}

// Bilinear interpolation on the lattice; zero outside the resolved band.
cd interp(const SpectralField& s, Vec2 k) {
  const double q1 = k.x1 / s.dk1;
  const double q2 = k.x2 / s.dk2;
  const double f1 = std::floor(q1);
  const double f2 = std::floor(q2);
  const double w1 = q1 - f1;
  const double w2 = q2 - f2;
  auto bin = [](double q, std::size_t n, std::size_t& out) {
    const double half = static_cast<double>(n) / 2.0;
    if (q <= -half || q > half - 1.0 + (n % 2 ? 1.0 : 0.0)) return false;
    const auto ni = static_cast<long>(n);
    out = static_cast<std::size_t>(((static_cast<long>(q) % ni) + ni) % ni);
    return true;
  };
  cd acc = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      std::size_t i1, i2;
      if (!bin(f1 + a, s.n1, i1) || !bin(f2 + b, s.n2, i2)) continue;
      acc += (a ? w1 : 1.0 - w1) * (b ? w2 : 1.0 - w2) * s.at(i1, i2);
    }
  return acc;
}

// Center of the bounding box of |r| > 1e-12 max |r|, and its x2 extent.
struct Support {
  Vec2 center{};
  double x2_lo = 0.0;
  double x2_hi = 0.0;
  bool empty = true;
};

Support support_of(const ComplexField& r) {
  const Grid2D& g = r.grid();
  double mx = 0.0;
  for (const cd& v : r.data()) mx = std::max(mx, std::abs(v));
  Support s;
  if (mx == 0.0) return s;
  double x1_lo = 1e300, x1_hi = -1e300;
  s.x2_lo = 1e300;
  s.x2_hi = -1e300;
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i)
      if (std::abs(r(i, j)) > 1e-12 * mx) {
        x1_lo = std::min(x1_lo, g.x1(i));
        x1_hi = std::max(x1_hi, g.x1(i));
        s.x2_lo = std::min(s.x2_lo, g.x2(j));
        s.x2_hi = std::max(s.x2_hi, g.x2(j));
      }
  s.center = {0.5 * (x1_lo + x1_hi), 0.5 * (s.x2_lo + s.x2_hi)};
  s.empty = false;
  return s;
}

// Spectrum with its phase referred to `ref` instead of the coordinate origin.
SpectralField shift_phase(SpectralField s, Vec2 ref, double sign) {
  for (std::size_t b2 = 0; b2 < s.n2; ++b2)
    for (std::size_t b1 = 0; b1 < s.n1; ++b1)
      s.at(b1, b2) *= std::polar(1.0, sign * dot(s.wavevector(b1, b2), ref));
  return s;
}

}  // namespace

Vec2 SpectralField::wavevector(std::size_t b1, std::size_t b2) const {
  return {dk1 * static_cast<double>(detail::fft_index(b1, n1)),
          dk2 * static_cast<double>(detail::fft_index(b2, n2))};
}

double SpectralField::symmetry_defect() const {
  double mx = 0.0, d = 0.0;
  for (std::size_t b2 = 0; b2 < n2; ++b2)
    for (std::size_t b1 = 0; b1 < n1; ++b1) {
      if (nyquist(b1, n1) || nyquist(b2, n2)) continue;  // no partner on the lattice
      const cd a = at(b1, b2);
      const cd b = at((n1 - b1) % n1, (n2 - b2) % n2);
      mx = std::max(mx, std::abs(a));
      d = std::max(d, std::abs(b - std::conj(a)));
    }
  return mx > 0.0 ? d / mx : 0.0;
}

SpectralField spectrum(const ComplexField& f) {
  const Grid2D& g = f.grid();
  SpectralField s = make_spectrum(g);
  detail::FftPlan fft(g.nx2(), g.nx1(), FFTW_FORWARD);
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i) fft(j, i) = f(i, j);
  fft.execute();
  const double cell = g.dx() * g.dx();
  const Vec2 x0 = g.origin();
  for (std::size_t b2 = 0; b2 < s.n2; ++b2)
    for (std::size_t b1 = 0; b1 < s.n1; ++b1)
      s.at(b1, b2) = cell * fft(b2, b1) * std::polar(1.0, -dot(s.wavevector(b1, b2), x0));
  return s;
}

SpectralField spectrum(const ScalarField& f) {
  SpectralField s = spectrum(to_complex(f));
  s.conjugate_symmetric = true;
  return s;
}

ComplexField inverse_spectrum(const SpectralField& s, const Grid2D& g) {
  if (g.nx1() != s.n1 || g.nx2() != s.n2) throw GeometryError("spectrum and grid differ in size");
  detail::FftPlan fft(g.nx2(), g.nx1(), FFTW_BACKWARD);
  const Vec2 x0 = g.origin();
  for (std::size_t b2 = 0; b2 < s.n2; ++b2)
    for (std::size_t b1 = 0; b1 < s.n1; ++b1)
      fft(b2, b1) = s.at(b1, b2) * std::polar(1.0, dot(s.wavevector(b1, b2), x0));
  fft.execute();
  const double norm = 1.0 / (static_cast<double>(s.n1 * s.n2) * g.dx() * g.dx());
  ComplexField out(g);
  for (std::size_t j = 0; j < g.nx2(); ++j)
    for (std::size_t i = 0; i < g.nx1(); ++i) out(i, j) = fft(j, i) * norm;
  return out;
}

ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k];
  return out;
}

ComplexField halfspace_oracle(const ComplexField& r) {
  SpectralField s = spectrum(r);
  for (std::size_t b1 = 0; b1 < s.n1; ++b1) s.at(b1, 0) = 0.0;
  return inverse_spectrum(s, r.grid());
}

ScalarField halfspace_oracle(const ScalarField& r) {
  const ComplexField z = halfspace_oracle(to_complex(r));
  ScalarField out(r.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = z[k].real();
  return out;
}

double branch_weight(Vec2 xi, int sign) {
  const double m = norm(xi);
  if (m == 0.0) return 0.0;
  // d_t -> sign i c |xi|, c d_x2 -> i c xi2, amplitude sign c^2 A / (2 i c |xi|)
  const cd op = cd(0.0, static_cast<double>(sign) * m + xi.x2);
  const cd amp = static_cast<double>(sign) / cd(0.0, 2.0 * m);
  return (2.0 * op * amp).real();
}

double branch_jacobian(Vec2 xi, int sign) {
  // xi -> xi - |xi| n with n = (0, -sign)
  return snell_jacobian(xi, {0.0, -static_cast<double>(sign)});
}

PlaneWaveState planewave_state(const ComplexField& r, double c, double A, double t) {
  if (!(c > 0.0)) throw ConfigError("velocity must be positive");
  const Support sup = support_of(r);
  if (!sup.empty && !(sup.x2_lo > 0.0 && sup.x2_hi < c * t))
    throw GeometryError("support of r must lie inside 0 < x2 < c t");
  const Grid2D& g = r.grid();
  const SpectralField R = shift_phase(spectrum(r), sup.center, 1.0);

  SpectralField U = make_spectrum(g), Ut = make_spectrum(g);
  for (std::size_t b2 = 0; b2 < U.n2; ++b2)
    for (std::size_t b1 = 0; b1 < U.n1; ++b1) {
      if (nyquist(b1, U.n1) || nyquist(b2, U.n2)) continue;
      const Vec2 xi = U.wavevector(b1, b2);
      const double m = norm(xi);
      if (m == 0.0) continue;
      const Vec2 kp{xi.x1, xi.x2 + m};
      const Vec2 km{xi.x1, xi.x2 - m};
      const cd rp = interp(R, kp) * std::polar(1.0, -dot(kp, sup.center));
      const cd rm = interp(R, km) * std::polar(1.0, -dot(km, sup.center));
      const cd amp = c * c * A / cd(0.0, 2.0 * c * m);
      const cd ep = std::polar(1.0, m * c * t);
      const cd em = std::conj(ep);
      U.at(b1, b2) = ep * amp * rp - em * amp * rm;
      Ut.at(b1, b2) = cd(0.0, c * m) * (ep * amp * rp + em * amp * rm);
    }
  return {inverse_spectrum(U, g), inverse_spectrum(Ut, g), t, c, A, sup.center};
}

ScalarField planewave_field(const ScalarField& r, double c, double A, double t) {
  const PlaneWaveState s = planewave_state(to_complex(r), c, A, t);
  ScalarField out(r.grid());
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = s.u[k].real();
    re = std::max(re, std::abs(s.u[k].real()));
    im = std::max(im, std::abs(s.u[k].imag()));
  }
  if (im > 1e-10 * re) throw Error("plane-wave field is not real");
  return out;
}

ComplexField planewave_reconstruct(const PlaneWaveState& s, Branch which) {
  const Grid2D& g = s.u.grid();
  const SpectralField U = spectrum(s.u);
  const SpectralField Ut = spectrum(s.u_t);
  const double c = s.c;

  // branch amplitudes as functions of xi, with the reference phase removed
  SpectralField Gm = make_spectrum(g), Gp = make_spectrum(g);
  for (std::size_t b2 = 0; b2 < U.n2; ++b2)
    for (std::size_t b1 = 0; b1 < U.n1; ++b1) {
      const Vec2 xi = U.wavevector(b1, b2);
      const double m = norm(xi);
      if (m == 0.0) continue;
      const cd dt = Ut.at(b1, b2) / cd(0.0, c * m);
      const cd bp = 0.5 * (U.at(b1, b2) + dt);
      const cd bm = 0.5 * (U.at(b1, b2) - dt);
      const cd amp = c * c * s.A / cd(0.0, 2.0 * c * m);
      const Vec2 kp{xi.x1, xi.x2 + m};
      const Vec2 km{xi.x1, xi.x2 - m};
      Gp.at(b1, b2) = bp * std::polar(1.0, -m * c * s.t) / amp * std::polar(1.0, dot(kp, s.reference));
      Gm.at(b1, b2) = -bm * std::polar(1.0, m * c * s.t) / amp * std::polar(1.0, dot(km, s.reference));
    }

  // (d_t + c d_x2) at t = x2 / c turns each branch into a transform over zeta = xi -+ (0, |xi|);
  // the derivative weight and the Jacobian of that substitution cancel
  SpectralField I = make_spectrum(g);
  for (std::size_t b2 = 0; b2 < I.n2; ++b2)
    for (std::size_t b1 = 0; b1 < I.n1; ++b1) {
      if (nyquist(b1, I.n1) || nyquist(b2, I.n2)) continue;
      const Vec2 zeta = I.wavevector(b1, b2);
      if (zeta.x2 == 0.0) continue;
      const int sign = zeta.x2 < 0.0 ? -1 : 1;
      if (which == Branch::down && sign > 0) continue;
      if (which == Branch::up && sign < 0) continue;
      const Vec2 xi = xi_from_zeta(zeta, {0.0, -static_cast<double>(sign)});
      const double w = branch_weight(xi, sign) / branch_jacobian(xi, sign);
      const cd G = interp(sign < 0 ? Gm : Gp, xi);
      I.at(b1, b2) = w * G * std::polar(1.0, -dot(zeta, s.reference));
    }
  return inverse_spectrum(I, g);
}

ScalarField planewave_reconstruct_real(const PlaneWaveState& s) {
  const ComplexField z = planewave_reconstruct(s, Branch::both);
  ScalarField out(z.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = z[k].real();
  return out;
}

}  // namespace rtms

#include "rtms/raytools.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace rtms {
namespace {

constexpr double kPi = std::numbers::pi;

// Keys cubic convolution (a = -1/2): weights of the taps at offsets -1, 0, 1, 2 for the
// fractional position u in [0, 1), with first and second derivatives in u.
void keys_weights(double u, std::array<double, 4>& w, std::array<double, 4>& d1,
                  std::array<double, 4>& d2) noexcept {
  const double u2 = u * u;
  const double u3 = u2 * u;
  w = {-0.5 * u3 + u2 - 0.5 * u, 1.5 * u3 - 2.5 * u2 + 1.0, -1.5 * u3 + 2.0 * u2 + 0.5 * u,
       0.5 * u3 - 0.5 * u2};
  d1 = {-1.5 * u2 + 2.0 * u - 0.5, 4.5 * u2 - 5.0 * u, -4.5 * u2 + 4.0 * u + 0.5, 1.5 * u2 - u};
  d2 = {-3.0 * u + 2.0, 9.0 * u - 5.0, -9.0 * u + 4.0, 3.0 * u - 1.0};
}

struct State {
  Vec2 y, p, dy, dp;
};

State operator+(const State& a, const State& b) {
  return {a.y + b.y, a.p + b.p, a.dy + b.dy, a.dp + b.dp};
}
State operator*(double s, const State& a) { return {s * a.y, s * a.p, s * a.dy, s * a.dp}; }

State rhs(const State& s, const VelocityInterpolator& c) {
  const auto v = c.eval(s.y);
  const double np = norm(s.p);
  const Vec2 u = s.p / np;
  const double uP = dot(u, s.dp);
  State d;
  d.y = v.c * u;
  d.p = -np * v.grad;
  d.dy = dot(v.grad, s.dy) * u + (v.c / np) * (s.dp - uP * u);
  const Vec2 hy{v.h11 * s.dy.x1 + v.h12 * s.dy.x2, v.h12 * s.dy.x1 + v.h22 * s.dy.x2};
  d.dp = -np * hy - uP * v.grad;
  return d;
}

RaySample to_sample(double t, const State& s) { return {t, s.y, s.p, s.dy, s.dp}; }

RaySample blend(const RaySample& a, const RaySample& b, double w) {
  auto mix = [w](Vec2 x, Vec2 y) { return (1.0 - w) * x + w * y; };
  return {(1.0 - w) * a.t + w * b.t, mix(a.y, b.y), mix(a.p, b.p), mix(a.dy, b.dy), mix(a.dp, b.dp)};
}

// Inverse of the bilinear map of a quad; returns false when q is outside.
bool invert_bilinear(const std::array<Vec2, 4>& P, Vec2 q, double& a, double& b) {
  // P[0] = (0,0), P[1] = (1,0), P[2] = (1,1), P[3] = (0,1)
  a = 0.5;
  b = 0.5;
  for (int it = 0; it < 30; ++it) {
    const Vec2 f = (1 - a) * (1 - b) * P[0] + a * (1 - b) * P[1] + a * b * P[2] + (1 - a) * b * P[3] - q;
    const Vec2 fa = (1 - b) * (P[1] - P[0]) + b * (P[2] - P[3]);
    const Vec2 fb = (1 - a) * (P[3] - P[0]) + a * (P[2] - P[1]);
    const double det = cross(fa, fb);
    if (std::abs(det) < 1e-300) return false;
    const double da = cross(f, fb) / det;
    const double db = cross(fa, f) / det;
    a -= da;
    b -= db;
    if (std::abs(da) + std::abs(db) < 1e-13) break;
  }
  constexpr double tol = 1e-9;
  return a >= -tol && a <= 1.0 + tol && b >= -tol && b <= 1.0 + tol && std::isfinite(a + b);
}

double bilinear(const ScalarField& f, double fi, double fj) {
  const auto i = static_cast<std::size_t>(fi);
  const auto j = static_cast<std::size_t>(fj);
  const double a = fi - i;
  const double b = fj - j;
  return (1 - a) * (1 - b) * f(i, j) + a * (1 - b) * f(i + 1, j) + a * b * f(i + 1, j + 1) +
         (1 - a) * b * f(i, j + 1);
}

}  // namespace

VelocityInterpolator::VelocityInterpolator(const ScalarField& c) : c_(c) {}

bool VelocityInterpolator::inside(Vec2 x) const noexcept {
  const double a = c_.grid().fi(x.x1);
  const double b = c_.grid().fj(x.x2);
  return a >= 0.0 && b >= 0.0 && a <= static_cast<double>(c_.grid().nx1() - 1) &&
         b <= static_cast<double>(c_.grid().nx2() - 1);
}

VelocityInterpolator::Sample VelocityInterpolator::eval(Vec2 x) const noexcept {
  const Grid2D& g = c_.grid();
  const double fi = g.fi(x.x1);
  const double fj = g.fj(x.x2);
  const double bi = std::floor(fi);
  const double bj = std::floor(fj);
  const double u = fi - bi;
  const double v = fj - bj;
  std::array<double, 4> wx, wy, dx1, dy1, dx2, dy2;
  keys_weights(u, wx, dx1, dx2);
  keys_weights(v, wy, dy1, dy2);
  const long n1 = static_cast<long>(g.nx1());
  const long n2 = static_cast<long>(g.nx2());
  Sample s;
  for (int n = 0; n < 4; ++n) {
    const long jj = std::clamp(static_cast<long>(bj) + n - 1, 0L, n2 - 1);
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    for (int m = 0; m < 4; ++m) {
      const long ii = std::clamp(static_cast<long>(bi) + m - 1, 0L, n1 - 1);
      const double cv = c_(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
      r0 += wx[m] * cv;
      r1 += dx1[m] * cv;
      r2 += dx2[m] * cv;
    }
    s.c += wy[n] * r0;
    s.grad.x1 += wy[n] * r1;
    s.grad.x2 += dy1[n] * r0;
    s.h11 += wy[n] * r2;
    s.h12 += dy1[n] * r1;
    s.h22 += dy2[n] * r0;
  }
  const double h = g.dx();
  s.grad = s.grad / h;
  s.h11 /= h * h;
  s.h12 /= h * h;
  s.h22 /= h * h;
  return s;
}

double tube_width(const RaySample& s) noexcept { return cross(s.dy, s.p / norm(s.p)); }

Ray trace_ray(Vec2 x0, Vec2 xi0, const VelocityInterpolator& c, const RayOptions& opt) {
  if (!c.inside(x0)) throw GeometryError("ray start outside the velocity grid");
  const double nx = norm(xi0);
  if (!(nx > 0.0)) throw GeometryError("ray covector must be nonzero");
  const double c0 = c.value(x0);
  State s;
  s.y = x0;
  s.p = xi0 / (nx * c0);
  s.dy = {0.0, 0.0};
  s.dp = Vec2{s.p.x2, -s.p.x1};

  Ray ray;
  RaySample prev = to_sample(opt.t0, s);
  if (opt.keep_samples) ray.samples.push_back(prev);
  const double h = opt.dt;
  const auto nsteps = static_cast<std::size_t>(std::ceil((opt.t_max - opt.t0) / h));
  for (std::size_t k = 0; k < nsteps; ++k) {
    const State k1 = rhs(s, c);
    const State s2 = s + (0.5 * h) * k1;
    const State k2 = rhs(s2, c);
    const State s3 = s + (0.5 * h) * k2;
    const State k3 = rhs(s3, c);
    const State s4 = s + h * k3;
    const State k4 = rhs(s4, c);
    s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const RaySample cur = to_sample(opt.t0 + static_cast<double>(k + 1) * h, s);
    if (opt.stop_at_surface && cur.y.x2 < 0.0 && prev.y.x2 >= 0.0) {
      const double w = prev.y.x2 / (prev.y.x2 - cur.y.x2);
      ray.exit = RayExit::surface;
      ray.exit_state = blend(prev, cur, w);
      ray.exit_state.y.x2 = 0.0;
      return ray;
    }
    if (!c.inside(s.y)) {
      ray.exit = RayExit::domain;
      ray.exit_state = prev;
      return ray;
    }
    if (opt.keep_samples) ray.samples.push_back(cur);
    prev = cur;
  }
  ray.exit = RayExit::time;
  ray.exit_state = prev;
  return ray;
}

GoFields go_fields(const ScalarField& c, Vec2 xs, const RayFanSpec& fan, double t_max) {
  const Grid2D& g = c.grid();
  if (fan.count < 3) throw ConfigError("ray fan needs at least 3 rays");
  if (!(fan.theta_max_deg > fan.theta_min_deg)) throw ConfigError("empty ray fan");
  VelocityInterpolator interp(c);

  std::vector<Ray> rays(fan.count);
  std::vector<std::vector<double>> width(fan.count);
  std::vector<std::vector<unsigned char>> flipped(fan.count);
  RayOptions opt;
  opt.dt = fan.dt;
  opt.t_max = t_max;
  for (std::size_t r = 0; r < fan.count; ++r) {
    const double th = (fan.theta_min_deg + (fan.theta_max_deg - fan.theta_min_deg) *
                                               static_cast<double>(r) / static_cast<double>(fan.count - 1)) *
                      kPi / 180.0;
    rays[r] = trace_ray(xs, {std::sin(th), std::cos(th)}, interp, opt);
    const auto& smp = rays[r].samples;
    width[r].resize(smp.size());
    flipped[r].assign(smp.size(), 0);
    for (std::size_t k = 0; k < smp.size(); ++k) {
      width[r][k] = tube_width(smp[k]);
      if (k > 0 && (width[r][k] <= 0.0 || flipped[r][k - 1])) flipped[r][k] = 1;
    }
    flipped[r][0] = 0;
  }

  GoFields go{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
              MaskField(g, 0), MaskField(g, 0), MaskField(g, 1)};
  ScalarField L(g);
  const double inf = std::numeric_limits<double>::infinity();
  go.T = ScalarField(g, inf);

  for (std::size_t r = 0; r + 1 < fan.count; ++r) {
    const auto& ra = rays[r].samples;
    const auto& rb = rays[r + 1].samples;
    const std::size_t n = std::min(ra.size(), rb.size());
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::array<Vec2, 4> P{ra[k].y, rb[k].y, rb[k + 1].y, ra[k + 1].y};
      const std::array<const RaySample*, 4> S{&ra[k], &rb[k], &rb[k + 1], &ra[k + 1]};
      const std::array<double, 4> W{width[r][k], width[r + 1][k], width[r + 1][k + 1], width[r][k + 1]};
      const bool flip = flipped[r][k] || flipped[r + 1][k] || flipped[r + 1][k + 1] || flipped[r][k + 1];
      double lo1 = P[0].x1, hi1 = P[0].x1, lo2 = P[0].x2, hi2 = P[0].x2;
      for (const Vec2& q : P) {
        lo1 = std::min(lo1, q.x1);
        hi1 = std::max(hi1, q.x1);
        lo2 = std::min(lo2, q.x2);
        hi2 = std::max(hi2, q.x2);
      }
      const double i0 = std::max(0.0, std::ceil(g.fi(lo1)));
      const double i1 = std::min(static_cast<double>(g.nx1() - 1), std::floor(g.fi(hi1)));
      const double j0 = std::max(0.0, std::ceil(g.fj(lo2)));
      const double j1 = std::min(static_cast<double>(g.nx2() - 1), std::floor(g.fj(hi2)));
      for (double jj = j0; jj <= j1; jj += 1.0) {
        for (double ii = i0; ii <= i1; ii += 1.0) {
          const auto i = static_cast<std::size_t>(ii);
          const auto j = static_cast<std::size_t>(jj);
          double a = 0.0, b = 0.0;
          if (!invert_bilinear(P, g.point(i, j), a, b)) continue;
          a = std::clamp(a, 0.0, 1.0);
          b = std::clamp(b, 0.0, 1.0);
          const std::array<double, 4> w{(1 - a) * (1 - b), a * (1 - b), a * b, (1 - a) * b};
          const double T = S[0]->t + b * (S[3]->t - S[0]->t);
          const double old = go.T(i, j);
          if (std::isfinite(old) && std::abs(T - old) > 2.0 * fan.dt) go.multipath(i, j) = 1;
          if (flip) go.caustic(i, j) = 1;
          if (T >= old) continue;
          go.T(i, j) = T;
          go.shadow(i, j) = 0;
          double Lw = 0.0;
          Vec2 d{};
          for (int q = 0; q < 4; ++q) {
            Lw += w[q] * W[q];
            d += w[q] * (S[q]->p / norm(S[q]->p));
          }
          L(i, j) = Lw;
          const double nd = norm(d);
          go.n1(i, j) = d.x1 / nd;
          go.n2(i, j) = d.x2 / nd;
        }
      }
    }
  }

  for (std::size_t k = 0; k < g.size(); ++k) {
    if (go.multipath[k]) go.caustic[k] = 1;
    if (go.shadow[k]) {
      go.T[k] = 0.0;
      go.A[k] = 0.0;
      go.n1[k] = 0.0;
      go.n2[k] = 0.0;
      continue;
    }
    go.A[k] = L[k] > 0.0 ? std::sqrt(c[k] / (8.0 * kPi * L[k])) : 0.0;
    if (!(L[k] > 0.0)) go.caustic[k] = 1;
  }
  return go;
}

double multipath_fraction(const GoFields& go, const IndexBox& box) {
  std::size_t n = 0;
  for (std::size_t j = box.j0; j < box.j0 + box.n2; ++j)
    for (std::size_t i = box.i0; i < box.i0 + box.n1; ++i) n += go.multipath(i, j) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(box.n1 * box.n2);
}

void require_single_arrival(const GoFields& go, const IndexBox& box, double max_fraction) {
  const double f = multipath_fraction(go, box);
  if (f > max_fraction)
    throw SmeViolation("source field has multiple arrivals on " + std::to_string(100.0 * f) +
                           "% of the image zone",
                       f);
}

double eikonal_residual(const GoFields& go, const ScalarField& c, const IndexBox& box, Vec2 xs,
                        double min_offset) {
  const Grid2D& g = c.grid();
  const double h = g.dx();
  double worst = 0.0;
  for (std::size_t j = std::max<std::size_t>(box.j0, 2); j < std::min(box.j0 + box.n2, g.nx2() - 2); ++j) {
    for (std::size_t i = std::max<std::size_t>(box.i0, 2); i < std::min(box.i0 + box.n1, g.nx1() - 2); ++i) {
      if (norm(g.point(i, j) - xs) < min_offset) continue;
      bool ok = true;
      for (int d = -2; d <= 2 && ok; ++d)
        ok = go.valid(i + d, j) && go.valid(i, j + d);
      if (!ok) continue;
      const auto& T = go.T;
      const double t1 = (-T(i + 2, j) + 8.0 * T(i + 1, j) - 8.0 * T(i - 1, j) + T(i - 2, j)) / (12.0 * h);
      const double t2 = (-T(i, j + 2) + 8.0 * T(i, j + 1) - 8.0 * T(i, j - 1) + T(i, j - 2)) / (12.0 * h);
      worst = std::max(worst, std::abs(std::hypot(t1, t2) * c(i, j) - 1.0));
    }
  }
  return worst;
}

Vec2 zeta_from_xi(Vec2 xi, Vec2 ns) noexcept {
  // xi . ns - |xi| rewritten without cancellation near xi || ns
  const double a = dot(xi, ns);
  const Vec2 perp = xi - a * ns;
  const double n = norm(xi);
  const double along = a <= 0.0 ? a - n : -dot(perp, perp) / (n + a);
  return perp + along * ns;
}

Vec2 xi_from_zeta(Vec2 zeta, Vec2 ns) {
  const double zn = dot(zeta, ns);
  if (!(zn < 0.0)) throw GeometryError("zeta outside the halfspace zeta . ns < 0");
  return zeta + (-dot(zeta, zeta) / (2.0 * zn)) * ns;
}

double snell_jacobian(Vec2 xi, Vec2 ns) {
  const double n = norm(xi);
  if (!(n > 0.0)) throw GeometryError("snell_jacobian needs xi != 0");
  return 1.0 - dot(xi, ns) / n;
}

double resolution_mask(Vec2 z, Vec2 zeta, const GoFields& go, const VelocityInterpolator& c,
                       const ArraySpec& array, double t_max, double ray_dt) {
  const Grid2D& g = go.T.grid();
  const double fi = g.fi(z.x1);
  const double fj = g.fj(z.x2);
  if (fi < 0.0 || fj < 0.0 || fi >= static_cast<double>(g.nx1() - 1) || fj >= static_cast<double>(g.nx2() - 1))
    return 0.0;
  const auto i = static_cast<std::size_t>(fi);
  const auto j = static_cast<std::size_t>(fj);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t a = 0; a < 2; ++a)
      if (!go.valid(i + a, j + b)) return 0.0;
  const double Ts = bilinear(go.T, fi, fj);
  Vec2 ns{bilinear(go.n1, fi, fj), bilinear(go.n2, fi, fj)};
  ns = ns / norm(ns);

  double value = 0.0;
  for (double sgn : {1.0, -1.0}) {
    const Vec2 zt = sgn * zeta;
    if (!(dot(zt, ns) < 0.0)) continue;
    const Vec2 xi = xi_from_zeta(zt, ns);
    RayOptions opt;
    opt.t0 = Ts;
    opt.dt = ray_dt;
    opt.t_max = t_max;
    opt.keep_samples = false;
    const Ray ray = trace_ray(z, xi, c, opt);
    if (ray.exit != RayExit::surface) continue;
    const RaySample& e = ray.exit_state;
    const double s = std::abs(e.p.x1) / norm(e.p);
    value += spatial_taper(e.y.x1, array) * grazing_rolloff(s, array.grazing_delta);
  }
  return std::min(value, 1.0);
}

}  // namespace rtms

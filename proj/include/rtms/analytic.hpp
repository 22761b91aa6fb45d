#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rtms/grid.hpp"

namespace rtms {

/// Continuous-convention spectrum of a field sampled on a grid:
/// F(k) = dx^2 sum_n f(x_n) exp(-i k . x_n), on the FFT wavenumber lattice.
struct SpectralField {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double dk1 = 0.0;  // rad/m
  double dk2 = 0.0;
  bool conjugate_symmetric = false;  // set when the source field was real
  std::vector<std::complex<double>> values;  // bin (b1, b2) at b2 * n1 + b1

  std::complex<double>& at(std::size_t b1, std::size_t b2) { return values[b2 * n1 + b1]; }
  const std::complex<double>& at(std::size_t b1, std::size_t b2) const { return values[b2 * n1 + b1]; }
  Vec2 wavevector(std::size_t b1, std::size_t b2) const;
  /// max |F(-k) - conj F(k)| / max |F| over bins that have a partner.
  double symmetry_defect() const;
};

SpectralField spectrum(const ComplexField& f);
SpectralField spectrum(const ScalarField& f);
ComplexField inverse_spectrum(const SpectralField& s, const Grid2D& grid);

ComplexField to_complex(const ScalarField& f);

/// Inverse transform of r_hat with the row k2 = 0 removed.
ScalarField halfspace_oracle(const ScalarField& r);
ComplexField halfspace_oracle(const ComplexField& r);

/// u and du/dt at time t for the field scattered by r from the plane wave A delta(t - x2 / c),
/// together with the reference point used to keep the spectra smooth.
struct PlaneWaveState {
  ComplexField u;
  ComplexField u_t;
  double t = 0.0;
  double c = 0.0;
  double A = 0.0;
  Vec2 reference{};
};

/// Requires the support of r inside 0 < x2 < c t; throws GeometryError otherwise.
PlaneWaveState planewave_state(const ComplexField& r, double c, double A, double t);

/// Real field u(., t); throws if the two branches fail to combine into a real field.
ScalarField planewave_field(const ScalarField& r, double c, double A, double t);

enum class Branch { down, up, both };

/// (2 / (c^2 A)) (d_t + c d_x2) u evaluated at t = x2 / c, computed branch by branch on the
/// spectral lattice. `down` is the exp(-i|xi|ct) branch, which fills k2 < 0.
ComplexField planewave_reconstruct(const PlaneWaveState& s, Branch which = Branch::both);
ScalarField planewave_reconstruct_real(const PlaneWaveState& s);

/// Spectral factor that (2 / (c^2 A)) (d_t + c d_x2) puts on one branch of u:
/// sign -1 for the exp(-i|xi|ct) branch, +1 for the other.
double branch_weight(Vec2 xi, int sign);

/// Determinant of d(xi + sign (0, |xi|)) / d xi.
double branch_jacobian(Vec2 xi, int sign);

}  // namespace rtms

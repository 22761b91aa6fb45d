#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rtms/errors.hpp"

namespace rtms {

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x1, s * a.x2}; }
  friend Vec2 operator/(Vec2 a, double s) { return {a.x1 / s, a.x2 / s}; }
  Vec2& operator+=(Vec2 b) {
    x1 += b.x1;
    x2 += b.x2;
    return *this;
  }
  Vec2 operator-() const { return {-x1, -x2}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

/// Cell index pair; i runs along x1 (fastest in memory), j along x2 (depth).
struct CellIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// Regular square-cell grid. x2 is depth, positive downwards.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t nx1, std::size_t nx2, double dx, Vec2 origin = {});

  std::size_t nx1() const noexcept { return nx1_; }
  std::size_t nx2() const noexcept { return nx2_; }
  std::size_t size() const noexcept { return nx1_ * nx2_; }
  double dx() const noexcept { return dx_; }
  Vec2 origin() const noexcept { return origin_; }

  double x1(std::size_t i) const noexcept { return origin_.x1 + dx_ * static_cast<double>(i); }
  double x2(std::size_t j) const noexcept { return origin_.x2 + dx_ * static_cast<double>(j); }
  Vec2 point(std::size_t i, std::size_t j) const noexcept { return {x1(i), x2(j)}; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx1_ + i; }
  CellIndex cell(std::size_t flat) const noexcept { return {flat % nx1_, flat / nx1_}; }

  /// Nearest cell to a physical point; throws GeometryError when outside.
  CellIndex nearest(Vec2 p) const;
  bool contains(Vec2 p) const noexcept;

  /// Continuous (fractional) index coordinates of a point.
  double fi(double x1) const noexcept { return (x1 - origin_.x1) / dx_; }
  double fj(double x2) const noexcept { return (x2 - origin_.x2) / dx_; }

  double x1_max() const noexcept { return x1(nx1_ - 1); }
  double x2_max() const noexcept { return x2(nx2_ - 1); }

  /// Sub-grid of n1 x n2 cells starting at (i0, j0).
  Grid2D window(std::size_t i0, std::size_t j0, std::size_t n1, std::size_t n2) const;

  bool same_as(const Grid2D& o, double tol = 1e-9) const noexcept;

 private:
  std::size_t nx1_ = 0;
  std::size_t nx2_ = 0;
  double dx_ = 1.0;
  Vec2 origin_{};
};

/// Index box inside a grid, used to name image zones and sub-windows.
struct IndexBox {
  std::size_t i0 = 0;
  std::size_t j0 = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  bool contains(std::size_t i, std::size_t j) const noexcept {
    return i >= i0 && i < i0 + n1 && j >= j0 && j < j0 + n2;
  }
};

/// Smallest index box covering the physical rectangle [lo, hi], clipped to the grid.
IndexBox box_of(const Grid2D& g, Vec2 lo, Vec2 hi);

template <typename T>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(Grid2D grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  BasicField(Grid2D grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GeometryError("field size does not match grid");
  }

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator()(std::size_t i, std::size_t j) noexcept { return values_[grid_.index(i, j)]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return values_[grid_.index(i, j)]; }
  T& operator[](std::size_t k) noexcept { return values_[k]; }
  const T& operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  std::vector<T>& data() noexcept { return values_; }
  const std::vector<T>& data() const noexcept { return values_; }

 private:
  Grid2D grid_;
  std::vector<T> values_;
};

using ScalarField = BasicField<double>;
using ComplexField = BasicField<std::complex<double>>;
using MaskField = BasicField<unsigned char>;

/// Copy of the values of `f` inside `box`, on the corresponding sub-grid.
ScalarField crop(const ScalarField& f, const IndexBox& box);

bool all_finite(std::span<const double> v) noexcept;
double max_abs(std::span<const double> v) noexcept;
double l2_norm(std::span<const double> v) noexcept;

}  // namespace rtms

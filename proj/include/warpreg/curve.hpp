#pragma once

#include <cstddef>
#include <vector>

namespace warpreg {

/// A curve sampled on a strictly increasing grid in [0,1].
struct SampledCurve {
  std::vector<double> grid;
  std::vector<double> values;

  SampledCurve() = default;
  SampledCurve(std::vector<double> g, std::vector<double> v);

  std::size_t size() const { return grid.size(); }

  /// Canonical curves span the whole unit interval.
  bool canonical() const;
};

/// n equally spaced points, 0 and 1 included.
std::vector<double> uniform_grid(int n);

/// Piecewise-linear value at t; clamps to the end values outside the grid.
double interp_linear(const std::vector<double>& grid, const std::vector<double>& values, double t);
double interp_linear(const SampledCurve& c, double t);

/// Composite trapezoid of the samples over the full grid.
double trapezoid(const std::vector<double>& grid, const std::vector<double>& values);

/// Affine map of an arbitrary-interval curve onto [0,1]; t0/t1 receive the original span.
SampledCurve to_unit_domain(const SampledCurve& c, double* t0 = nullptr, double* t1 = nullptr);

}  // namespace warpreg

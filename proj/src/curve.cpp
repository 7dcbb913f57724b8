#include "warpreg/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warpreg {

SampledCurve::SampledCurve(std::vector<double> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (grid.empty()) throw std::invalid_argument("SampledCurve: empty grid");
  if (grid.size() != values.size())
    throw std::invalid_argument("SampledCurve: grid/value length mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("SampledCurve: non-finite sample");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("SampledCurve: grid not strictly increasing");
  }
}

bool SampledCurve::canonical() const {
  if (grid.empty()) return false;
  return std::abs(grid.front()) <= 1e-12 && std::abs(grid.back() - 1.0) <= 1e-12 &&
         grid.front() >= -1e-12 && grid.back() <= 1.0 + 1e-12;
}

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  g.back() = 1.0;
  return g;
}

double interp_linear(const std::vector<double>& grid, const std::vector<double>& values, double t) {
  if (grid.empty()) throw std::invalid_argument("interp_linear: empty grid");
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  std::size_t lo = hi - 1;
  double u = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + u * (values[hi] - values[lo]);
}

double interp_linear(const SampledCurve& c, double t) {
  return interp_linear(c.grid, c.values, t);
}

double trapezoid(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("trapezoid: need two matching samples");
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    s += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return s;
}

SampledCurve to_unit_domain(const SampledCurve& c, double* t0, double* t1) {
  double a = c.grid.front();
  double b = c.grid.back();
  if (t0) *t0 = a;
  if (t1) *t1 = b;
  if (!(b > a)) throw std::invalid_argument("to_unit_domain: degenerate interval");
  std::vector<double> g(c.grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (c.grid[i] - a) / (b - a);
  g.front() = 0.0;
  g.back() = 1.0;
  return SampledCurve(std::move(g), c.values);
}

}  // namespace warpreg

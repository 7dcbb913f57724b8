#include "warpreg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "warpreg/errors.hpp"
#include "warpreg/warp.hpp"

namespace warpreg {

ReferenceChoice select_reference_j(const std::vector<SampledCurve>& curves,
                                   const RegistrationConfig& cfg) {
  const int n = static_cast<int>(curves.size());
  if (n < 2) throw std::invalid_argument("select_reference_j: need at least 2 curves");
  cfg.validate();

  ReferenceChoice choice;
  choice.method = ReferenceMethod::j_criterion;
  choice.scores.assign(curves.size(), std::numeric_limits<double>::infinity());
  std::vector<double> grid = uniform_grid(cfg.objective.eval_grid);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int j = 0; j < n; ++j) {
    std::vector<RegistrationResult> results;
    try {
      results = register_set_serial(curves, j, cfg);
    } catch (const std::exception&) {
      continue;  // candidate stays excluded
    }
    int failed = 0;
    double sum = 0.0;
    int used = 0;
    for (const auto& r : results) {
      // a registration that did not converge produced no warp estimate
      if (r.failed || !r.report.converged) {
        ++failed;
        continue;
      }
      double acc = 0.0;
      for (double t : grid) {
        double d = warp_eval(r.warp, t) - t;
        acc += d * d;
      }
      sum += acc / static_cast<double>(grid.size());
      ++used;
    }
    if (2 * failed > n || used == 0) continue;
    choice.scores[static_cast<std::size_t>(j)] = sum / used;
  }

  int best = -1;
  for (int j = 0; j < n; ++j) {
    double s = choice.scores[static_cast<std::size_t>(j)];
    if (!std::isfinite(s)) continue;
    if (best < 0 || s < choice.scores[static_cast<std::size_t>(best)]) best = j;
  }
  if (best < 0)
    throw DegenerateReference("select_reference_j: every candidate exceeded the failure bound");
  choice.index = best;
  return choice;
}

ReferenceChoice select_reference_power(const std::vector<SampledCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("select_reference_power: no curves");

  ReferenceChoice choice;
  choice.method = ReferenceMethod::half_power_median;
  choice.scores.reserve(curves.size());

  for (const auto& c : curves) {
    // Trapezoid of y^2 over [0, 1/2]; the straddling segment is cut at 1/2
    // with a linearly interpolated endpoint.
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < c.grid.size(); ++i) {
      double t0 = c.grid[i], t1 = c.grid[i + 1];
      if (t0 >= 0.5) break;
      double y0 = c.values[i], y1 = c.values[i + 1];
      if (t1 > 0.5) {
        double ymid = y0 + (y1 - y0) * (0.5 - t0) / (t1 - t0);
        acc += 0.5 * (0.5 - t0) * (y0 * y0 + ymid * ymid);
      } else {
        acc += 0.5 * (t1 - t0) * (y0 * y0 + y1 * y1);
      }
    }
    choice.scores.push_back(acc);
  }

  std::vector<int> order(curves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double pa = choice.scores[static_cast<std::size_t>(a)];
    double pb = choice.scores[static_cast<std::size_t>(b)];
    if (pa != pb) return pa < pb;
    return a < b;
  });
  choice.index = order[(order.size() - 1) / 2];  // lower median for even counts
  return choice;
}

}  // namespace warpreg

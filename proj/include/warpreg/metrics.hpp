#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "warpreg/curve.hpp"
#include "warpreg/warp.hpp"

namespace warpreg {

/// Percent root-mean-square difference: 100 * sqrt(int (yhat-model)^2 / int yhat^2),
/// trapezoid on the shared grid. Throws UndefinedPrd for a zero-energy yhat.
double prd(const SampledCurve& yhat, const SampledCurve& model);

using WarpFn = std::function<double(double)>;

/// sqrt(mean over the grid of (estimated(truth(t)) - t)^2): zero iff the
/// estimate undoes the generative warp on the grid. Callers checking how well
/// a registration recovered a known warp pass the inverse of the estimated
/// warp as `estimated` (the registration model warps the reference onto the
/// target, so its inverse is what maps the target back).
double warp_recovery_rmse(const WarpFn& estimated, const WarpFn& truth,
                          const std::vector<double>& grid);
double warp_recovery_rmse(const MonotoneWarp& estimated, const WarpFn& truth,
                          const std::vector<double>& grid);

/// Grid-averaged cross-sectional variance of each list (before, after).
/// Curves within a list must share a grid.
std::pair<double, double> variance_reduction(const std::vector<SampledCurve>& before,
                                             const std::vector<SampledCurve>& after);

struct EvaluationSummary {
  std::vector<double> prd_per_curve;
  std::vector<double> warp_rmse_per_curve;  // empty when no ground truth
  double variance_before = 0.0;
  double variance_after = 0.0;
  int model_order = 0;
};

}  // namespace warpreg

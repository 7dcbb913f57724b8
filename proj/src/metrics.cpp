#include "warpreg/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "warpreg/errors.hpp"

namespace warpreg {
namespace {

double cross_sectional_variance(const std::vector<SampledCurve>& curves) {
  const std::size_t n = curves.size();
  const std::size_t m = curves.front().size();
  for (const auto& c : curves)
    if (c.grid != curves.front().grid)
      throw std::invalid_argument("variance_reduction: curves must share a grid");
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0.0;
    for (const auto& c : curves) mean += c.values[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& c : curves) {
      double d = c.values[j] - mean;
      var += d * d;
    }
    acc += var / static_cast<double>(n - 1);
  }
  return acc / static_cast<double>(m);
}

}  // namespace

double prd(const SampledCurve& yhat, const SampledCurve& model) {
  if (yhat.grid != model.grid)
    throw std::invalid_argument("prd: curves must share a grid");
  std::vector<double> diff2(yhat.size()), y2(yhat.size());
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    double d = yhat.values[i] - model.values[i];
    diff2[i] = d * d;
    y2[i] = yhat.values[i] * yhat.values[i];
  }
  double energy = trapezoid(yhat.grid, y2);
  if (energy == 0.0) throw UndefinedPrd("prd: zero-energy curve");
  return 100.0 * std::sqrt(trapezoid(yhat.grid, diff2) / energy);
}

double warp_recovery_rmse(const WarpFn& estimated, const WarpFn& truth,
                          const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("warp_recovery_rmse: empty grid");
  double acc = 0.0;
  for (double t : grid) {
    double d = estimated(truth(t)) - t;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(grid.size()));
}

double warp_recovery_rmse(const MonotoneWarp& estimated, const WarpFn& truth,
                          const std::vector<double>& grid) {
  return warp_recovery_rmse([&estimated](double s) { return warp_eval(estimated, s); }, truth,
                            grid);
}

std::pair<double, double> variance_reduction(const std::vector<SampledCurve>& before,
                                             const std::vector<SampledCurve>& after) {
  if (before.size() < 2 || after.size() < 2)
    throw std::invalid_argument("variance_reduction: need at least 2 curves per list");
  return {cross_sectional_variance(before), cross_sectional_variance(after)};
}

}  // namespace warpreg

#include "warpreg/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "warpreg/errors.hpp"
#include "warpreg/rng.hpp"

namespace warpreg {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_unit(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error(std::string(who) + ": t outside [0,1]");
}

}  // namespace

double warp_f1(double b, double t) {
  if (!(std::abs(b) <= 1.0))
    throw NonmonotoneParameter("warp_f1: |b| > 1 makes the warp nonmonotone");
  check_unit(t, "warp_f1");
  return t + b * t * (1.0 - t);
}

double warp_f2(double b, int c, double t) {
  if (c < 0) throw std::invalid_argument("warp_f2: c must be >= 0");
  if (c != 0 && !(std::abs(kTwoPi * c * b) < 1.0))
    throw NonmonotoneParameter("warp_f2: |2*pi*c*b| >= 1 makes the warp nonmonotone");
  check_unit(t, "warp_f2");
  if (c == 0) return t;
  return t + b * std::sin(kTwoPi * c * t);
}

double TrueWarp::operator()(double t) const {
  switch (family) {
    case WarpFamily::f1:
      return warp_f1(b, t);
    case WarpFamily::f2:
      return warp_f2(b, c, t);
    case WarpFamily::none:
    default:
      check_unit(t, "TrueWarp");
      return t;
  }
}

double TrueWarp::deriv(double t) const {
  switch (family) {
    case WarpFamily::f1:
      check_unit(t, "TrueWarp");
      return 1.0 + b * (1.0 - 2.0 * t);
    case WarpFamily::f2:
      check_unit(t, "TrueWarp");
      return c == 0 ? 1.0 : 1.0 + b * kTwoPi * c * std::cos(kTwoPi * c * t);
    case WarpFamily::none:
    default:
      check_unit(t, "TrueWarp");
      return 1.0;
  }
}

double gaussian_mixture(const Eigen::VectorXd& z, const std::vector<double>& centers,
                        const std::vector<double>& widths, double t) {
  if (static_cast<std::size_t>(z.size()) != centers.size() || centers.size() != widths.size())
    throw std::invalid_argument("gaussian_mixture: component lengths differ");
  double y = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (!(widths[k] > 0.0)) throw std::invalid_argument("gaussian_mixture: width must be > 0");
    double d = t - centers[k];
    y += z[static_cast<Eigen::Index>(k)] * std::exp(-d * d / (2.0 * widths[k] * widths[k]));
  }
  return y;
}

void DatasetConfig::validate() {
  if (n_curves < 1) throw std::invalid_argument("DatasetConfig: n_curves must be >= 1");
  if (n_terms != 1 && n_terms != 2)
    throw std::invalid_argument("DatasetConfig: n_terms must be 1 or 2");
  if (centers.empty() && widths.empty()) {
    if (n_terms == 1) {
      centers = {0.5};
      widths = {0.1581};
    } else {
      centers = {0.25, 0.75};
      widths = {0.1, 0.1};
    }
  }
  if (centers.size() != static_cast<std::size_t>(n_terms))
    throw std::invalid_argument("DatasetConfig: centers length must equal n_terms");
  if (widths.size() != static_cast<std::size_t>(n_terms))
    throw std::invalid_argument("DatasetConfig: widths length must equal n_terms");
  for (double w : widths)
    if (!(w > 0.0)) throw std::invalid_argument("DatasetConfig: widths must be positive");
  if (!(z_std >= 0.0)) throw std::invalid_argument("DatasetConfig: z_std must be >= 0");
  if (warp_family == WarpFamily::f1) {
    if (!(f1_b_min <= f1_b_max))
      throw std::invalid_argument("DatasetConfig: f1_b_min must be <= f1_b_max");
    if (!(std::abs(f1_b_min) <= 1.0 && std::abs(f1_b_max) <= 1.0))
      throw std::invalid_argument("DatasetConfig: f1_b_range must lie in [-1,1]");
  }
  if (warp_family == WarpFamily::f2) {
    if (f2_c_set.empty()) throw std::invalid_argument("DatasetConfig: f2_c_set must be nonempty");
    for (int c : f2_c_set)
      if (c < 0) throw std::invalid_argument("DatasetConfig: f2_c_set entries must be >= 0");
    if (!(f2_b_max >= 0.0)) throw std::invalid_argument("DatasetConfig: f2_b_max must be >= 0");
  }
  if (grid_size < 2) throw std::invalid_argument("DatasetConfig: grid_size must be >= 2");
}

SyntheticDataset generate(DatasetConfig config) {
  config.validate();
  const int n = config.n_curves;
  const int K = config.n_terms;

  SyntheticDataset ds;
  ds.config = config;
  ds.z.resize(n, K);
  ds.true_warps.resize(static_cast<std::size_t>(n));
  ds.curves.reserve(static_cast<std::size_t>(n));

  Rng rng(config.seed);
  std::vector<double> grid = uniform_grid(config.grid_size);

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) ds.z(i, k) = rng.normal(config.z_mean, config.z_std);

    TrueWarp tw;
    tw.family = config.warp_family;
    if (config.warp_family == WarpFamily::f1) {
      tw.b = n == 1 ? 0.5 * (config.f1_b_min + config.f1_b_max)
                    : config.f1_b_min +
                          i * (config.f1_b_max - config.f1_b_min) / (n - 1);
    } else if (config.warp_family == WarpFamily::f2) {
      tw.c = config.f2_c_set[static_cast<std::size_t>(i) % config.f2_c_set.size()];
      int attempts = 0;
      for (;;) {
        double b = rng.uniform(-config.f2_b_max, config.f2_b_max);
        if (tw.c == 0 || std::abs(kTwoPi * tw.c * b) < 1.0) {
          tw.b = b;
          break;
        }
        if (++attempts > 10000)
          throw NonmonotoneParameter("generate: could not draw a monotone F2 slope");
      }
    }
    ds.true_warps[static_cast<std::size_t>(i)] = tw;

    Eigen::VectorXd zi = ds.z.row(i);
    std::vector<double> vals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      vals[j] = gaussian_mixture(zi, config.centers, config.widths, tw(grid[j]));
    ds.curves.emplace_back(grid, std::move(vals));
  }
  return ds;
}

}  // namespace warpreg

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "warpreg/curve.hpp"

namespace warpreg {

enum class WarpFamily { none, f1, f2 };

/// Quadratic time warp t + b*t*(1-t); |b| <= 1 keeps it monotone on [0,1].
double warp_f1(double b, double t);
/// Sinusoidal time warp t + b*sin(2*pi*c*t); |2*pi*c*b| < 1 keeps it strictly
/// monotone (c = 0 is the identity for any b).
double warp_f2(double b, int c, double t);

/// Closed-form generative warp attached to a synthetic curve.
struct TrueWarp {
  WarpFamily family = WarpFamily::none;
  double b = 0.0;
  int c = 0;

  double operator()(double t) const;
  double deriv(double t) const;
};

/// Sum of Gaussian bumps: sum_k z_k * exp(-(t - center_k)^2 / (2 width_k^2)).
double gaussian_mixture(const Eigen::VectorXd& z, const std::vector<double>& centers,
                        const std::vector<double>& widths, double t);

struct DatasetConfig {
  int n_curves = 21;
  int n_terms = 2;                    // bumps per curve (1 or 2)
  std::vector<double> centers;        // empty: filled from n_terms defaults
  std::vector<double> widths;         // likewise
  double z_mean = 5.0;
  double z_std = 1.5;
  WarpFamily warp_family = WarpFamily::f1;
  double f1_b_min = -1.0;             // F1 slopes are equally spaced over this range
  double f1_b_max = 1.0;
  std::vector<int> f2_c_set = {0, 1, 2, 3};  // cycle-count assignment, i mod set size
  double f2_b_max = 0.09;             // F2 amplitudes drawn uniform in +-this
  int grid_size = 1000;
  std::uint64_t seed = 0;

  /// Fills empty centers/widths from the built-in n_terms presets and checks
  /// every invariant; throws std::invalid_argument naming the offending field.
  void validate();
};

struct SyntheticDataset {
  std::vector<SampledCurve> curves;         // y_i(t) = mixture_i(h_i(t)) on the uniform grid
  std::vector<TrueWarp> true_warps;
  Eigen::MatrixXd z;                        // n_curves x n_terms mixture coefficients
  DatasetConfig config;                     // as validated
};

/// Seeded generation. Draw order per curve: the n_terms mixture coefficients
/// first (each normal consumes two uniforms), then the warp parameters; F2
/// slope rejection re-draws consume the stream. F1 slopes are deterministic.
SyntheticDataset generate(DatasetConfig config);

}  // namespace warpreg

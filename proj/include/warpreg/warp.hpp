#pragma once

#include <Eigen/Core>
#include <vector>

#include "warpreg/basis.hpp"

namespace warpreg {

/// c'B is clamped to +-this before exponentiation; hits set MonotoneWarp::clamped.
inline constexpr double kWarpExpClamp = 40.0;

/// Strictly monotone warp h(t) = beta0 + beta1 * integral_0^t exp(c'B(s)) ds
/// with beta0 = 0 and beta1 chosen so h(0) = 0, h(1) = 1. The integral is a
/// composite trapezoid on a uniform grid, cached in `nodes`; evaluation
/// interpolates linearly between nodes.
struct MonotoneWarp {
  Eigen::VectorXd coeffs;
  BasisSpec wbasis;
  double beta0 = 0.0;
  double beta1 = 1.0;
  int quad_grid = 1001;
  bool clamped = false;        // true if c'B hit the exp clamp anywhere
  bool identity = false;       // c'B constant: h is exactly t, evaluated as such
  std::vector<double> nodes;   // h at the uniform quadrature nodes
};

/// Basis values tabulated on the uniform quadrature grid; lets repeated warp
/// constructions over the same spec skip re-evaluating B(t).
struct WarpBasisTable {
  BasisSpec spec;
  int quad_grid = 0;
  Eigen::MatrixXd B;  // quad_grid x spec.size

  static WarpBasisTable build(const BasisSpec& spec, int quad_grid);
};

MonotoneWarp warp_from_coeffs(const Eigen::VectorXd& c, const WarpBasisTable& table);
MonotoneWarp warp_from_coeffs(const Eigen::VectorXd& c, const BasisSpec& wbasis,
                              int quad_grid = 1001);

/// Identity warp (all-zero coefficients over the default cubic spline basis).
MonotoneWarp identity_warp(int quad_grid = 1001);

double warp_eval(const MonotoneWarp& w, double t);
std::vector<double> warp_eval(const MonotoneWarp& w, const std::vector<double>& grid);

/// dh/dt = beta1 * exp(c'B(t)) > 0.
double warp_deriv(const MonotoneWarp& w, double t);

/// t with h(t) = y, from bisecting the node array and inverting the linear
/// segment. |h(t) - y| <= 1e-9.
double warp_inverse(const MonotoneWarp& w, double y);

}  // namespace warpreg

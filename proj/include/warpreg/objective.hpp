#pragma once

#include <Eigen/Core>
#include <vector>

#include "warpreg/basis.hpp"
#include "warpreg/warp.hpp"

namespace warpreg {

/// Discretization and weighting of the alignment criterion.
struct ObjectiveConfig {
  int eval_grid = 201;        // uniform residual grid size on [0,1]
  double lambda = 1e-2;       // identity-pull penalty weight
  double denom_floor = 1e-6;  // relative floor below which ratio points are masked

  void validate() const;
};

/// Per-call counters surfaced to callers; the evaluation itself is pure.
struct ObjectiveDiagnostics {
  int masked_points = 0;  // residual grid points dropped by the denominator guard
  int total_points = 0;   // residual grid size
  bool clamped_exp = false;
};

/// d/dt log f(t) for f given by an expansion: e'Psi(t) / e'Phi(t).
/// The denominator is guarded: when |e'Phi(t)| < floor * max_s |e'Phi(s)|
/// (max over a dense grid), the value is 0 and *masked is set.
double log_deriv_ratio(const BasisExpansion& e, double t, double floor_rel,
                       bool* masked = nullptr);

/// Weighted residual of the alignment equation for expansions p (reference)
/// and q (target) under warp w, with the identity-pull penalty appended:
///
///   r_j     = sqrt(w_j)          * [ q'Psi(t_j)/q'Phi(t_j) - h'(t_j) * p'Psi(h(t_j))/p'Phi(h(t_j)) ]
///   r_{M+j} = sqrt(lambda * w_j) * [ 1 - h'(t_j) ]
///
/// where w_j are trapezoid weights on the uniform grid, so
/// ||r||^2 = integral of rho^2 + lambda * integral of (1-h')^2 (both discretized).
/// Masked points contribute 0 and are counted in diag.
Eigen::VectorXd residual_vector(const BasisExpansion& p, const BasisExpansion& q,
                                const MonotoneWarp& w, const ObjectiveConfig& cfg,
                                ObjectiveDiagnostics* diag = nullptr);

/// Penalized least-squares criterion; equals residual_vector(...).squaredNorm().
double criterion(const BasisExpansion& p, const BasisExpansion& q,
                 const MonotoneWarp& w, const ObjectiveConfig& cfg);

/// Precomputed evaluation context for minimizing the criterion over warp
/// coefficients: fixed-grid target ratios, denominator normalizers, tabulated
/// warp-basis values. All evaluation methods are const and thread-safe.
class WarpObjective {
 public:
  WarpObjective(BasisExpansion p, BasisExpansion q, BasisSpec warp_basis,
                ObjectiveConfig cfg);

  int num_params() const { return wspec_.size; }
  int residual_size() const { return 2 * cfg_.eval_grid; }
  const ObjectiveConfig& config() const { return cfg_; }
  const BasisSpec& warp_basis() const { return wspec_; }
  const WarpBasisTable& warp_table() const { return wtable_; }

  MonotoneWarp make_warp(const Eigen::VectorXd& c) const;

  Eigen::VectorXd residual(const Eigen::VectorXd& c,
                           ObjectiveDiagnostics* diag = nullptr) const;
  Eigen::VectorXd residual_for_warp(const MonotoneWarp& w,
                                    ObjectiveDiagnostics* diag = nullptr) const;

  double criterion_value(const Eigen::VectorXd& c) const;

 private:
  BasisExpansion p_, q_;
  BasisSpec wspec_;
  ObjectiveConfig cfg_;
  WarpBasisTable wtable_;

  std::vector<double> tgrid_;          // uniform residual grid
  Eigen::VectorXd sqrt_w_;             // sqrt trapezoid weights
  Eigen::VectorXd sqrt_lw_;            // sqrt(lambda * weights)
  Eigen::VectorXd qratio_;             // target log-derivative ratio at tgrid_
  std::vector<char> qmasked_;          // guard hits on the target side
  double pmax_ = 0.0;                  // max |p'Phi| over a dense grid
  Eigen::MatrixXd Wobj_;               // warp-basis values at tgrid_ rows
};

}  // namespace warpreg

#include "warpreg/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace warpreg {
namespace {

constexpr int kDenseGrid = 1001;

// max_s |e'Phi(s)| over a dense uniform grid; normalizes the relative floor.
double dense_abs_max(const BasisExpansion& e) {
  Eigen::VectorXd buf(e.spec.size);
  double m = 0.0;
  for (int i = 0; i < kDenseGrid; ++i) {
    double s = static_cast<double>(i) / (kDenseGrid - 1);
    eval_basis_into(e.spec, s, buf.data());
    m = std::max(m, std::abs(buf.dot(e.coeffs)));
  }
  return m;
}

}  // namespace

void ObjectiveConfig::validate() const {
  if (eval_grid < 21) throw std::invalid_argument("ObjectiveConfig: eval_grid must be >= 21");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ObjectiveConfig: lambda must be >= 0");
  if (!(denom_floor >= 0.0))
    throw std::invalid_argument("ObjectiveConfig: denom_floor must be >= 0");
}

double log_deriv_ratio(const BasisExpansion& e, double t, double floor_rel, bool* masked) {
  if (masked) *masked = false;
  Eigen::VectorXd val(e.spec.size), der(e.spec.size);
  eval_basis_pair_into(e.spec, t, val.data(), der.data());
  double den = val.dot(e.coeffs);
  double floor = floor_rel * dense_abs_max(e);
  if (std::abs(den) < floor || den == 0.0) {
    if (masked) *masked = true;
    return 0.0;
  }
  return der.dot(e.coeffs) / den;
}

WarpObjective::WarpObjective(BasisExpansion p, BasisExpansion q, BasisSpec warp_basis,
                             ObjectiveConfig cfg)
    : p_(std::move(p)),
      q_(std::move(q)),
      wspec_(std::move(warp_basis)),
      cfg_(cfg),
      wtable_(WarpBasisTable::build(wspec_, 1001)) {
  cfg_.validate();
  const int M = cfg_.eval_grid;
  tgrid_ = uniform_grid(M);
  const double dt = 1.0 / (M - 1);
  sqrt_w_.resize(M);
  sqrt_lw_.resize(M);
  for (int j = 0; j < M; ++j) {
    double w = (j == 0 || j == M - 1) ? 0.5 * dt : dt;
    sqrt_w_[j] = std::sqrt(w);
    sqrt_lw_[j] = std::sqrt(cfg_.lambda * w);
  }

  pmax_ = dense_abs_max(p_);
  const double qfloor = cfg_.denom_floor * dense_abs_max(q_);
  qratio_.resize(M);
  qmasked_.assign(static_cast<std::size_t>(M), 0);
  Eigen::VectorXd val(q_.spec.size), der(q_.spec.size);
  for (int j = 0; j < M; ++j) {
    eval_basis_pair_into(q_.spec, tgrid_[static_cast<std::size_t>(j)], val.data(), der.data());
    double den = val.dot(q_.coeffs);
    if (std::abs(den) < qfloor || den == 0.0) {
      qmasked_[static_cast<std::size_t>(j)] = 1;
      qratio_[j] = 0.0;
    } else {
      qratio_[j] = der.dot(q_.coeffs) / den;
    }
  }

  Wobj_.resize(M, wspec_.size);
  Eigen::VectorXd wrow(wspec_.size);
  for (int j = 0; j < M; ++j) {
    eval_basis_into(wspec_, tgrid_[static_cast<std::size_t>(j)], wrow.data());
    Wobj_.row(j) = wrow.transpose();
  }
}

MonotoneWarp WarpObjective::make_warp(const Eigen::VectorXd& c) const {
  return warp_from_coeffs(c, wtable_);
}

Eigen::VectorXd WarpObjective::residual(const Eigen::VectorXd& c,
                                        ObjectiveDiagnostics* diag) const {
  return residual_for_warp(warp_from_coeffs(c, wtable_), diag);
}

Eigen::VectorXd WarpObjective::residual_for_warp(const MonotoneWarp& w,
                                                 ObjectiveDiagnostics* diag) const {
  if (!same_basis(w.wbasis, wspec_))
    throw std::invalid_argument("WarpObjective: warp basis differs from configured basis");
  const int M = cfg_.eval_grid;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * M);
  Eigen::VectorXd val(p_.spec.size), der(p_.spec.size);
  const double pfloor = cfg_.denom_floor * pmax_;
  int masked = 0;
  bool clamped = w.clamped;
  for (int j = 0; j < M; ++j) {
    double hp;
    if (w.identity) {
      hp = 1.0;
    } else {
      double W = Wobj_.row(j).dot(w.coeffs);
      if (W > kWarpExpClamp) {
        W = kWarpExpClamp;
        clamped = true;
      } else if (W < -kWarpExpClamp) {
        W = -kWarpExpClamp;
        clamped = true;
      }
      hp = w.beta1 * std::exp(W);
    }
    r[M + j] = sqrt_lw_[j] * (1.0 - hp);
    if (qmasked_[static_cast<std::size_t>(j)]) {
      ++masked;
      continue;
    }
    double ht = warp_eval(w, tgrid_[static_cast<std::size_t>(j)]);
    eval_basis_pair_into(p_.spec, ht, val.data(), der.data());
    double den = val.dot(p_.coeffs);
    if (std::abs(den) < pfloor || den == 0.0) {
      ++masked;
      continue;
    }
    r[j] = sqrt_w_[j] * (qratio_[j] - hp * (der.dot(p_.coeffs) / den));
  }
  if (diag) {
    diag->masked_points = masked;
    diag->total_points = M;
    diag->clamped_exp = clamped;
  }
  return r;
}

double WarpObjective::criterion_value(const Eigen::VectorXd& c) const {
  return residual(c).squaredNorm();
}

Eigen::VectorXd residual_vector(const BasisExpansion& p, const BasisExpansion& q,
                                const MonotoneWarp& w, const ObjectiveConfig& cfg,
                                ObjectiveDiagnostics* diag) {
  WarpObjective obj(p, q, w.wbasis, cfg);
  return obj.residual_for_warp(w, diag);
}

double criterion(const BasisExpansion& p, const BasisExpansion& q, const MonotoneWarp& w,
                 const ObjectiveConfig& cfg) {
  return residual_vector(p, q, w, cfg).squaredNorm();
}

}  // namespace warpreg

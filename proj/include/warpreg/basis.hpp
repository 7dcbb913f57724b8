#pragma once

#include <Eigen/Core>
#include <vector>

#include "warpreg/curve.hpp"

namespace warpreg {

enum class BasisKind { fourier, bspline };

/// Description of a basis system on [0,1].
///
/// Fourier uses {1, sin(2*pi*j*t), cos(2*pi*j*t)}; a requested even size > 1
/// drops the unpaired trailing term, so the effective size is always odd. The
/// trim is recorded in `even_size_trimmed`. B-splines use a clamped knot
/// vector with uniform interior knots.
struct BasisSpec {
  BasisKind kind = BasisKind::fourier;
  int size = 1;            // effective number of basis functions
  int requested_size = 1;  // as asked for (Fourier may trim by one)
  bool even_size_trimmed = false;
  int degree = 3;              // bspline only
  std::vector<double> knots;   // bspline only, full clamped vector

  static BasisSpec fourier(int n);
  static BasisSpec bspline(int n, int degree = 3);
};

/// Same basis system (ignores how the size was requested).
inline bool same_basis(const BasisSpec& a, const BasisSpec& b) {
  if (a.kind != b.kind || a.size != b.size) return false;
  if (a.kind == BasisKind::bspline) return a.degree == b.degree && a.knots == b.knots;
  return true;
}

/// Coefficients over a basis system.
struct BasisExpansion {
  BasisSpec spec;
  Eigen::VectorXd coeffs;

  BasisExpansion() = default;
  BasisExpansion(BasisSpec s, Eigen::VectorXd c);
};

/// Phi(t): values of every basis function. t outside [0,1] throws std::domain_error.
Eigen::VectorXd eval_basis(const BasisSpec& spec, double t);
/// Psi(t) = d/dt Phi(t), analytic.
Eigen::VectorXd eval_basis_deriv(const BasisSpec& spec, double t);

/// No-allocation variants; out must have spec.size entries.
void eval_basis_into(const BasisSpec& spec, double t, double* out);
void eval_basis_deriv_into(const BasisSpec& spec, double t, double* out);
/// Phi(t) and Psi(t) in one pass (shared recurrences).
void eval_basis_pair_into(const BasisSpec& spec, double t, double* val, double* der);

/// Discrete linear least squares over the curve's grid.
/// Throws IllPosedFit when the design is rank deficient.
BasisExpansion fit_expansion(const SampledCurve& curve, const BasisSpec& spec);

double eval_expansion(const BasisExpansion& e, double t);
double eval_expansion_deriv(const BasisExpansion& e, double t);

/// Expansion of f(t) + delta; exact for both basis kinds.
BasisExpansion shift_expansion(const BasisExpansion& e, double delta);

}  // namespace warpreg

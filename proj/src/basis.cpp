#include "warpreg/basis.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "warpreg/errors.hpp"

namespace warpreg {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_domain(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("basis: t outside [0,1]");
}

// Index of the knot span containing t, restricted to the nonempty spans.
int find_span(const std::vector<double>& knots, int degree, int nfuncs, double t) {
  int lo = degree;
  int hi = nfuncs;  // knots[nfuncs] is the first of the trailing clamp
  if (t >= knots[static_cast<std::size_t>(hi)]) return hi - 1;
  if (t <= knots[static_cast<std::size_t>(lo)]) return lo;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (t < knots[static_cast<std::size_t>(mid)])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

// Cox-de Boor triangle: values of the degree-d functions that are nonzero on
// span `span`, written to N[0..d] (N[j] = B_{span-d+j,d}(t)).
void bspline_nonzero(const std::vector<double>& knots, int degree, int span, double t,
                     double* N) {
  N[0] = 1.0;
  std::array<double, 32> left{}, right{};
  for (int j = 1; j <= degree; ++j) {
    left[static_cast<std::size_t>(j)] = t - knots[static_cast<std::size_t>(span + 1 - j)];
    right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    N[j] = saved;
  }
}

}  // namespace

BasisSpec BasisSpec::fourier(int n) {
  if (n < 1) throw std::invalid_argument("BasisSpec::fourier: size must be >= 1");
  BasisSpec s;
  s.kind = BasisKind::fourier;
  s.requested_size = n;
  if (n > 1 && n % 2 == 0) {
    s.size = n - 1;
    s.even_size_trimmed = true;
  } else {
    s.size = n;
  }
  return s;
}

BasisSpec BasisSpec::bspline(int n, int degree) {
  if (degree < 1 || degree > 20)
    throw std::invalid_argument("BasisSpec::bspline: degree must be in [1,20]");
  if (n < degree + 1)
    throw std::invalid_argument("BasisSpec::bspline: need at least degree+1 functions");
  BasisSpec s;
  s.kind = BasisKind::bspline;
  s.size = n;
  s.requested_size = n;
  s.degree = degree;
  int interior = n - degree - 1;
  s.knots.reserve(static_cast<std::size_t>(n + degree + 1));
  for (int i = 0; i <= degree; ++i) s.knots.push_back(0.0);
  for (int i = 1; i <= interior; ++i)
    s.knots.push_back(static_cast<double>(i) / (interior + 1));
  for (int i = 0; i <= degree; ++i) s.knots.push_back(1.0);
  return s;
}

BasisExpansion::BasisExpansion(BasisSpec s, Eigen::VectorXd c) : spec(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != spec.size)
    throw std::invalid_argument("BasisExpansion: coefficient count does not match spec");
  if (!coeffs.allFinite()) throw std::invalid_argument("BasisExpansion: non-finite coefficient");
}

void eval_basis_pair_into(const BasisSpec& spec, double t, double* val, double* der) {
  check_domain(t);
  if (spec.kind == BasisKind::fourier) {
    val[0] = 1.0;
    der[0] = 0.0;
    if (spec.size == 1) return;
    double theta = kTwoPi * t;
    double s1 = std::sin(theta), c1 = std::cos(theta);
    double sj = s1, cj = c1;
    val[1] = s1;
    val[2] = c1;
    der[1] = kTwoPi * c1;
    der[2] = -kTwoPi * s1;
    for (int j = 2; 2 * j <= spec.size - 1; ++j) {
      double snext = sj * c1 + cj * s1;
      double cnext = cj * c1 - sj * s1;
      sj = snext;
      cj = cnext;
      val[2 * j - 1] = sj;
      val[2 * j] = cj;
      der[2 * j - 1] = kTwoPi * j * cj;
      der[2 * j] = -kTwoPi * j * sj;
    }
    return;
  }
  for (int k = 0; k < spec.size; ++k) {
    val[k] = 0.0;
    der[k] = 0.0;
  }
  const int d = spec.degree;
  int span = find_span(spec.knots, d, spec.size, t);
  double N[32];
  bspline_nonzero(spec.knots, d, span, t, N);
  for (int j = 0; j <= d; ++j) val[span - d + j] = N[j];
  // Degree d-1 functions on the same knot vector, then the standard
  // first-derivative combination with 0/0 terms dropped.
  double Nlow[32];
  if (d == 1) {
    Nlow[0] = 1.0;
  } else {
    bspline_nonzero(spec.knots, d - 1, span, t, Nlow);
  }
  auto low = [&](int i) -> double {
    // B_{i,d-1}(t); nonzero only for span-d+1 <= i <= span.
    int j = i - (span - d + 1);
    if (j < 0 || j > d - 1) return 0.0;
    return Nlow[j];
  };
  const auto& tau = spec.knots;
  for (int i = span - d; i <= span; ++i) {
    double a = 0.0, b = 0.0;
    double da = tau[static_cast<std::size_t>(i + d)] - tau[static_cast<std::size_t>(i)];
    double db = tau[static_cast<std::size_t>(i + d + 1)] - tau[static_cast<std::size_t>(i + 1)];
    if (da != 0.0) a = low(i) / da;
    if (db != 0.0) b = low(i + 1) / db;
    der[i] = d * (a - b);
  }
}

void eval_basis_into(const BasisSpec& spec, double t, double* out) {
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(spec.size));
  eval_basis_pair_into(spec, t, out, scratch.data());
}

void eval_basis_deriv_into(const BasisSpec& spec, double t, double* out) {
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(spec.size));
  eval_basis_pair_into(spec, t, scratch.data(), out);
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, double t) {
  Eigen::VectorXd v(spec.size);
  eval_basis_into(spec, t, v.data());
  return v;
}

Eigen::VectorXd eval_basis_deriv(const BasisSpec& spec, double t) {
  Eigen::VectorXd v(spec.size);
  eval_basis_deriv_into(spec, t, v.data());
  return v;
}

BasisExpansion fit_expansion(const SampledCurve& curve, const BasisSpec& spec) {
  const auto n = static_cast<Eigen::Index>(curve.size());
  if (n < spec.size)
    throw IllPosedFit("fit_expansion: fewer samples than basis functions");
  Eigen::MatrixXd A(n, spec.size);
  Eigen::VectorXd row(spec.size);
  for (Eigen::Index i = 0; i < n; ++i) {
    eval_basis_into(spec, curve.grid[static_cast<std::size_t>(i)], row.data());
    A.row(i) = row.transpose();
  }
  Eigen::Map<const Eigen::VectorXd> b(curve.values.data(), n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < spec.size)
    throw IllPosedFit("fit_expansion: rank-deficient design matrix");
  Eigen::VectorXd c = qr.solve(b);
  return BasisExpansion(spec, std::move(c));
}

double eval_expansion(const BasisExpansion& e, double t) {
  check_domain(t);
  Eigen::VectorXd phi = eval_basis(e.spec, t);
  return e.coeffs.dot(phi);
}

double eval_expansion_deriv(const BasisExpansion& e, double t) {
  check_domain(t);
  Eigen::VectorXd psi = eval_basis_deriv(e.spec, t);
  return e.coeffs.dot(psi);
}

BasisExpansion shift_expansion(const BasisExpansion& e, double delta) {
  Eigen::VectorXd c = e.coeffs;
  if (e.spec.kind == BasisKind::fourier) {
    c[0] += delta;  // constant term
  } else {
    c.array() += delta;  // partition of unity
  }
  return BasisExpansion(e.spec, std::move(c));
}

}  // namespace warpreg

#include "warpreg/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warpreg {
namespace {



void check_domain(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("warp: t outside [0,1]");
}

}  // namespace

WarpBasisTable WarpBasisTable::build(const BasisSpec& spec, int quad_grid) {
  if (quad_grid < 51) throw std::invalid_argument("WarpBasisTable: quadrature grid must be >= 51");
  WarpBasisTable t;
  t.spec = spec;
  t.quad_grid = quad_grid;
  t.B.resize(quad_grid, spec.size);
  Eigen::VectorXd row(spec.size);
  for (int i = 0; i < quad_grid; ++i) {
    double s = static_cast<double>(i) / (quad_grid - 1);
    eval_basis_into(spec, s, row.data());
    t.B.row(i) = row.transpose();
  }
  return t;
}

MonotoneWarp warp_from_coeffs(const Eigen::VectorXd& c, const WarpBasisTable& table) {
  if (!c.allFinite()) throw std::invalid_argument("warp_from_coeffs: non-finite coefficients");
  if (c.size() != table.spec.size)
    throw std::invalid_argument("warp_from_coeffs: coefficient count does not match basis");
  const int M = table.quad_grid;
  MonotoneWarp w;
  w.coeffs = c;
  w.wbasis = table.spec;
  w.quad_grid = M;

  std::vector<double> e(static_cast<std::size_t>(M));
  double Wmin = 0.0, Wmax = 0.0;
  for (int i = 0; i < M; ++i) {
    double W = table.B.row(i).dot(c);
    if (i == 0) Wmin = Wmax = W;
    Wmin = std::min(Wmin, W);
    Wmax = std::max(Wmax, W);
    if (W > kWarpExpClamp) {
      W = kWarpExpClamp;
      w.clamped = true;
    } else if (W < -kWarpExpClamp) {
      W = -kWarpExpClamp;
      w.clamped = true;
    }
    e[static_cast<std::size_t>(i)] = std::exp(W);
  }
  if (Wmin == Wmax) {
    // Constant exponent: h is exactly the identity (the constant is absorbed
    // by the normalization). Evaluate it as such instead of through quadrature.
    w.identity = true;
    w.clamped = false;
    w.beta1 = std::exp(-std::clamp(Wmin, -kWarpExpClamp, kWarpExpClamp));
    w.nodes.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i)
      w.nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / (M - 1);
    w.nodes.front() = 0.0;
    w.nodes.back() = 1.0;
    return w;
  }
  const double dt = 1.0 / (M - 1);
  std::vector<double> H(static_cast<std::size_t>(M));
  H[0] = 0.0;
  for (int i = 1; i < M; ++i)
    H[static_cast<std::size_t>(i)] =
        H[static_cast<std::size_t>(i - 1)] +
        0.5 * dt * (e[static_cast<std::size_t>(i - 1)] + e[static_cast<std::size_t>(i)]);
  const double total = H.back();
  w.beta1 = 1.0 / total;
  w.nodes.resize(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) w.nodes[static_cast<std::size_t>(i)] = H[static_cast<std::size_t>(i)] / total;
  w.nodes.front() = 0.0;
  w.nodes.back() = 1.0;
  return w;
}

MonotoneWarp warp_from_coeffs(const Eigen::VectorXd& c, const BasisSpec& wbasis, int quad_grid) {
  return warp_from_coeffs(c, WarpBasisTable::build(wbasis, quad_grid));
}

MonotoneWarp identity_warp(int quad_grid) {
  BasisSpec spec = BasisSpec::bspline(10, 3);
  return warp_from_coeffs(Eigen::VectorXd::Zero(spec.size), spec, quad_grid);
}

double warp_eval(const MonotoneWarp& w, double t) {
  check_domain(t);
  if (w.identity) return t;
  const int M = w.quad_grid;
  double u = t * (M - 1);
  int k = static_cast<int>(u);
  if (k >= M - 1) return w.nodes.back();
  double frac = u - k;
  double lo = w.nodes[static_cast<std::size_t>(k)];
  double hi = w.nodes[static_cast<std::size_t>(k + 1)];
  return lo + frac * (hi - lo);
}

std::vector<double> warp_eval(const MonotoneWarp& w, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = warp_eval(w, grid[i]);
  return out;
}

double warp_deriv(const MonotoneWarp& w, double t) {
  check_domain(t);
  if (w.identity) return 1.0;
  Eigen::VectorXd b = eval_basis(w.wbasis, t);
  double W = b.dot(w.coeffs);
  W = std::clamp(W, -kWarpExpClamp, kWarpExpClamp);
  return w.beta1 * std::exp(W);
}

double warp_inverse(const MonotoneWarp& w, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("warp_inverse: y outside [0,1]");
  if (w.identity) return y;
  const auto& h = w.nodes;
  auto it = std::upper_bound(h.begin(), h.end(), y);
  if (it == h.begin()) return 0.0;
  if (it == h.end()) return 1.0;
  std::size_t hi = static_cast<std::size_t>(it - h.begin());
  std::size_t lo = hi - 1;
  double frac = (y - h[lo]) / (h[hi] - h[lo]);
  return (static_cast<double>(lo) + frac) / (w.quad_grid - 1);
}

}  // namespace warpreg

#include "warpreg/solver.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "warpreg/errors.hpp"
#include "warpreg/rng.hpp"

namespace warpreg {
namespace {

std::atomic<std::uint64_t> g_minimize_calls{0};

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

Eigen::VectorXd fd_column(const ResidualFn& fn, const Eigen::VectorXd& c, int k, double hk,
                          bool* ok) {
  Eigen::VectorXd cp = c, cm = c;
  cp[k] += hk;
  cm[k] -= hk;
  Eigen::VectorXd rp = fn(cp);
  Eigen::VectorXd rm = fn(cm);
  *ok = finite(rp) && finite(rm) && rp.size() == rm.size();
  if (!*ok) return Eigen::VectorXd();
  return (rp - rm) / (2.0 * hk);
}

struct SingleResult {
  Eigen::VectorXd c;
  SolverReport report;
};

SingleResult minimize_single(const ResidualFn& fn, const Eigen::VectorXd& c0,
                             const SolverOptions& opts) {
  Eigen::VectorXd c = c0;
  Eigen::VectorXd r = fn(c);
  if (!finite(r)) throw SolverFailure("minimize: residual not finite at the initial point");
  double S = r.squaredNorm();

  SolverReport rep;
  rep.criterion_history.push_back(S);
  double mu = opts.initial_damping;
  const int n = static_cast<int>(c.size());
  const int max_inner = 60;  // damping grows ~10x per rejection; 60 is unreachable noise

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    rep.iterations = iter;
    Eigen::MatrixXd J = fd_jacobian(fn, c, opts.fd_step);
    if (opts.pin_gauge && n > 0) J.col(0).setZero();
    Eigen::MatrixXd H = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < max_inner; ++attempt) {
      Eigen::MatrixXd A = H;
      A.diagonal().array() += mu;
      Eigen::VectorXd delta = A.ldlt().solve(-g);
      if (!finite(delta)) {
        mu *= opts.damping_up;
        continue;
      }
      if (delta.norm() <= opts.xtol * (c.norm() + opts.xtol)) {
        rep.converged = true;
        rep.final_criterion = S;
        return {c, rep};
      }
      Eigen::VectorXd c_try = c + delta;
      Eigen::VectorXd r_try = fn(c_try);
      double S_try = finite(r_try) ? r_try.squaredNorm() : std::nan("");
      if (std::isfinite(S_try) && S_try < S) {
        double rel = (S - S_try) / S;
        c = c_try;
        r = r_try;
        S = S_try;
        rep.criterion_history.push_back(S);
        mu *= opts.damping_down;
        accepted = true;
        if (rel <= opts.ftol || S == 0.0) {
          rep.converged = true;
          rep.final_criterion = S;
          return {c, rep};
        }
        break;
      }
      mu *= opts.damping_up;
    }
    if (!accepted) {
      // Damping exhausted without a strict decrease: the step collapsed below
      // xtol's reach or the surface is flat here. Treat as converged-at-c.
      rep.converged = true;
      rep.final_criterion = S;
      return {c, rep};
    }
  }
  rep.converged = false;
  rep.final_criterion = S;
  return {c, rep};
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
  if (!(ftol > 0.0)) throw std::invalid_argument("SolverOptions: ftol must be > 0");
  if (!(xtol > 0.0)) throw std::invalid_argument("SolverOptions: xtol must be > 0");
  if (!(initial_damping > 0.0))
    throw std::invalid_argument("SolverOptions: initial_damping must be > 0");
  if (!(damping_up > 1.0)) throw std::invalid_argument("SolverOptions: damping_up must be > 1");
  if (!(damping_down > 0.0 && damping_down < 1.0))
    throw std::invalid_argument("SolverOptions: damping_down must be in (0,1)");
  if (!(fd_step > 0.0)) throw std::invalid_argument("SolverOptions: fd_step must be > 0");
  if (multistart < 0) throw std::invalid_argument("SolverOptions: multistart must be >= 0");
  if (!(multistart_scale > 0.0))
    throw std::invalid_argument("SolverOptions: multistart_scale must be > 0");
}

Eigen::MatrixXd fd_jacobian(const ResidualFn& fn, const Eigen::VectorXd& c, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_jacobian: step must be > 0");
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd J;
  for (int k = 0; k < n; ++k) {
    double hk = step * std::max(1.0, std::abs(c[k]));
    bool ok = false;
    Eigen::VectorXd col = fd_column(fn, c, k, hk, &ok);
    if (!ok) {
      col = fd_column(fn, c, k, 0.1 * hk, &ok);
      if (!ok)
        throw SolverFailure("fd_jacobian: non-finite residual at perturbed point (column " +
                            std::to_string(k) + ")");
    }
    if (J.size() == 0) J.resize(col.size(), n);
    if (col.size() != J.rows())
      throw SolverFailure("fd_jacobian: residual size changed between evaluations");
    J.col(k) = col;
  }
  if (n == 0) J.resize(fn(c).size(), 0);
  return J;
}

std::pair<Eigen::VectorXd, SolverReport> minimize(const ResidualFn& fn,
                                                  const Eigen::VectorXd& c0,
                                                  const SolverOptions& opts) {
  opts.validate();
  g_minimize_calls.fetch_add(1, std::memory_order_relaxed);

  SingleResult best = minimize_single(fn, c0, opts);
  if (opts.multistart > 0) {
    Rng rng(opts.multistart_seed);
    for (int s = 0; s < opts.multistart; ++s) {
      Eigen::VectorXd start = c0;
      for (Eigen::Index k = 0; k < start.size(); ++k)
        start[k] += rng.normal(0.0, opts.multistart_scale);
      SingleResult alt = minimize_single(fn, start, opts);
      if (alt.report.final_criterion < best.report.final_criterion) best = std::move(alt);
    }
  }
  return {std::move(best.c), std::move(best.report)};
}

std::uint64_t minimize_invocations() { return g_minimize_calls.load(std::memory_order_relaxed); }

void reset_minimize_invocations() { g_minimize_calls.store(0, std::memory_order_relaxed); }

}  // namespace warpreg

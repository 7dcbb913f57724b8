#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace warpreg {

struct SolverOptions {
  int max_iters = 100;
  double ftol = 1e-10;            // relative criterion decrease
  double xtol = 1e-8;             // step norm relative to ||c||
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double fd_step = 1e-6;          // relative finite-difference step
  bool pin_gauge = false;         // hold c[0] at its initial value
  int multistart = 0;             // extra randomized starts (0 = single start)
  std::uint64_t multistart_seed = 12345;
  double multistart_scale = 0.5;  // sd of the start perturbations

  void validate() const;
};

struct SolverReport {
  bool converged = false;
  int iterations = 0;
  double final_criterion = 0.0;
  std::vector<double> criterion_history;  // initial value, then each accepted step
  double masked_fraction = 0.0;           // filled by callers that track masking
  bool clamped_exp = false;               // likewise
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian; column k perturbs c_k by step * max(1, |c_k|).
/// A non-finite residual at a perturbed point shrinks the step once (x0.1);
/// if it persists, throws SolverFailure.
Eigen::MatrixXd fd_jacobian(const ResidualFn& fn, const Eigen::VectorXd& c, double step);

/// Damped least squares over c: repeatedly solves (J'J + mu I) d = -J'r,
/// accepting only strict criterion decreases (mu x damping_up on rejection,
/// x damping_down on acceptance). Terminates on relative decrease below ftol,
/// step norm below xtol, or max_iters. Deterministic for fixed inputs.
/// Throws SolverFailure when the residual at c0 is non-finite.
std::pair<Eigen::VectorXd, SolverReport> minimize(const ResidualFn& fn,
                                                  const Eigen::VectorXd& c0,
                                                  const SolverOptions& opts = {});

/// Process-wide count of minimize() calls (a multistart run counts once).
std::uint64_t minimize_invocations();
void reset_minimize_invocations();

}  // namespace warpreg

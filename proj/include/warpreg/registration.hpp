#pragma once

#include <string>
#include <vector>

#include "warpreg/basis.hpp"
#include "warpreg/curve.hpp"
#include "warpreg/objective.hpp"
#include "warpreg/solver.hpp"
#include "warpreg/warp.hpp"

namespace warpreg {

struct RegistrationConfig {
  BasisSpec basis = BasisSpec::fourier(30);          // curve expansions
  BasisSpec warp_basis = BasisSpec::bspline(10, 3);  // warp coefficients
  ObjectiveConfig objective;
  SolverOptions solver;

  void validate() const;
};

struct RegistrationResult {
  MonotoneWarp warp;       // estimated h with y(t) ~ amplitude * x(h(t))
  double amplitude = 1.0;
  double prd = 0.0;        // percent RMS mismatch between fitted y and the model
  double criterion = 0.0;
  SolverReport report;
  SampledCurve aligned;    // y(h^-1(t)) / amplitude on the reference grid
  double offset = 0.0;     // positivity shift applied before ratio fitting
  bool degenerate_amplitude = false;
  bool failed = false;
  std::string message;
};

/// Registers y against reference x: fits both expansions, minimizes the
/// penalized alignment criterion over warp coefficients (starting from the
/// identity, with the criterion-flat leading coefficient held there so the
/// reported coefficients are reproducible), then estimates amplitude, aligned
/// curve, and PRD.
RegistrationResult register_pair(const SampledCurve& x, const SampledCurve& y,
                                 const RegistrationConfig& cfg = {});

/// Closed-form least-squares amplitude: <y, xhat o h> / <xhat o h, xhat o h>,
/// trapezoid inner products on the objective grid (y linearly interpolated).
/// Throws DegenerateReference when xhat o h has zero energy.
double estimate_amplitude(const SampledCurve& y, const BasisExpansion& x_exp,
                          const MonotoneWarp& w, int eval_grid = 201);

/// Registers every curve (reference included) against curves[ref_index].
/// Per-curve failures are flagged on the result, never thrown.
/// register_set runs curves in parallel; the _serial variant is the
/// reference implementation used to cross-check it.
std::vector<RegistrationResult> register_set(const std::vector<SampledCurve>& curves,
                                             int ref_index,
                                             const RegistrationConfig& cfg = {});
std::vector<RegistrationResult> register_set_serial(const std::vector<SampledCurve>& curves,
                                                    int ref_index,
                                                    const RegistrationConfig& cfg = {});

}  // namespace warpreg

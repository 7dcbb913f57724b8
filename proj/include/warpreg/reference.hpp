#pragma once

#include <vector>

#include "warpreg/curve.hpp"
#include "warpreg/registration.hpp"

namespace warpreg {

enum class ReferenceMethod { j_criterion, half_power_median };

struct ReferenceChoice {
  int index = 0;
  ReferenceMethod method = ReferenceMethod::half_power_median;
  std::vector<double> scores;  // J per candidate, or per-curve half-interval power
};

/// Exhaustive reference search: each candidate j registers the whole set
/// against itself (n^2 registrations total) and scores the grid-mean squared
/// deviation of the estimated warps from the identity, averaged over curves.
/// Lowest score wins; ties go to the lowest index. Candidates whose
/// registrations fail for more than half the curves are excluded (score inf);
/// throws DegenerateReference when every candidate is excluded.
ReferenceChoice select_reference_j(const std::vector<SampledCurve>& curves,
                                   const RegistrationConfig& cfg = {});

/// Cheap reference heuristic: picks the curve whose half-interval energy
/// integral_0^1/2 y^2 attains the sample median (lower median for even
/// counts; equal scores order by index, and the median slot wins).
ReferenceChoice select_reference_power(const std::vector<SampledCurve>& curves);

}  // namespace warpreg
